#pragma once

// Reduction kernels behind the detector inner loops.
//
// Every variant uses the same summation order: four interleaved lane
// accumulators over full blocks of four, folded as (l0 + l2) + (l1 + l3),
// then the tail added left to right. The portable scalar code follows that
// order exactly, so the AVX2 variant is bit-identical to it and results do not
// depend on the host CPU.

#include <cstdint>
#include <span>
#include <string_view>

namespace noveldetect::kernels {

using TermId = std::uint32_t;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

namespace scalar {
double sum(std::span<const double> values);
double gather_min_sum(const double* dense, std::span<const TermId> ids, std::span<const double> weights);
}  // namespace scalar

#ifdef NOVELDETECT_HAVE_AVX2
namespace avx2 {
double sum(std::span<const double> values);
double gather_min_sum(const double* dense, std::span<const TermId> ids, std::span<const double> weights);
}  // namespace avx2
#endif

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Best available ISA, unless NOVELDETECT_ISA=scalar is set in the environment.
Isa active_isa();

/// Overrides the runtime selection. Returns false (and changes nothing) when
/// the ISA is unavailable.
bool set_isa(Isa isa);

/// Sum of `values` in lane order.
double sum(std::span<const double> values);

/// Sum over j of min(dense[ids[j]], weights[j]) in lane order. `dense` must be
/// indexable by every id.
double gather_min_sum(const double* dense, std::span<const TermId> ids, std::span<const double> weights);

// Scatter helpers. No SIMD variant: AVX2 has no scatter instruction.
void scatter_max(double* dense, std::span<const TermId> ids, std::span<const double> weights);
void scatter_add(double* dense, std::span<const TermId> ids, std::span<const double> weights);
void scatter_zero(double* dense, std::span<const TermId> ids);

}  // namespace noveldetect::kernels
