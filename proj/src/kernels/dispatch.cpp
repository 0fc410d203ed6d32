// Runtime kernel selection. No intrinsics in this file.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "noveldetect/kernels.hpp"

namespace noveldetect::kernels {

namespace {

struct KernelTable {
  Isa isa;
  double (*sum)(std::span<const double>);
  double (*gather_min_sum)(const double*, std::span<const TermId>, std::span<const double>);
};

constexpr KernelTable kScalarTable{Isa::scalar, &scalar::sum, &scalar::gather_min_sum};
#ifdef NOVELDETECT_HAVE_AVX2
constexpr KernelTable kAvx2Table{Isa::avx2, &avx2::sum, &avx2::gather_min_sum};
#endif

bool cpu_has_avx2() {
#if defined(NOVELDETECT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalarTable;
    case Isa::avx2:
#ifdef NOVELDETECT_HAVE_AVX2
      return cpu_has_avx2() ? &kAvx2Table : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* initial_table() {
  const char* forced = std::getenv("NOVELDETECT_ISA");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return &kScalarTable;
  if (const auto* t = table_for(Isa::avx2)) return t;
  return &kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return table_for(isa) != nullptr; }

Isa active_isa() { return current().load(std::memory_order_acquire)->isa; }

bool set_isa(Isa isa) {
  const auto* t = table_for(isa);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

double sum(std::span<const double> values) { return current().load(std::memory_order_acquire)->sum(values); }

double gather_min_sum(const double* dense, std::span<const TermId> ids, std::span<const double> weights) {
  return current().load(std::memory_order_acquire)->gather_min_sum(dense, ids, weights);
}

void scatter_max(double* dense, std::span<const TermId> ids, std::span<const double> weights) {
  for (std::size_t j = 0; j < ids.size(); ++j) dense[ids[j]] = std::max(dense[ids[j]], weights[j]);
}

void scatter_add(double* dense, std::span<const TermId> ids, std::span<const double> weights) {
  for (std::size_t j = 0; j < ids.size(); ++j) dense[ids[j]] += weights[j];
}

void scatter_zero(double* dense, std::span<const TermId> ids) {
  for (auto id : ids) dense[id] = 0.0;
}

}  // namespace noveldetect::kernels
