#include <gtest/gtest.h>

#include <cstring>
#include <vector>

#include "noveldetect/kernels.hpp"
#include "noveldetect/random.hpp"

using namespace noveldetect;
using namespace noveldetect::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Straight restatement of the documented lane order.
double lane_order_sum(const std::vector<double>& v) {
  double lane[4] = {0, 0, 0, 0};
  std::size_t full = v.size() / 4 * 4;
  for (std::size_t i = 0; i < full; ++i) lane[i % 4] += v[i];
  double total = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = full; i < v.size(); ++i) total += v[i];
  return total;
}

struct Case {
  std::vector<double> dense;
  std::vector<TermId> ids;
  std::vector<double> weights;
};

Case random_case(Rng& rng, std::size_t n) {
  Case c;
  c.dense.resize(3 * n + 8);
  for (auto& d : c.dense) d = rng.bernoulli(0.3) ? 0.0 : rng.unit() * 5.0;
  for (std::size_t i = 0; i < n; ++i) {
    c.ids.push_back(static_cast<TermId>(rng.below(c.dense.size())));
    c.weights.push_back(rng.unit() * 5.0 + 1e-3);
  }
  return c;
}

class IsaGuard {
 public:
  IsaGuard() : saved_(active_isa()) {}
  ~IsaGuard() { set_isa(saved_); }

 private:
  Isa saved_;
};

}  // namespace

TEST(Kernels, ScalarMatchesLaneOrder) {
  Rng rng(1);
  for (std::size_t n = 0; n < 40; ++n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.unit() * 1e3 - 1.0;
    EXPECT_TRUE(same_bits(scalar::sum(v), lane_order_sum(v))) << n;
  }
}

TEST(Kernels, ScalarGatherMinSum) {
  std::vector<double> dense = {0.0, 2.0, 0.5, 4.0, 1.0};
  std::vector<TermId> ids = {1, 2, 3, 4, 0};
  std::vector<double> w = {1.0, 1.0, 1.0, 1.0, 9.0};
  // lanes: min(2,1)=1, min(.5,1)=.5, min(4,1)=1, min(1,1)=1; tail min(0,9)=0
  EXPECT_EQ(scalar::gather_min_sum(dense.data(), ids, w), 3.5);
  EXPECT_EQ(scalar::gather_min_sum(dense.data(), {}, {}), 0.0);
}

TEST(Kernels, Avx2BitIdenticalToScalar) {
  if (!isa_available(Isa::avx2)) GTEST_SKIP() << "AVX2 not available on this host";
#ifdef NOVELDETECT_HAVE_AVX2
  Rng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = rng.below(70);
    auto c = random_case(rng, n);
    ASSERT_TRUE(same_bits(avx2::sum(c.weights), scalar::sum(c.weights))) << "trial " << trial;
    ASSERT_TRUE(same_bits(avx2::gather_min_sum(c.dense.data(), c.ids, c.weights),
                          scalar::gather_min_sum(c.dense.data(), c.ids, c.weights)))
        << "trial " << trial;
  }
#endif
}

TEST(Kernels, DispatchAndOverride) {
  IsaGuard guard;
  EXPECT_TRUE(isa_available(Isa::scalar));
  EXPECT_TRUE(set_isa(Isa::scalar));
  EXPECT_EQ(active_isa(), Isa::scalar);
  EXPECT_EQ(isa_name(Isa::scalar), "scalar");
  std::vector<double> v = {1, 2, 3, 4, 5, 6};
  double s = sum(v);
  if (set_isa(Isa::avx2)) {
    EXPECT_EQ(active_isa(), Isa::avx2);
    EXPECT_TRUE(same_bits(sum(v), s));
  } else {
    EXPECT_EQ(active_isa(), Isa::scalar);
  }
}

TEST(Kernels, Scatter) {
  std::vector<double> dense(6, 0.0);
  std::vector<TermId> ids = {1, 4};
  scatter_max(dense.data(), ids, std::vector<double>{2.0, 1.0});
  scatter_max(dense.data(), ids, std::vector<double>{1.0, 3.0});
  EXPECT_EQ(dense, (std::vector<double>{0, 2, 0, 0, 3, 0}));
  scatter_add(dense.data(), ids, std::vector<double>{1.0, 1.0});
  EXPECT_EQ(dense, (std::vector<double>{0, 3, 0, 0, 4, 0}));
  scatter_zero(dense.data(), ids);
  EXPECT_EQ(dense, std::vector<double>(6, 0.0));
}
