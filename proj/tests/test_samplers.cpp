#include <gtest/gtest.h>

#include <cmath>

#include "supdiff/empirical.hpp"
#include "supdiff/error.hpp"
#include "supdiff/samplers.hpp"

using namespace supdiff;

namespace {

Eigen::MatrixXd empirical_cov(const PathSampler& s, std::size_t paths) {
  const std::size_t N = s.domain()->size();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(N);
  for (std::size_t p = 0; p < paths; ++p) {
    const auto g = s.sample(p);
    Eigen::VectorXd v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = g[i];
    mean += v;
    sum.noalias() += v * v.transpose();
  }
  mean /= static_cast<double>(paths);
  return (sum - static_cast<double>(paths) * mean * mean.transpose()) / static_cast<double>(paths - 1);
}

DomainPtr uniform_levels() { return share(GridDomain::line({0.2, 0.4, 0.6, 0.8})); }

}  // namespace

TEST(PivotedCholesky, ReproducesRankDeficientMatrix) {
  Eigen::VectorXd v(4);
  v << 1.0, -2.0, 0.5, 3.0;
  const Eigen::MatrixXd S = v * v.transpose();
  const auto pc = pivoted_cholesky(S);
  EXPECT_EQ(pc.rank, 1u);
  EXPECT_LE(pc.residual, 1e-12);
}

TEST(PivotedCholesky, RejectsIndefinite) {
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(pivoted_cholesky(S), ValidationError);
}

TEST(PivotedCholesky, RejectsAsymmetric) {
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(pivoted_cholesky(S), ValidationError);
}

TEST(Bridge, CovarianceFormula) {
  const auto s = bridge_sampler(UnivariateCdf::uniform(), share(GridDomain::line({0.2, 0.5, 0.6})), 1);
  EXPECT_DOUBLE_EQ(s.covariance({1}, {1}), 0.25);
  EXPECT_NEAR(s.covariance({0}, {2}), 0.08, 1e-15);
}

TEST(Bridge, PinnedAtSentinelsAndFlatRegions) {
  const auto grid = share(GridDomain::compactified_line({-1.0, 0.0, 0.5, 1.0, 2.0}));
  const auto s = bridge_sampler(UnivariateCdf::uniform(), grid, 9);
  for (std::uint64_t p = 0; p < 200; ++p) {
    const auto g = s.sample(p);
    for (std::size_t node : {0, 1, 2, 4, 5, 6}) EXPECT_EQ(g[node], 0.0);
  }
}

TEST(Bridge, JumpingFHasCadlagPaths) {
  const UnivariateCdf F(UnivariateCdf::Table{{0.0, 1.0, 2.0}, {0.2, 0.7, 1.0}, true});
  const auto grid = share(GridDomain::compactified_line({0.0, 0.5, 1.0, 2.0}));
  const auto s = bridge_sampler(F, grid, 2);
  ASSERT_TRUE(s.cadlag());
  // Left channel at x = 1 reads F(1-) = 0.2; value channel reads F(1) = 0.7.
  EXPECT_NEAR(s.covariance({3, Channel::left_limit}, {3, Channel::left_limit}), 0.16, 1e-15);
  EXPECT_NEAR(s.covariance({3, Channel::value}, {3, Channel::value}), 0.21, 1e-15);
  const auto C = empirical_cov(s, 100000);
  EXPECT_NEAR(C(3, 3), 0.21, 0.21 * 0.03);
}

TEST(Bridge, Deterministic) {
  const auto s = bridge_sampler(UnivariateCdf::normal(), share(GridDomain::line({-1.0, 0.0, 1.0})), 5);
  const auto a = s.sample(17);
  const auto b = sample_path(s, 17);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Bridge, MeanAndVarianceAtHundredThousandPaths) {
  const auto s = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 12);
  const std::size_t paths = 100000;
  const auto C = empirical_cov(s, paths);
  std::vector<double> mean(4, 0.0);
  for (std::size_t p = 0; p < paths; ++p) {
    const auto g = s.sample(p);
    for (std::size_t i = 0; i < 4; ++i) mean[i] += g[i] / paths;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(std::abs(mean[i]), 4.0 / std::sqrt(static_cast<double>(paths)));
    EXPECT_NEAR(C(i, i), s.covariance({i}, {i}), 0.03 * s.covariance({i}, {i}));
  }
}

TEST(Sheet, CellMassMatchesDense) {
  const std::vector<double> axis{0.25, 0.5, 0.75, 1.0};
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto a = bridge_sampler(Copula::clayton(1.0), lattice, 3, Stream::limit, SheetMethod::cell_mass);
  const auto b = bridge_sampler(Copula::clayton(1.0), lattice, 3, Stream::limit, SheetMethod::dense);
  EXPECT_LT((a.covariance_matrix() - b.covariance_matrix()).norm(), 1e-14);
  const auto C = empirical_cov(a, 50000);
  EXPECT_LT((C - a.covariance_matrix()).cwiseAbs().maxCoeff(), 0.01);
}

TEST(CopulaLimit, IndependenceVariance) {
  const std::vector<double> axis{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto [d1, d2] = copula_partials(Copula::independence(), lattice, 1e-5);
  const auto s = copula_limit_sampler(Copula::independence(), lattice, {d1, d2}, 4);
  for (std::size_t node = 0; node < lattice->size(); ++node) {
    const double u = lattice->coordinate(node, 0), v = lattice->coordinate(node, 1);
    EXPECT_NEAR(s.covariance({node}, {node}), u * v * (1 - u) * (1 - v), 1e-9);
  }
  const auto C = empirical_cov(s, 100000);
  const std::size_t mid = lattice->flatten(std::vector<std::size_t>{2, 2});
  EXPECT_NEAR(C(mid, mid), 1.0 / 16.0, 0.03 / 16.0);
  // Corners have variance zero.
  EXPECT_EQ(C(lattice->size() - 1, lattice->size() - 1), 0.0);
}

TEST(CopulaLimit, RequiresPartialsAndUnitCorner) {
  const std::vector<double> axis{0.0, 0.5, 1.0};
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  EXPECT_THROW(copula_limit_sampler(Copula::independence(), lattice, {}, 1), ValidationError);
  const auto open = share(GridDomain::lattice({{0.0, 0.5}, {0.0, 0.5}}));
  const auto [d1, d2] = copula_partials(Copula::independence(), open, 0.1);
  EXPECT_THROW(copula_limit_sampler(Copula::independence(), open, {d1, d2}, 1), ValidationError);
}

TEST(CopulaLimit, SeedsGiveIndependentPaths) {
  const std::vector<double> axis{0.0, 0.5, 1.0};
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto [d1, d2] = copula_partials(Copula::independence(), lattice, 1e-5);
  const auto a = copula_limit_sampler(Copula::independence(), lattice, {d1, d2}, 1);
  const auto b = copula_limit_sampler(Copula::independence(), lattice, {d1, d2}, 2);
  const std::size_t mid = lattice->flatten(std::vector<std::size_t>{1, 1});
  double sab = 0, saa = 0, sbb = 0;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    const double x = a.sample(p)[mid], y = b.sample(p)[mid];
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  EXPECT_LE(std::abs(sab / std::sqrt(saa * sbb)), 0.05);
}

TEST(WeightedBridge, NullWeightIsZero) {
  const auto F = UnivariateCdf::uniform();
  const auto s = weighted_bridge_sampler(F, F, uniform_levels(), 1);
  for (std::uint64_t p = 0; p < 10; ++p) EXPECT_EQ(s.sample(p).sup_norm(), 0.0);
}

TEST(WeightedBridge, VarianceAtHalf) {
  EXPECT_NEAR(log_odds_weight(0.5, 0.25), std::log(3.0), 1e-15);
  const auto s = weighted_bridge_sampler(UnivariateCdf::uniform(), UnivariateCdf::power(2.0),
                                         share(GridDomain::line({0.25, 0.5, 0.75})), 1);
  EXPECT_NEAR(s.covariance({1}, {1}), 0.25 * std::log(3.0) * std::log(3.0), 1e-14);
}

TEST(WeightedBridge, TruncatedTailsArePinned) {
  const auto F = UnivariateCdf::uniform();
  const auto G = UnivariateCdf::power(2.0);
  auto interior = GridDomain::linspace(1e-8, 1.0 - 1e-8, 201);
  const auto grid = share(GridDomain::compactified_line(interior));
  const auto keep = weighted_bridge_support(F, G, *grid);
  EXPECT_FALSE(keep.front());
  EXPECT_FALSE(keep[1]);
  EXPECT_FALSE(keep.back());
  const auto s = weighted_bridge_sampler(F, G, grid, 3);
  // Extreme retained nodes: sample sd at most twice the theoretical sd.
  std::size_t lo = 0, hi = keep.size() - 1;
  while (!keep[lo]) ++lo;
  while (!keep[hi]) --hi;
  for (std::size_t node : {lo, hi}) {
    double ss = 0.0;
    for (std::uint64_t p = 0; p < 20000; ++p) ss += std::pow(s.sample(p)[node], 2);
    EXPECT_LE(std::sqrt(ss / 20000), 2.0 * std::sqrt(s.covariance({node}, {node})));
  }
  for (std::uint64_t p = 0; p < 100; ++p) EXPECT_EQ(s.sample(p)[1], 0.0);
}

TEST(WeightedBridge, InteriorNonFiniteWeightThrows) {
  // G(x) = 1 at an interior node where F < 1.
  const auto F = UnivariateCdf::uniform(0.0, 2.0);
  const auto G = UnivariateCdf::uniform();
  EXPECT_THROW(weighted_bridge_sampler(F, G, share(GridDomain::line({0.5, 1.5})), 1, {.min_variance = 1e-6, .max_weight = INFINITY}),
               ValidationError);
}

TEST(Mixture, HalfLambdaKeepsVariance) {
  const auto a = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 1, Stream::limit);
  const auto b = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 1, Stream::limit_secondary);
  const auto m = mixture_sampler(0.5, a, b);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(m.covariance({i}, {i}), a.covariance({i}, {i}), 1e-15);
}

TEST(Mixture, CovarianceStructure) {
  const auto a = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 7, Stream::limit);
  const auto b = bridge_sampler(UnivariateCdf::power(2.0), uniform_levels(), 7, Stream::limit_secondary);
  const auto m = mixture_sampler(0.3, a, b);
  const auto C = empirical_cov(m, 100000);
  const auto S = m.covariance_matrix();
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(S(i, i), 0.7 * a.covariance({std::size_t(i)}, {std::size_t(i)}) + 0.3 * b.covariance({std::size_t(i)}, {std::size_t(i)}), 1e-15);
    EXPECT_NEAR(C(i, i), S(i, i), 0.03 * S(i, i));
  }
}

TEST(Mixture, SmallLambdaRecoversFirst) {
  const auto a = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 1, Stream::limit);
  const auto b = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 1, Stream::limit_secondary);
  const auto m = mixture_sampler(1e-12, a, b);
  EXPECT_NEAR(m.sample(3)[1], a.sample(3)[1], 1e-5);
}

TEST(Mixture, RejectsSharedStreamOrGridMismatch) {
  const auto a = bridge_sampler(UnivariateCdf::uniform(), uniform_levels(), 1, Stream::limit);
  EXPECT_THROW(mixture_sampler(0.5, a, a), ValidationError);
  const auto c = bridge_sampler(UnivariateCdf::uniform(), share(GridDomain::line({0.1, 0.9})), 1, Stream::limit_secondary);
  EXPECT_THROW(mixture_sampler(0.5, a, c), ValidationError);
  EXPECT_THROW(mixture_sampler(1.0, a, c), ValidationError);
}

TEST(FiniteClass, ZeroIdentityAndRankOne) {
  const auto zero = finite_class_sampler(Eigen::MatrixXd::Zero(3, 3), 1);
  EXPECT_EQ(zero.sample(0).sup_norm(), 0.0);

  const auto id = finite_class_sampler(Eigen::MatrixXd::Identity(3, 3), 1);
  const auto C = empirical_cov(id, 100000);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(C(i, i), 1.0, 0.03);

  Eigen::VectorXd v(3);
  v << 1.0, -2.0, 0.5;
  const auto r1 = finite_class_sampler(v * v.transpose(), 1);
  EXPECT_EQ(r1.rank(), 1u);
  for (std::uint64_t p = 0; p < 20; ++p) {
    const auto g = r1.sample(p);
    EXPECT_NEAR(g[1], -2.0 * g[0], 1e-12);
    EXPECT_NEAR(g[2], 0.5 * g[0], 1e-12);
  }
}

TEST(FiniteClass, RejectsNonPsd) {
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(finite_class_sampler(S, 1), ValidationError);
}
