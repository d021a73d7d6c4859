#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "supdiff/empirical.hpp"
#include "supdiff/error.hpp"
#include "supdiff/statistics.hpp"

using namespace supdiff;

namespace {

const UnivariateCdf U = UnivariateCdf::uniform();

Sample uniform_sample(std::size_t n, std::uint64_t index, std::uint64_t seed = 21) {
  auto e = stream_engine(seed, Stream::oracle, index);
  return draw_sample(U, n, e);
}

}  // namespace

TEST(KsOneSample, SmallExample) {
  const auto s = Sample::univariate({0.1, 0.5, 0.9});
  EXPECT_NEAR(ks_one_sample(s, U, FunctionalKind::sup_norm, 0.0).raw, 7.0 / 30.0, 1e-15);
  EXPECT_NEAR(ks_one_sample(s, U, FunctionalKind::amplitude, 0.0).raw, 14.0 / 30.0, 1e-15);
}

TEST(KsOneSample, NullCaseNonNegativeAndScaled) {
  const auto s = uniform_sample(400, 0);
  const auto r = ks_one_sample(s, U, FunctionalKind::sup_norm, 0.0);
  EXPECT_GE(r.centered, 0.0);
  EXPECT_DOUBLE_EQ(r.scale, 20.0);
  EXPECT_DOUBLE_EQ(r.centered, 20.0 * r.raw);
}

TEST(KsOneSample, RejectsIota) {
  EXPECT_THROW(ks_one_sample(Sample::univariate({0.5}), U, FunctionalKind::inf, 0.0), ValidationError);
}

TEST(KsOneSample, DiscreteGUsesAtoms) {
  // G has an atom of 1/2 at 0; F_n - G is -1/2 just left of 0 when the sample sits at 1.
  const UnivariateCdf G(UnivariateCdf::Table{{0.0, 2.0}, {0.5, 1.0}, true});
  const auto e = one_sample_extremes(Sample::univariate({1.0}), G);
  EXPECT_DOUBLE_EQ(e.inf, -0.5);
  EXPECT_DOUBLE_EQ(e.sup, 0.5);
}

TEST(KsOneSample, ExactScanMatchesGridEvaluation) {
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto s = uniform_sample(25, r);
    const auto Fn = ecdf(s);
    const auto& x = Fn.domain()->axis(0);
    std::vector<double> v(x.size()), l(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      v[i] = Fn[i] - U.cdf(x[i]);
      l[i] = Fn.at({i, Channel::left_limit}) - U.left_limit(x[i]);
    }
    const GridFunction diff(Fn.domain(), v, l);
    for (auto kind : {FunctionalKind::sup_norm, FunctionalKind::sup, FunctionalKind::amplitude}) {
      EXPECT_NEAR(ks_one_sample(s, U, kind, 0.0).raw, evaluate(kind, diff), 1e-15);
    }
  }
}

TEST(KsOneSample, Bivariate) {
  const JointCdf G(Copula::independence(), {U, U});
  const Sample s(2, {0.5, 0.5});
  // sup of F_n - G is at (0.5, 0.5): 1 - 0.25.
  EXPECT_NEAR(ks_one_sample(s, G, FunctionalKind::sup, 0.0).raw, 0.75, 1e-15);
  // inf over the lattice: just below (1, 0.5) or (0.5, 1) gives -0.5.
  EXPECT_NEAR(one_sample_extremes(s, G).inf, -0.5, 1e-15);
}

TEST(KsTwoSample, Basics) {
  const auto a = Sample::univariate({0.1, 0.4, 0.7});
  EXPECT_EQ(ks_two_sample(a, a, FunctionalKind::sup_norm, 0.0).raw, 0.0);
  const auto r = ks_two_sample(Sample::univariate({0.1}), Sample::univariate({0.9}), FunctionalKind::sup_norm, 0.0);
  EXPECT_EQ(r.raw, 1.0);
  EXPECT_DOUBLE_EQ(two_sample_scale(50, 50), 5.0);
}

TEST(CopulaTn, SelfAndComonotone) {
  auto e = stream_engine(5, Stream::oracle, 0);
  const auto s = draw_sample(Copula::clayton(1.0), 30, e);
  const auto lattice = rank_lattice(30, 2);
  EXPECT_EQ(copula_distance(s, empirical_copula(s, lattice)), 0.0);

  std::vector<double> data;
  for (int i = 1; i <= 400; ++i) {
    data.push_back(i);
    data.push_back(i);
  }
  const Sample co(2, data);
  EXPECT_NEAR(copula_stat_Tn(co, Copula::independence(), 0.0).raw, 0.25, 1e-2);
}

TEST(CopulaTn, ReferenceZeroIsNonNegative) {
  auto e = stream_engine(6, Stream::oracle, 0);
  const auto s = draw_sample(Copula::clayton(2.0), 100, e);
  EXPECT_GE(copula_stat_Tn(s, Copula::clayton(2.0), 0.0).centered, 0.0);
}

TEST(CopulaSymmetry, FastPathMatchesLatticeDefinition) {
  for (std::uint64_t r = 0; r < 20; ++r) {
    auto e = stream_engine(7, Stream::oracle, r);
    const auto s = draw_sample(Copula::clayton(1.5), 40 + r, e);
    const auto Cn = empirical_copula(s, rank_lattice(s.size(), 2));
    EXPECT_NEAR(copula_symmetry_distance(s), (Cn - survival_copula(Cn)).sup_norm(), 1e-14);
  }
}

TEST(CopulaSymmetry, SingleObservationFinite) {
  const Sample s(2, {0.3, 0.4});
  EXPECT_TRUE(std::isfinite(copula_symmetry_stat(s, 0.0).centered));
}

TEST(CopulaSymmetry, ClaytonReferencePositive) {
  const double a = copula_asymmetry(Copula::clayton(1.0), 400);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(copula_asymmetry(Copula::independence(), 101), 0.0, 1e-15);
  // Finer grids do not move the maximum much.
  EXPECT_NEAR(copula_asymmetry(Copula::clayton(1.0), 801), a, 1e-5);
}

TEST(KlBernoulli, Values) {
  EXPECT_EQ(kl_bernoulli(0.3, 0.3), 0.0);
  EXPECT_NEAR(kl_bernoulli(0.5, 0.25), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(kl_bernoulli(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(kl_bernoulli(1.0, 0.2), -std::log(0.2), 1e-15);
  EXPECT_THROW(kl_bernoulli(0.5, 0.0), ValidationError);
  EXPECT_THROW(kl_bernoulli(0.5, 1.0), ValidationError);
  EXPECT_EQ(kl_bernoulli_extended(0.0, 0.0), 0.0);
  EXPECT_EQ(kl_bernoulli_extended(1.0, 1.0), 0.0);
  EXPECT_TRUE(std::isinf(kl_bernoulli_extended(0.5, 1.0)));
}

TEST(BerkJones, SinglePoint) {
  EXPECT_NEAR(berk_jones_R(Sample::univariate({0.5}), U), std::log(2.0), 1e-15);
}

TEST(BerkJones, PerfectFitSmall) {
  std::vector<double> q;
  for (int i = 1; i <= 100; ++i) q.push_back((i - 0.5) / 100.0);
  const double R = berk_jones_R(Sample::univariate(q), U);
  EXPECT_GE(R, 0.0);
  EXPECT_LE(R, 0.03);
}

TEST(BerkJones, EndpointScanMatchesDenseGrid) {
  const auto G = UnivariateCdf::power(2.0);
  for (std::uint64_t r = 0; r < 100; ++r) {
    auto x = uniform_sample(20, r, 33).column(0);
    std::sort(x.begin(), x.end());
    double dense = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double t = (i + 0.5) / 100000.0;
      const double Fn = static_cast<double>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) / 20.0;
      dense = std::max(dense, kl_bernoulli(Fn, G.cdf(t)));
    }
    const double exact = berk_jones_R(Sample::univariate(x), G);
    EXPECT_GE(exact, dense - 1e-12);
    EXPECT_LE(exact - dense, 1e-2);
  }
}

TEST(BerkJones, Dn) {
  EXPECT_THROW(berk_jones_dn(15), ValidationError);
  const double l16 = std::log(std::log(16.0));
  EXPECT_NEAR(berk_jones_dn(16), l16 - 0.5 * std::log(l16) - 0.5 * std::log(4 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(berk_jones_dn(10000), 0.55599, 5e-5);
  EXPECT_NEAR(0.5 * std::log(4 * std::numbers::pi), 1.265512, 1e-6);
}

TEST(BerkJones, ReferenceAndConsistency) {
  const auto G = UnivariateCdf::power(2.0);
  const auto m = berk_jones_maximizer(U, G);
  double grid_best = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = (i + 0.5) / 100000.0;
    grid_best = std::max(grid_best, kl_bernoulli(x, x * x));
  }
  EXPECT_GE(m.value, grid_best - 1e-15);
  EXPECT_LE(m.value - grid_best, 1e-9);
  const auto s = uniform_sample(100000, 0);
  EXPECT_NEAR(berk_jones_R(s, G), m.value, 0.02);
  EXPECT_GE(berk_jones_Bn(uniform_sample(100, 1), U, 0.0).centered, 0.0);
}

TEST(Mmd, FiniteBasics) {
  Eigen::MatrixXd x(1, 2), y(1, 2);
  x << 0.3, 0.0;
  y << 0.0, 0.5;
  EXPECT_DOUBLE_EQ(mmd_finite(x, y, true).value, 0.5);
  EXPECT_DOUBLE_EQ(mmd_finite(x, y, false).value, 0.3);
  EXPECT_EQ(mmd_finite(x, x, true).value, 0.0);
  Eigen::MatrixXd z(1, 3);
  EXPECT_THROW(mmd_finite(x, z, true), ValidationError);
}

TEST(Mmd, IndicatorClassEqualsKs) {
  for (std::uint64_t r = 0; r < 10; ++r) {
    const auto sx = uniform_sample(60, r);
    const auto sy = uniform_sample(45, 100 + r);
    auto pooled = sx.column(0);
    const auto y = sy.column(0);
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto cls = FiniteFunctionClass::indicators(pooled, true);
    EXPECT_NEAR(mmd_finite(cls.evaluate(sx), cls.evaluate(sy), true).value,
                ks_two_sample(sx, sy, FunctionalKind::sup_norm, 0.0).raw, 1e-12);
  }
}

TEST(Mmd, SingleFunctionIsMeanDifference) {
  const FiniteFunctionClass cls({{FiniteFunctionClass::Shape::ramp, 0.0, 1.0, false}}, false);
  const auto sx = uniform_sample(50, 1);
  const auto sy = uniform_sample(70, 2);
  const double ref = 0.1;
  const auto mean = [](const Sample& s) {
    double m = 0.0;
    for (double v : s.column(0)) m += v;
    return m / s.size();
  };
  const auto r = mmd_statistic(sx, sy, cls, ref);
  EXPECT_NEAR(r.centered, two_sample_scale(50, 70) * (mean(sx) - mean(sy) - ref), 1e-12);
}

TEST(Mmd, PopulationMeansAndCovariance) {
  const auto cls = FiniteFunctionClass::indicators({0.25, 0.5}, false);
  const auto m = cls.means(U);
  EXPECT_NEAR(m[0], 0.25, 1e-15);
  const auto S = cls.covariance(U);
  EXPECT_NEAR(S(0, 1), 0.25 - 0.125, 1e-15);
  EXPECT_NEAR(cls.population_mmd(U, UnivariateCdf::uniform(0.1, 1.1)), 0.1, 1e-15);
  const FiniteFunctionClass ramp({{FiniteFunctionClass::Shape::ramp, 0.2, 0.6, true}}, false);
  // E(1 - ramp) under U[0, 1] = 0.2 + 0.4 / 2.
  EXPECT_NEAR(ramp.means(U)[0], 0.4, 1e-12);
}

TEST(KernelMmd, ClosedForms) {
  const auto a = Sample::univariate({0.0});
  EXPECT_EQ(kernel_mmd(a, a, {}), 0.0);
  EXPECT_NEAR(kernel_mmd(a, Sample::univariate({50.0}), {}), std::sqrt(2.0), 1e-12);
  const auto x = uniform_sample(20, 3), y = uniform_sample(30, 4);
  const Kernel lap{Kernel::Type::laplace, 0.5};
  EXPECT_NEAR(kernel_mmd(x, y, lap), kernel_mmd(y, x, lap), 1e-12);
  EXPECT_THROW(kernel_mmd(x, y, {Kernel::Type::gaussian, 0.0}), ValidationError);
}
