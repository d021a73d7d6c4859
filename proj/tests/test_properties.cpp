#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "supdiff/distributions.hpp"
#include "supdiff/empirical.hpp"
#include "supdiff/functionals.hpp"
#include "supdiff/statistics.hpp"

using namespace supdiff;

namespace {

constexpr int kTrials = 200;

GridFunction random_function(const DomainPtr& d, std::mt19937_64& rng, bool plateau) {
  std::normal_distribution<double> z;
  std::vector<double> v(d->size());
  for (auto& x : v) x = z(rng);
  if (plateau) {
    const double top = *std::max_element(v.begin(), v.end());
    std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
    v[pick(rng)] = top;
  }
  return GridFunction(d, std::move(v));
}

const FunctionalKind kKinds[] = {FunctionalKind::sup_norm, FunctionalKind::sup, FunctionalKind::inf,
                                 FunctionalKind::amplitude};

}  // namespace

TEST(Property, DerivativePositivelyHomogeneousInDirection) {
  std::mt19937_64 rng(1);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 40)));
  std::uniform_real_distribution<double> c(0.1, 5.0);
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, trial % 2 == 0);
    const auto g = random_function(d, rng, false);
    const double s = c(rng);
    for (auto kind : kKinds) {
      const DirectionalDerivative D(kind, f, 0.0);
      EXPECT_NEAR(D(g.scaled(s)), s * D(g), 1e-12 * (1.0 + s)) << to_string(kind);
    }
  }
}

TEST(Property, DerivativeLipschitzInDirection) {
  std::mt19937_64 rng(2);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 30)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, true);
    const auto g = random_function(d, rng, false);
    const auto h = random_function(d, rng, false);
    const double dist = (g - h).sup_norm();
    for (auto kind : kKinds) {
      const double L = kind == FunctionalKind::amplitude ? 2.0 : 1.0;
      const DirectionalDerivative D(kind, f, 0.0);
      EXPECT_LE(std::abs(D(g) - D(h)), L * dist + 1e-12) << to_string(kind);
    }
  }
}

TEST(Property, SupSubadditiveInfSuperadditive) {
  std::mt19937_64 rng(3);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 25)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, true);
    const auto g = random_function(d, rng, false);
    const auto h = random_function(d, rng, false);
    const DirectionalDerivative sup(FunctionalKind::sup, f, 0.1);
    const DirectionalDerivative inf(FunctionalKind::inf, f, 0.1);
    EXPECT_LE(sup(g + h), sup(g) + sup(h) + 1e-12);
    EXPECT_GE(inf(g + h), inf(g) + inf(h) - 1e-12);
  }
}

TEST(Property, AmplitudeSplitsAndConstantsShift) {
  std::mt19937_64 rng(4);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 25)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, true);
    const auto g = random_function(d, rng, false);
    const double eps = 0.05 * (trial % 5);
    const double s = directional_derivative(FunctionalKind::sup, f, g, eps);
    const double i = directional_derivative(FunctionalKind::inf, f, g, eps);
    EXPECT_NEAR(directional_derivative(FunctionalKind::amplitude, f, g, eps), s - i, 1e-12);
    const auto shifted = g + GridFunction::constant(d, 0.7);
    EXPECT_NEAR(directional_derivative(FunctionalKind::sup, f, shifted, eps), s + 0.7, 1e-12);
    EXPECT_NEAR(directional_derivative(FunctionalKind::amplitude, f, shifted, eps), s - i, 1e-12);
  }
}

TEST(Property, SupDerivativeMonotoneInEpsilon) {
  std::mt19937_64 rng(5);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 25)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, false);
    const auto g = random_function(d, rng, false);
    double prev = -INFINITY;
    for (double eps : {0.0, 0.1, 0.5, 1.0, 10.0}) {
      const double v = directional_derivative(FunctionalKind::sup_norm, f, g, eps);
      EXPECT_GE(v, prev);
      prev = v;
    }
    double everywhere = -INFINITY;
    for (std::size_t i = 0; i < g.size(); ++i) everywhere = std::max(everywhere, (f[i] >= 0 ? 1.0 : -1.0) * g[i]);
    EXPECT_DOUBLE_EQ(prev, everywhere);
  }
}

TEST(Property, QuotientBracketsDerivativeForSup) {
  std::mt19937_64 rng(6);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 20)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, trial % 2 == 0);
    const auto g = random_function(d, rng, false);
    const double D = directional_derivative(FunctionalKind::sup, f, g, 0.0);
    EXPECT_GE(difference_quotient(FunctionalKind::sup, f, g, 0.5), D - 1e-9);
  }
}

TEST(Property, EcdfIsAStepDistribution) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1 + trial);
    for (auto& v : x) v = std::round(4.0 * z(rng)) / 4.0;
    const auto F = ecdf(Sample::univariate(x));
    const auto v = F.values();
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GE(v[i], v[i - 1]);
    EXPECT_DOUBLE_EQ(v.back(), 1.0);
    EXPECT_GE(v.front(), 0.0);
  }
}

TEST(Property, KsStatisticsBoundedAndOrdered) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u;
  const auto G = UnivariateCdf::uniform();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(5 + trial % 40);
    for (auto& v : x) v = u(rng);
    const auto s = Sample::univariate(x);
    const auto e = one_sample_extremes(s, G);
    EXPECT_GE(e.sup, -1e-15);
    EXPECT_LE(e.inf, 1e-15);
    EXPECT_LE(e.sup, 1.0);
    EXPECT_GE(e.inf, -1.0);
    EXPECT_NEAR(assemble(FunctionalKind::amplitude, e), e.sup - e.inf, 1e-15);
    EXPECT_NEAR(assemble(FunctionalKind::sup_norm, e), std::max(e.sup, -e.inf), 1e-15);
  }
}

TEST(Property, TwoSampleAntisymmetric) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(3 + trial % 17), y(2 + trial % 11);
    for (auto& v : x) v = std::round(3.0 * z(rng));
    for (auto& v : y) v = std::round(3.0 * z(rng));
    const auto a = two_sample_extremes(Sample::univariate(x), Sample::univariate(y));
    const auto b = two_sample_extremes(Sample::univariate(y), Sample::univariate(x));
    EXPECT_NEAR(a.sup, -b.inf, 1e-15);
    EXPECT_NEAR(a.inf, -b.sup, 1e-15);
  }
}

TEST(Property, SurvivalCopulaIsAnInvolution) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> data(2 * (5 + trial));
    for (auto& v : data) v = u(rng);
    const Sample s(2, data);
    const auto C = empirical_copula(s, rank_lattice(s.size(), 2));
    const auto back = survival_copula(survival_copula(C));
    EXPECT_LE((back - C).sup_norm(), 1e-12);
    EXPECT_GE(copula_symmetry_distance(s), 0.0);
  }
}

TEST(Property, BernoulliDivergenceNonNegative) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = u(rng), y = u(rng);
    EXPECT_GE(kl_bernoulli(x, y), 0.0);
    EXPECT_NEAR(kl_bernoulli(x, x), 0.0, 1e-15);
  }
}

TEST(Property, FunctionalsLipschitz) {
  std::mt19937_64 rng(12);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 30)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, false);
    const auto g = random_function(d, rng, false);
    const double dist = (f - g).sup_norm();
    for (auto kind : kKinds) {
      const double L = kind == FunctionalKind::amplitude ? 2.0 : 1.0;
      EXPECT_LE(std::abs(evaluate(kind, f) - evaluate(kind, g)), L * dist + 1e-12) << to_string(kind);
    }
  }
}

TEST(Property, SupInfDuality) {
  std::mt19937_64 rng(13);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 25)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, true);
    const auto g = random_function(d, rng, false);
    const double eps = 0.1 * (trial % 4);
    EXPECT_DOUBLE_EQ(directional_derivative(FunctionalKind::inf, f, g, eps),
                     -directional_derivative(FunctionalKind::sup, -f, -g, eps));
  }
}

TEST(Property, InfDerivativeNonIncreasingInEpsilon) {
  std::mt19937_64 rng(14);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 25)));
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto f = random_function(d, rng, false);
    const auto g = random_function(d, rng, false);
    double prev = INFINITY;
    for (double eps : {0.0, 0.1, 0.5, 1.0, 10.0}) {
      const double v = directional_derivative(FunctionalKind::inf, f, g, eps);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(Property, LimsupBoundAlongPerturbedSequence) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto d = share(GridDomain::line(GridDomain::linspace(0.0, 1.0, 50)));
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_function(d, rng, trial % 2 == 0);
    const auto g = random_function(d, rng, false);
    const double bound = directional_derivative(FunctionalKind::sup, f, g, 0.0);
    const double gap = [&] {
      const auto v = f.values();
      const double top = *std::max_element(v.begin(), v.end());
      double second = -INFINITY;
      for (double x : v)
        if (x < top) second = std::max(second, x);
      return top - second;
    }();
    for (int k = 1; k <= 12; ++k) {
      const double t = std::pow(2.0, -k);
      std::vector<double> noise(f.size());
      for (auto& x : noise) x = t * t * u(rng);
      const auto fn = f + GridFunction(d, noise);
      const double quotient = (evaluate(FunctionalKind::sup, fn.axpy(t, g)) - evaluate(FunctionalKind::sup, fn)) / t;
      if (t * (2.0 * g.sup_norm() + 2.0 * t) < gap) EXPECT_LE(quotient, bound + 2.0 * t + 1e-8) << k;
    }
  }
}
