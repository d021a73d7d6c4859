#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "supdiff/empirical.hpp"
#include "supdiff/error.hpp"

using namespace supdiff;

namespace {

std::size_t node_of(const GridDomain& d, double x) {
  const auto& a = d.axis(0);
  return static_cast<std::size_t>(std::find(a.begin(), a.end(), x) - a.begin());
}

}  // namespace

TEST(Ecdf, SinglePointMass) {
  const auto F = ecdf(Sample::univariate({0.5}));
  const std::size_t k = node_of(*F.domain(), 0.5);
  EXPECT_EQ(F.at({k, Channel::value}), 1.0);
  EXPECT_EQ(F.at({k, Channel::left_limit}), 0.0);
}

TEST(Ecdf, Counting) {
  const Sample s = Sample::univariate({0.1, 0.5, 0.9});
  const double x = 0.5;
  EXPECT_DOUBLE_EQ(ecdf_at(s, std::span<const double>(&x, 1)), 2.0 / 3.0);
  const auto F = ecdf(s);
  EXPECT_DOUBLE_EQ(F[node_of(*F.domain(), 0.5)], 2.0 / 3.0);
}

TEST(Ecdf, Bivariate) {
  const Sample s(2, {0.0, 0.0, 1.0, 1.0});
  const std::vector<double> x{0.5, 0.5};
  EXPECT_DOUBLE_EQ(ecdf_at(s, x), 0.5);
}

TEST(Ecdf, RejectsEmpty) { EXPECT_THROW(Sample::univariate({}), ValidationError); }

TEST(Ecdf, ValidCdfWithTies) {
  const auto F = ecdf(Sample::univariate({3.0, 1.0, 3.0, 2.0}));
  EXPECT_EQ(F[0], 0.0);
  EXPECT_EQ(F[F.size() - 1], 1.0);
  for (std::size_t i = 1; i < F.size(); ++i) EXPECT_LE(F[i - 1], F[i]);
  // Jump of 2/4 at the tied point.
  const std::size_t k = node_of(*F.domain(), 3.0);
  EXPECT_DOUBLE_EQ(F.at({k, Channel::value}) - F.at({k, Channel::left_limit}), 0.5);
}

TEST(EmpiricalProcess, SinglePoint) {
  const auto grid = share(GridDomain::compactified_line({0.25, 0.5, 0.75}));
  const auto G = empirical_process(Sample::univariate({0.5}), UnivariateCdf::uniform(), grid);
  EXPECT_DOUBLE_EQ(G.at({2, Channel::value}), 0.5);
  EXPECT_DOUBLE_EQ(G.at({2, Channel::left_limit}), -0.5);
}

TEST(EmpiricalCopula, ComonotoneAndCountermonotone) {
  const auto lattice = rank_lattice(2, 2);
  const auto co = empirical_copula(Sample(2, {1, 1, 2, 2}), lattice);
  const auto counter = empirical_copula(Sample(2, {1, 2, 2, 1}), lattice);
  const std::size_t mid = lattice->flatten(std::vector<std::size_t>{1, 1});
  EXPECT_DOUBLE_EQ(co[mid], 0.5);
  EXPECT_DOUBLE_EQ(counter[mid], 0.0);
  EXPECT_DOUBLE_EQ(co[lattice->size() - 1], 1.0);
}

TEST(EmpiricalCopula, UniformDiscreteMarginals) {
  auto e = stream_engine(3, Stream::oracle, 0);
  const auto s = draw_sample(Copula::clayton(2.0), 37, e);
  const auto lattice = rank_lattice(37, 2);
  const auto C = empirical_copula(s, lattice);
  for (std::size_t i = 0; i <= 37; ++i) {
    EXPECT_NEAR(C[lattice->flatten(std::vector<std::size_t>{i, 37})], i / 37.0, 1e-15);
    EXPECT_NEAR(C[lattice->flatten(std::vector<std::size_t>{37, i})], i / 37.0, 1e-15);
  }
}

TEST(EmpiricalCopula, TiesUseGeneralizedInverse) {
  // Both first coordinates tie; each gets min rank 1, so both count at u = 1/2.
  const auto lattice = rank_lattice(2, 2);
  const auto C = empirical_copula(Sample(2, {5, 1, 5, 2}), lattice);
  EXPECT_DOUBLE_EQ(C[lattice->flatten(std::vector<std::size_t>{1, 2})], 1.0);
}

TEST(EmpiricalCopula, RejectsUnivariate) {
  EXPECT_THROW(empirical_copula(Sample::univariate({1.0}), rank_lattice(1, 1)), ValidationError);
}

TEST(SurvivalCopula, IndependenceAndComonotone) {
  const auto axis = GridDomain::linspace(0.0, 1.0, 21);
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto Pi = GridFunction::tabulate(lattice, [](std::span<const double> u) { return u[0] * u[1]; });
  const auto M = GridFunction::tabulate(lattice, [](std::span<const double> u) { return std::min(u[0], u[1]); });
  EXPECT_LT((survival_copula(Pi) - Pi).sup_norm(), 1e-15);
  EXPECT_LT((survival_copula(M) - M).sup_norm(), 1e-15);
  const auto Cb = survival_copula(Pi);
  for (std::size_t j = 0; j < 21; ++j) EXPECT_NEAR(Cb[lattice->flatten(std::vector<std::size_t>{20, j})], axis[j], 1e-15);
}

TEST(SurvivalCopula, InvolutionOnEmpiricalCopula) {
  auto e = stream_engine(4, Stream::oracle, 0);
  const auto s = draw_sample(Copula::clayton(1.0), 50, e);
  const auto C = empirical_copula(s, rank_lattice(50, 2));
  EXPECT_LT((survival_copula(survival_copula(C)) - C).sup_norm(), 1e-14);
}

TEST(SurvivalCopula, RejectsAsymmetricLattice) {
  const auto lattice = share(GridDomain::lattice({{0.0, 0.3, 1.0}, {0.0, 0.5, 1.0}}));
  EXPECT_THROW(survival_copula(GridFunction::constant(lattice, 0.0)), ValidationError);
}

TEST(Partials, IndependenceExact) {
  const auto axis = GridDomain::linspace(0.0, 1.0, 11);
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto [d1, d2] = copula_partials(Copula::independence(), lattice, 0.05);
  for (std::size_t node = 0; node < lattice->size(); ++node) {
    EXPECT_NEAR(d1[node], lattice->coordinate(node, 1), 1e-12);
    EXPECT_NEAR(d2[node], lattice->coordinate(node, 0), 1e-12);
  }
}

TEST(Partials, ComonotoneBelowDiagonal) {
  const auto axis = GridDomain::linspace(0.0, 1.0, 11);
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto [d1, d2] = copula_partials(Copula::comonotone(), lattice, 0.01);
  const std::size_t node = lattice->flatten(std::vector<std::size_t>{2, 7});
  EXPECT_DOUBLE_EQ(d1[node], 1.0);
  for (std::size_t k = 0; k < lattice->size(); ++k) {
    EXPECT_GE(d1[k], 0.0);
    EXPECT_LE(d1[k], 1.0);
  }
}

TEST(Partials, TabulatedMatchesAnalytic) {
  const auto axis = GridDomain::linspace(0.0, 1.0, 41);
  const auto lattice = share(GridDomain::lattice({axis, axis}));
  const auto C = Copula::clayton(1.0);
  const auto tab = GridFunction::tabulate(lattice, [&](std::span<const double> u) { return C(u); });
  const auto [a1, a2] = copula_partials(C, lattice, 0.025);
  const auto [t1, t2] = copula_partials(tab, 0.025);
  EXPECT_LT((a1 - t1).sup_norm(), 1e-12);
  EXPECT_LT((a2 - t2).sup_norm(), 1e-12);
}

TEST(Csv, HeaderOptional) {
  std::istringstream with("x,y\n1,2\n3,4\n");
  std::istringstream without("1,2\n3,4\n");
  const auto a = read_sample_csv(with);
  const auto b = read_sample_csv(without);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.dimension(), 2u);
  EXPECT_EQ(a(1, 1), b(1, 1));
}

TEST(Csv, RaggedRowsRejected) {
  std::istringstream in("1,2\n3\n");
  EXPECT_THROW(read_sample_csv(in), ValidationError);
}

TEST(GlivenkoCantelli, SupDistanceBound) {
  const auto F = UnivariateCdf::normal();
  const std::size_t n = 10000;
  const double bound = 3.0 * std::sqrt(std::log(static_cast<double>(n)) / n);
  int within = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    auto e = stream_engine(11, Stream::oracle, r);
    auto x = draw_sample(F, n, e).column(0);
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = F.cdf(x[i]);
      d = std::max({d, (i + 1.0) / n - g, g - static_cast<double>(i) / n});
    }
    within += d <= bound;
  }
  EXPECT_GE(within, 190);
}
