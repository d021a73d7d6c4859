#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "supdiff/distributions.hpp"
#include "supdiff/functionals.hpp"
#include "supdiff/grid.hpp"

namespace supdiff {

/// A normalized statistic r_n (raw - reference).
struct StatResult {
  double raw = 0.0;
  double centered = 0.0;
  double scale = 1.0;
  double reference = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string kind;
};

StatResult make_result(double raw, double reference, double scale, std::size_t n, std::size_t m, std::string kind);

/// sqrt(n m / (n + m)).
double two_sample_scale(std::size_t n, std::size_t m);

/// Supremum and infimum of a function over the whole space.
struct Extremes {
  double sup = 0.0;
  double inf = 0.0;
};

/// delta = max(sup, -inf), sigma = sup, alpha = sup - inf. iota is rejected.
double assemble(FunctionalKind kind, Extremes e);

/// Exact sup and inf over the real line of F_n - G. The scan covers both
/// channels at the sample points, the atoms of G, and any extra points where
/// G is declared to jump.
Extremes one_sample_extremes(const Sample& s, const UnivariateCdf& G, std::span<const double> extra_jumps = {});
/// sup and inf of F_n - G over a lattice built from the sample coordinates
/// (plus `refinement` points per axis). The sup is exact; the inf is exact
/// for continuous G.
Extremes one_sample_extremes(const Sample& s, const JointCdf& G,
                             const std::vector<std::vector<double>>& refinement = {});
/// Exact sup and inf of F_n - G_m.
Extremes two_sample_extremes(const Sample& sx, const Sample& sy);

StatResult ks_one_sample(const Sample& s, const UnivariateCdf& G, FunctionalKind kind, double reference,
                         std::span<const double> extra_jumps = {});
StatResult ks_one_sample(const Sample& s, const JointCdf& G, FunctionalKind kind, double reference,
                         const std::vector<std::vector<double>>& refinement = {});
StatResult ks_two_sample(const Sample& sx, const Sample& sy, FunctionalKind kind, double reference);

/// ||C_n - D||_inf over the unit cube for a continuous copula D. C_n is
/// constant on rank cells, so each cell contributes its value against D at
/// the lower and upper corners.
double copula_distance(const Sample& s, const std::function<double(std::span<const double>)>& D);
/// Nodewise max |C_n - D| over the rank lattice for D tabulated there.
double copula_distance(const Sample& s, const GridFunction& D_on_rank_lattice);

StatResult copula_stat_Tn(const Sample& s, const Copula& D, double reference);
/// ||C_n - survival(C_n)||_inf on the rank lattice.
double copula_symmetry_distance(const Sample& s);
StatResult copula_symmetry_stat(const Sample& s, double reference);

/// max |C - C_bar| for a bivariate copula on an equally spaced grid of
/// `points` per axis.
double copula_asymmetry(const Copula& C, std::size_t points = 400);

/// Bernoulli Kullback-Leibler divergence K(x, y), y in (0, 1).
double kl_bernoulli(double x, double y);

/// K(x, y) extended to y in {0, 1}: 0 when x = y, +inf otherwise.
double kl_bernoulli_extended(double x, double y);

/// R(F_n, G) = sup_x K(F_n(x), G(x)) by endpoint scan.
double berk_jones_R(const Sample& s, const UnivariateCdf& G);
/// log log n + sign * 0.5 log log log n - 0.5 log(4 pi). n >= 16.
double berk_jones_dn(std::size_t n, double loglog_sign = -1.0);
/// n R(F_n, F) - d_n.
double berk_jones_null_centered(const Sample& s, const UnivariateCdf& F, double loglog_sign = -1.0);
StatResult berk_jones_Bn(const Sample& s, const UnivariateCdf& G, double reference);
struct Maximizer {
  double x = 0.0;
  double value = 0.0;
};
/// Maximizer of K(F(x), G(x)) over `points` F-quantiles (u_i = (i + 1/2) /
/// points), refined by a bracketed 1-D search around the best grid point.
Maximizer berk_jones_maximizer(const UnivariateCdf& F, const UnivariateCdf& G, std::size_t points = 100000);
/// sup_x K(F(x), G(x)).
double berk_jones_reference(const UnivariateCdf& F, const UnivariateCdf& G, std::size_t points = 100000);

/// Finite class of bounded functions on the real line.
class FiniteFunctionClass {
 public:
  enum class Shape { indicator, ramp };
  /// indicator: 1{x <= a}. ramp: 0 below a, 1 above b, linear between;
  /// decreasing flips it to 1 - ramp.
  struct Member {
    Shape shape = Shape::indicator;
    double a = 0.0;
    double b = 0.0;
    bool decreasing = false;
    bool operator==(const Member&) const = default;
  };

  FiniteFunctionClass(std::vector<Member> members, bool symmetric);
  static FiniteFunctionClass indicators(std::vector<double> thresholds, bool symmetric = true);

  std::size_t size() const noexcept { return members_.size(); }
  bool symmetric() const noexcept { return symmetric_; }
  const std::vector<Member>& members() const noexcept { return members_; }

  double evaluate(std::size_t k, double x) const;
  /// n x K matrix of f_k(X_i).
  Eigen::MatrixXd evaluate(const Sample& s) const;

  /// E_P f_k for every member.
  Eigen::VectorXd means(const UnivariateCdf& P) const;
  /// Cov_P(f_j, f_k).
  Eigen::MatrixXd covariance(const UnivariateCdf& P) const;
  /// max_k (E_P f_k - E_Q f_k), or max |.| when symmetric.
  double population_mmd(const UnivariateCdf& P, const UnivariateCdf& Q) const;

  bool operator==(const FiniteFunctionClass&) const = default;

 private:
  std::vector<Member> members_;
  bool symmetric_;
};

struct MmdResult {
  double value = 0.0;
  std::vector<double> gaps;
  std::size_t argmax = 0;
};

MmdResult mmd_finite(const Eigen::MatrixXd& evals_x, const Eigen::MatrixXd& evals_y, bool symmetric);
StatResult mmd_statistic(const Sample& sx, const Sample& sy, const FiniteFunctionClass& cls, double reference);

struct Kernel {
  enum class Type { gaussian, laplace };
  Type type = Type::gaussian;
  /// Bandwidth (gaussian) or scale (laplace).
  double parameter = 1.0;
};

double kernel_mmd(const Sample& sx, const Sample& sy, Kernel kernel);

}  // namespace supdiff
