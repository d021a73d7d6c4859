#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "supdiff/distributions.hpp"
#include "supdiff/functionals.hpp"
#include "supdiff/grid.hpp"
#include "supdiff/samplers.hpp"

namespace supdiff {

/// Linear map applied to each sampled path before differentiation.
enum class PathTransform {
  identity,
  /// g(u) - g(1 - u) on a reflection-closed lattice.
  reflection_difference,
};

struct LimitSpec {
  FunctionalKind kind = FunctionalKind::sup_norm;
  GridFunction q;
  PathSampler sampler;
  double epsilon = 0.0;
  PathTransform transform = PathTransform::identity;
};

struct LimitReplicates {
  std::vector<double> values;
  double epsilon = 0.0;
  /// Set when the derivative is linear at q (unique extremal cluster).
  std::optional<double> shortcut_variance;
  std::optional<DifferentiabilityWitness> witness;
};

struct SimulationOptions {
  std::size_t threads = 0;
  /// Replicate indices are first_index, ..., first_index + n_paths - 1.
  std::uint64_t first_index = 0;
};

/// Throws ValidationError if q and the sampler disagree on the grid, epsilon
/// is negative, or the transform does not fit the grid.
void validate(const LimitSpec& spec);

/// Covariance of the transformed path at two grid points.
double transformed_covariance(const LimitSpec& spec, GridPoint a, GridPoint b);
GridFunction apply_transform(PathTransform transform, const GridFunction& g);

/// Extremal-set tolerance for an estimated q from samples of size n:
/// c * sqrt(2 log log n) / sqrt(n). Requires n >= 3.
double estimated_q_tolerance(std::size_t n, double c = 1.0);

LimitReplicates simulate_limit(const LimitSpec& spec, std::size_t n_paths, SimulationOptions options = {});

struct GaussianShortcut {
  double variance = 0.0;
  DifferentiabilityWitness witness;
};

std::optional<GaussianShortcut> gaussian_shortcut(const LimitSpec& spec);

/// sqrt(n)(phi(F_n - G) - phi(F - G)) limit: phi'_{F-G}(B_F).
LimitSpec ks_one_sample_limit(const UnivariateCdf& F, const UnivariateCdf& G, FunctionalKind kind, DomainPtr grid,
                              std::uint64_t seed, double epsilon = 0.0);
/// Two-sample limit with lambda = n / (n + m): phi'_{F-G}(sqrt(1-lambda) B_F - sqrt(lambda) B_G).
LimitSpec ks_two_sample_limit(const UnivariateCdf& F, const UnivariateCdf& G, double lambda, FunctionalKind kind,
                              DomainPtr grid, std::uint64_t seed, double epsilon = 0.0);

/// K(F(x), G(x)) on the nodes of a line.
GridFunction berk_jones_q(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid);
LimitSpec bj_limit_spec(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid, std::uint64_t seed,
                        double epsilon = 0.0, WeightTruncation truncation = {});
LimitReplicates bj_limit(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid, std::size_t n_paths,
                         double epsilon, std::uint64_t seed, SimulationOptions options = {});

/// Step used for the partial derivatives of a known copula.
inline constexpr double kAnalyticPartialStep = 1e-5;

LimitSpec copula_Tn_limit_spec(const Copula& C, const Copula& D, DomainPtr lattice, std::uint64_t seed,
                               double epsilon = 0.0);
LimitReplicates copula_limit_Tn(const Copula& C, const Copula& D, DomainPtr lattice, std::size_t n_paths,
                                double epsilon, std::uint64_t seed, SimulationOptions options = {});

LimitSpec copula_symmetry_limit_spec(const Copula& C, DomainPtr lattice, std::uint64_t seed, double epsilon = 0.0);
LimitReplicates copula_symmetry_limit(const Copula& C, DomainPtr lattice, std::size_t n_paths, double epsilon,
                                      std::uint64_t seed, SimulationOptions options = {});

/// Limit of the finite-class MMD statistic. Symmetric classes use the
/// sup-norm derivative, others the sup derivative.
LimitSpec mmd_limit_spec(const Eigen::VectorXd& gaps, const Eigen::MatrixXd& sigma_p, const Eigen::MatrixXd& sigma_q,
                         double lambda, double tolerance, std::uint64_t seed, bool symmetric = false);
LimitReplicates mmd_limit(const Eigen::VectorXd& gaps, const Eigen::MatrixXd& sigma_p, const Eigen::MatrixXd& sigma_q,
                          double lambda, std::size_t n_paths, double tolerance, std::uint64_t seed,
                          bool symmetric = false, SimulationOptions options = {});

/// Two-sample Kolmogorov distance between two replicate arrays.
double compare_distributions(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace supdiff
