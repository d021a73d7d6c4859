#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "supdiff/distributions.hpp"
#include "supdiff/grid.hpp"
#include "supdiff/random.hpp"

namespace supdiff {

enum class CovarianceKind { bridge, sheet, copula_limit, weighted_bridge, mixture, finite_class };

/// Lower-triangular factor of a PSD matrix from diagonal-pivoted Cholesky,
/// truncated once the largest remaining pivot drops below
/// `relative_tolerance` times the first pivot. Row i of `factor` belongs to
/// row i of the input; columns beyond the retained rank are dropped.
struct PivotedCholesky {
  Eigen::MatrixXd factor;
  std::size_t rank = 0;
  /// ||S - L L^T||_F / ||S||_F (0 for the zero matrix).
  double residual = 0.0;
};

/// Throws ValidationError when S is not square, not symmetric, or not PSD
/// within the residual tolerance.
PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& S, double relative_tolerance = 1e-12,
                                 double residual_tolerance = 1e-8);

/// Seeded zero-mean Gaussian process on a grid. Immutable; `sample` is a pure
/// function of (seed, stream, index) and may be called concurrently.
class PathSampler {
 public:
  struct Impl;

  CovarianceKind kind() const noexcept;
  const DomainPtr& domain() const noexcept;
  std::uint64_t seed() const noexcept;
  Stream stream() const noexcept;
  /// Whether paths carry a left-limit channel.
  bool cadlag() const noexcept;

  /// Index points of the process: every node, plus left channels if cadlag.
  std::vector<GridPoint> points() const;
  double covariance(GridPoint a, GridPoint b) const;
  /// Covariance over `points()`, in that order.
  Eigen::MatrixXd covariance_matrix() const;

  /// Retained rank for factored samplers; grid size otherwise.
  std::size_t rank() const noexcept;

  GridFunction sample(std::uint64_t index) const;

  explicit PathSampler(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const noexcept { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Which construction a sheet sampler uses. `cell_mass` sums independent
/// Gaussian cell masses in O(N) per path; `dense` factors the full covariance.
enum class SheetMethod { cell_mass, dense };

/// B_F(x) on a one-dimensional grid: a standard Brownian bridge read at the
/// times F(x) (and F(x-) where F jumps at a node).
PathSampler bridge_sampler(const UnivariateCdf& F, DomainPtr grid, std::uint64_t seed,
                           Stream stream = Stream::limit);
/// Tied-down sheet with covariance F(x ^ y) - F(x) F(y) on a lattice.
PathSampler bridge_sampler(const JointCdf& F, DomainPtr lattice, std::uint64_t seed,
                           Stream stream = Stream::limit, SheetMethod method = SheetMethod::cell_mass);
PathSampler bridge_sampler(const Copula& C, DomainPtr lattice, std::uint64_t seed,
                           Stream stream = Stream::limit, SheetMethod method = SheetMethod::cell_mass);
/// Sheet for an arbitrary distribution function on the lattice (values at
/// lattice nodes; zero below, one above the lattice is not assumed).
PathSampler bridge_sampler(std::function<double(std::span<const double>)> F, DomainPtr lattice,
                           std::uint64_t seed, Stream stream = Stream::limit,
                           SheetMethod method = SheetMethod::cell_mass);

/// B_C(u) - sum_i d_i C(u) B_C(1, ..., u_i, ..., 1) from one sheet path. The
/// lattice must contain 1 on every axis; `partials` holds d_i C on the lattice.
PathSampler copula_limit_sampler(const Copula& C, DomainPtr lattice, std::vector<GridFunction> partials,
                                 std::uint64_t seed, Stream stream = Stream::limit,
                                 SheetMethod method = SheetMethod::cell_mass);

struct WeightTruncation {
  double min_variance = 1e-6;
  double max_weight = 50.0;
};

/// w(x) = log(F (1 - G) / (G (1 - F))).
double log_odds_weight(double F, double G);

/// B_F(x) w(x); nodes outside the truncation window are held at 0.
PathSampler weighted_bridge_sampler(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid,
                                    std::uint64_t seed, WeightTruncation truncation = {},
                                    Stream stream = Stream::limit);
/// Nodes kept by the truncation rule.
std::vector<bool> weighted_bridge_support(const UnivariateCdf& F, const UnivariateCdf& G, const GridDomain& grid,
                                          WeightTruncation truncation = {});

/// sqrt(1 - lambda) a - sqrt(lambda) b with a and b drawn independently.
PathSampler mixture_sampler(double lambda, PathSampler a, PathSampler b);

/// K-variate N(0, S) on the index set {0, ..., K-1}.
PathSampler finite_class_sampler(const Eigen::MatrixXd& S, std::uint64_t seed, Stream stream = Stream::limit);

inline GridFunction sample_path(const PathSampler& sampler, std::uint64_t index) { return sampler.sample(index); }

}  // namespace supdiff
