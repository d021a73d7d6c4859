#include "supdiff/limits.hpp"

#include <cmath>
#include <stdexcept>

#include "supdiff/empirical.hpp"
#include "supdiff/error.hpp"
#include "supdiff/parallel.hpp"
#include "supdiff/statistics.hpp"

namespace supdiff {

void validate(const LimitSpec& spec) {
  require(*spec.q.domain() == *spec.sampler.domain(), "q and the sampler must share a grid");
  require(spec.epsilon >= 0.0 && std::isfinite(spec.epsilon), "epsilon must be non-negative");
  if (spec.kind == FunctionalKind::sup_norm) {
    require(spec.q.sup_norm() > 0.0, "sup-norm limit is undefined at q = 0");
  }
  if (spec.transform == PathTransform::reflection_difference) {
    require(reflection_closed(*spec.q.domain()), "reflection transform needs a reflection-closed lattice");
  }
}

GridFunction apply_transform(PathTransform transform, const GridFunction& g) {
  if (transform == PathTransform::identity) return g;
  const auto& lattice = *g.domain();
  std::vector<double> out(g.size());
  for (std::size_t node = 0; node < out.size(); ++node) out[node] = g[node] - g[reflected_node(lattice, node)];
  return {g.domain(), std::move(out)};
}

double transformed_covariance(const LimitSpec& spec, GridPoint a, GridPoint b) {
  const auto& S = spec.sampler;
  if (spec.transform == PathTransform::identity) return S.covariance(a, b);
  const auto& lattice = *S.domain();
  const GridPoint ra{reflected_node(lattice, a.node)};
  const GridPoint rb{reflected_node(lattice, b.node)};
  return S.covariance(a, b) - S.covariance(a, rb) - S.covariance(ra, b) + S.covariance(ra, rb);
}

std::optional<GaussianShortcut> gaussian_shortcut(const LimitSpec& spec) {
  validate(spec);
  // A continuous q with a jumping path reads two channels per node, which is
  // not a single Gaussian coordinate.
  if (!spec.q.cadlag() && spec.sampler.cadlag()) return std::nullopt;
  const auto witness = full_differentiability_witness(spec.kind, spec.q, spec.epsilon);
  if (!witness) return std::nullopt;
  auto cov = [&](GridPoint a, GridPoint b) { return transformed_covariance(spec, a, b); };
  double variance = 0.0;
  switch (spec.kind) {
    case FunctionalKind::sup_norm:
    case FunctionalKind::sup:
      variance = cov(*witness->argmax, *witness->argmax);
      break;
    case FunctionalKind::inf:
      variance = cov(*witness->argmin, *witness->argmin);
      break;
    case FunctionalKind::amplitude:
      variance = cov(*witness->argmax, *witness->argmax) + cov(*witness->argmin, *witness->argmin) -
                 2.0 * cov(*witness->argmax, *witness->argmin);
      break;
  }
  return GaussianShortcut{.variance = std::max(variance, 0.0), .witness = *witness};
}

double estimated_q_tolerance(std::size_t n, double c) {
  require(n >= 3, "estimated_q_tolerance needs n >= 3");
  require(c >= 0.0, "estimated_q_tolerance needs c >= 0");
  const double nd = static_cast<double>(n);
  return c * std::sqrt(2.0 * std::log(std::log(nd)) / nd);
}

LimitReplicates simulate_limit(const LimitSpec& spec, std::size_t n_paths, SimulationOptions options) {
  validate(spec);
  const DirectionalDerivative derivative(spec.kind, spec.q, spec.epsilon);
  LimitReplicates out;
  out.epsilon = spec.epsilon;
  out.values.assign(n_paths, 0.0);
  parallel_for(n_paths, options.threads, [&](std::size_t i) {
    const auto path = apply_transform(spec.transform, spec.sampler.sample(options.first_index + i));
    const double v = derivative(path);
    if (!std::isfinite(v)) throw std::runtime_error("limit replicate is not finite");
    out.values[i] = v;
  });
  if (const auto shortcut = gaussian_shortcut(spec)) {
    out.shortcut_variance = shortcut->variance;
    out.witness = shortcut->witness;
  }
  return out;
}

namespace {

GridFunction difference_on(const UnivariateCdf& F, const UnivariateCdf& G, const DomainPtr& grid) {
  require(grid != nullptr && grid->dimension() == 1, "univariate limit needs a one-dimensional grid");
  const auto& x = grid->axis(0);
  std::vector<double> value(x.size()), left(x.size());
  bool jumps = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    value[i] = F.cdf(x[i]) - G.cdf(x[i]);
    left[i] = F.left_limit(x[i]) - G.left_limit(x[i]);
    if (left[i] != value[i]) jumps = true;
  }
  if (jumps) return {grid, std::move(value), std::move(left)};
  return {grid, std::move(value)};
}

}  // namespace

LimitSpec ks_one_sample_limit(const UnivariateCdf& F, const UnivariateCdf& G, FunctionalKind kind, DomainPtr grid,
                              std::uint64_t seed, double epsilon) {
  require(kind != FunctionalKind::inf, "iota is not a Kolmogorov-Smirnov type statistic");
  return LimitSpec{.kind = kind,
                   .q = difference_on(F, G, grid),
                   .sampler = bridge_sampler(F, grid, seed, Stream::limit),
                   .epsilon = epsilon};
}

LimitSpec ks_two_sample_limit(const UnivariateCdf& F, const UnivariateCdf& G, double lambda, FunctionalKind kind,
                              DomainPtr grid, std::uint64_t seed, double epsilon) {
  require(kind != FunctionalKind::inf, "iota is not a Kolmogorov-Smirnov type statistic");
  auto sampler = mixture_sampler(lambda, bridge_sampler(F, grid, seed, Stream::limit),
                                 bridge_sampler(G, grid, seed, Stream::limit_secondary));
  return LimitSpec{.kind = kind, .q = difference_on(F, G, grid), .sampler = std::move(sampler), .epsilon = epsilon};
}

GridFunction berk_jones_q(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid) {
  require(grid != nullptr && grid->dimension() == 1, "Berk-Jones limit needs a one-dimensional grid");
  const auto& x = grid->axis(0);
  std::vector<double> q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    q[i] = kl_bernoulli_extended(F.cdf(x[i]), G.cdf(x[i]));
    require(std::isfinite(q[i]), "K(F, G) is not finite on the grid");
  }
  return {std::move(grid), std::move(q)};
}

LimitSpec bj_limit_spec(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid, std::uint64_t seed,
                        double epsilon, WeightTruncation truncation) {
  auto q = berk_jones_q(F, G, grid);
  require(q.sup_norm() > 0.0, "Berk-Jones limit needs F != G");
  const auto keep = weighted_bridge_support(F, G, *grid, truncation);
  for (std::size_t node : superlevel_set(q, epsilon).nodes()) {
    require(keep[node], "log-odds weight is truncated on the argmax region");
  }
  return LimitSpec{.kind = FunctionalKind::sup,
                   .q = std::move(q),
                   .sampler = weighted_bridge_sampler(F, G, grid, seed, truncation, Stream::limit),
                   .epsilon = epsilon};
}

LimitReplicates bj_limit(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid, std::size_t n_paths,
                         double epsilon, std::uint64_t seed, SimulationOptions options) {
  return simulate_limit(bj_limit_spec(F, G, std::move(grid), seed, epsilon), n_paths, options);
}

LimitSpec copula_Tn_limit_spec(const Copula& C, const Copula& D, DomainPtr lattice, std::uint64_t seed,
                               double epsilon) {
  require(C.dimension() == 2 && D.dimension() == 2, "copula limit is simulated for bivariate copulas");
  auto q = GridFunction::tabulate(lattice, [&](std::span<const double> u) { return C(u) - D(u); });
  require(q.sup_norm() > 0.0, "copula limit needs C != D on the lattice");
  auto [d1, d2] = copula_partials(C, lattice, kAnalyticPartialStep);
  auto sampler = copula_limit_sampler(C, lattice, {std::move(d1), std::move(d2)}, seed, Stream::limit);
  return LimitSpec{.kind = FunctionalKind::sup_norm, .q = std::move(q), .sampler = std::move(sampler), .epsilon = epsilon};
}

LimitReplicates copula_limit_Tn(const Copula& C, const Copula& D, DomainPtr lattice, std::size_t n_paths,
                                double epsilon, std::uint64_t seed, SimulationOptions options) {
  return simulate_limit(copula_Tn_limit_spec(C, D, std::move(lattice), seed, epsilon), n_paths, options);
}

LimitSpec copula_symmetry_limit_spec(const Copula& C, DomainPtr lattice, std::uint64_t seed, double epsilon) {
  require(C.dimension() == 2, "radial symmetry limit needs a bivariate copula");
  require(reflection_closed(*lattice), "lattice must be closed under u -> 1 - u");
  auto q = GridFunction::tabulate(lattice, [&](std::span<const double> u) {
    return C(u[0], u[1]) - (u[0] + u[1] - 1.0 + C(1.0 - u[0], 1.0 - u[1]));
  });
  require(q.sup_norm() > 1e-12, "copula is radially symmetric on the lattice");
  auto [d1, d2] = copula_partials(C, lattice, kAnalyticPartialStep);
  auto sampler = copula_limit_sampler(C, lattice, {std::move(d1), std::move(d2)}, seed, Stream::limit);
  return LimitSpec{.kind = FunctionalKind::sup_norm,
                   .q = std::move(q),
                   .sampler = std::move(sampler),
                   .epsilon = epsilon,
                   .transform = PathTransform::reflection_difference};
}

LimitReplicates copula_symmetry_limit(const Copula& C, DomainPtr lattice, std::size_t n_paths, double epsilon,
                                      std::uint64_t seed, SimulationOptions options) {
  return simulate_limit(copula_symmetry_limit_spec(C, std::move(lattice), seed, epsilon), n_paths, options);
}

LimitSpec mmd_limit_spec(const Eigen::VectorXd& gaps, const Eigen::MatrixXd& sigma_p, const Eigen::MatrixXd& sigma_q,
                         double lambda, double tolerance, std::uint64_t seed, bool symmetric) {
  require(gaps.size() >= 1, "function class must be non-empty");
  require(gaps.allFinite(), "mean gaps must be finite");
  require(sigma_p.rows() == gaps.size() && sigma_q.rows() == gaps.size(), "covariances must be K x K");
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  require(tolerance >= 0.0, "tolerance must be non-negative");
  const auto K = static_cast<std::size_t>(gaps.size());
  auto domain = share(GridDomain::index_set(K));
  GridFunction q(domain, std::vector<double>(gaps.data(), gaps.data() + gaps.size()));
  auto sampler = finite_class_sampler((1.0 - lambda) * sigma_p + lambda * sigma_q, seed, Stream::limit);
  return LimitSpec{.kind = symmetric ? FunctionalKind::sup_norm : FunctionalKind::sup,
                   .q = std::move(q),
                   .sampler = std::move(sampler),
                   .epsilon = tolerance};
}

LimitReplicates mmd_limit(const Eigen::VectorXd& gaps, const Eigen::MatrixXd& sigma_p, const Eigen::MatrixXd& sigma_q,
                          double lambda, std::size_t n_paths, double tolerance, std::uint64_t seed, bool symmetric,
                          SimulationOptions options) {
  return simulate_limit(mmd_limit_spec(gaps, sigma_p, sigma_q, lambda, tolerance, seed, symmetric), n_paths, options);
}

double compare_distributions(const std::vector<double>& a, const std::vector<double>& b) {
  require(!a.empty() && !b.empty(), "replicate arrays must be non-empty");
  const auto e = two_sample_extremes(Sample::univariate(a), Sample::univariate(b));
  return std::max(e.sup, -e.inf);
}

}  // namespace supdiff
