#include "supdiff/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "supdiff/error.hpp"

namespace supdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_value(const GridFunction& f) {
  double m = -kInf;
  for (double x : f.values()) m = std::max(m, x);
  if (f.cadlag()) {
    for (double x : f.left_limits()) m = std::max(m, x);
  }
  return m;
}

double min_value(const GridFunction& f) {
  double m = kInf;
  for (double x : f.values()) m = std::min(m, x);
  if (f.cadlag()) {
    for (double x : f.left_limits()) m = std::min(m, x);
  }
  return m;
}

void require_epsilon(double epsilon) {
  require(epsilon >= 0.0 && !std::isnan(epsilon), "epsilon must be non-negative");
}

// Union-find over the positions of a sorted point list, joining points whose
// nodes are grid-adjacent.
std::vector<std::vector<GridPoint>> cluster_points(const GridDomain& domain,
                                                   const std::vector<GridPoint>& points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  if (domain.dimension() == 1 && !domain.discrete()) {
    // Sorted by node, so adjacency only needs the previous point.
    for (std::size_t i = 1; i < n; ++i) {
      if (points[i].node - points[i - 1].node <= 1) unite(i, i - 1);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (domain.adjacent(points[i].node, points[j].node)) unite(i, j);
      }
    }
  }

  std::vector<std::vector<GridPoint>> clusters;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(points[i]);
  }
  return clusters;
}

ExtremalSet make_extremal_set(const GridFunction& f, LevelSet level, bool maximize) {
  ExtremalSet out;
  out.clusters = cluster_points(*f.domain(), level.points);
  out.level = std::move(level);
  for (const auto& cluster : out.clusters) {
    GridPoint best = cluster.front();
    for (const auto& p : cluster) {
      const double v = f.at(p);
      if (maximize ? v > f.at(best) : v < f.at(best)) best = p;
    }
    out.representatives.push_back(best);
  }
  return out;
}

}  // namespace

std::string_view to_string(FunctionalKind kind) noexcept {
  switch (kind) {
    case FunctionalKind::sup_norm:
      return "delta";
    case FunctionalKind::sup:
      return "sigma";
    case FunctionalKind::inf:
      return "iota";
    case FunctionalKind::amplitude:
      return "alpha";
  }
  return "?";
}

FunctionalKind parse_functional_kind(std::string_view name) {
  if (name == "delta" || name == "sup_norm") return FunctionalKind::sup_norm;
  if (name == "sigma" || name == "sup") return FunctionalKind::sup;
  if (name == "iota" || name == "inf") return FunctionalKind::inf;
  if (name == "alpha" || name == "amplitude") return FunctionalKind::amplitude;
  throw ValidationError("unknown functional kind '" + std::string(name) + "'");
}

double evaluate(FunctionalKind kind, const GridFunction& f) {
  switch (kind) {
    case FunctionalKind::sup_norm:
      return f.sup_norm();
    case FunctionalKind::sup:
      return max_value(f);
    case FunctionalKind::inf:
      return min_value(f);
    case FunctionalKind::amplitude:
      return max_value(f) - min_value(f);
  }
  return 0.0;
}

LevelSet superlevel_set(const GridFunction& f, double epsilon) {
  require_epsilon(epsilon);
  const double threshold = max_value(f) - epsilon;
  LevelSet out{.points = {}, .epsilon = epsilon};
  for (const auto& p : f.points()) {
    if (f.at(p) >= threshold) out.points.push_back(p);
  }
  return out;
}

LevelSet sublevel_set(const GridFunction& f, double epsilon) {
  require_epsilon(epsilon);
  const double threshold = min_value(f) + epsilon;
  LevelSet out{.points = {}, .epsilon = epsilon};
  for (const auto& p : f.points()) {
    if (f.at(p) <= threshold) out.points.push_back(p);
  }
  return out;
}

DirectionalDerivative::DirectionalDerivative(FunctionalKind kind, const GridFunction& f, double epsilon)
    : kind_(kind), epsilon_(epsilon), domain_(f.domain()), f_cadlag_(f.cadlag()) {
  require_epsilon(epsilon);
  switch (kind) {
    case FunctionalKind::sup_norm: {
      require(f.sup_norm() > 0.0, "sup-norm derivative is undefined at f = 0");
      upper_ = superlevel_set(f.abs(), epsilon).points;
      upper_sign_.reserve(upper_.size());
      for (const auto& p : upper_) upper_sign_.push_back(f.at(p) < 0.0 ? -1.0 : 1.0);
      break;
    }
    case FunctionalKind::sup:
      upper_ = superlevel_set(f, epsilon).points;
      upper_sign_.assign(upper_.size(), 1.0);
      break;
    case FunctionalKind::inf:
      lower_ = sublevel_set(f, epsilon).points;
      break;
    case FunctionalKind::amplitude:
      upper_ = superlevel_set(f, epsilon).points;
      upper_sign_.assign(upper_.size(), 1.0);
      lower_ = sublevel_set(f, epsilon).points;
      break;
  }
}

double DirectionalDerivative::sup_over_upper(const GridFunction& g) const {
  const bool both_channels = !f_cadlag_ && g.cadlag();
  const auto left = g.left_limits();
  double m = -kInf;
  for (std::size_t k = 0; k < upper_.size(); ++k) {
    const auto& p = upper_[k];
    m = std::max(m, upper_sign_[k] * g.at(p));
    if (both_channels) m = std::max(m, upper_sign_[k] * left[p.node]);
  }
  return m;
}

double DirectionalDerivative::inf_over_lower(const GridFunction& g) const {
  const bool both_channels = !f_cadlag_ && g.cadlag();
  const auto left = g.left_limits();
  double m = kInf;
  for (const auto& p : lower_) {
    m = std::min(m, g.at(p));
    if (both_channels) m = std::min(m, left[p.node]);
  }
  return m;
}

double DirectionalDerivative::operator()(const GridFunction& g) const {
  require(g.domain() == domain_ || *g.domain() == *domain_, "direction must share the grid of f");
  switch (kind_) {
    case FunctionalKind::sup_norm:
    case FunctionalKind::sup:
      return sup_over_upper(g);
    case FunctionalKind::inf:
      return inf_over_lower(g);
    case FunctionalKind::amplitude:
      return sup_over_upper(g) - inf_over_lower(g);
  }
  return 0.0;
}

double directional_derivative(FunctionalKind kind, const GridFunction& f, const GridFunction& g,
                              double epsilon) {
  return DirectionalDerivative(kind, f, epsilon)(g);
}

double difference_quotient(FunctionalKind kind, const GridFunction& f, const GridFunction& g, double t) {
  require(t > 0.0, "difference quotient step must be positive");
  return (evaluate(kind, f.axpy(t, g)) - evaluate(kind, f)) / t;
}

ExtremalSet argmax_set(const GridFunction& f, double tolerance) {
  return make_extremal_set(f, superlevel_set(f, tolerance), true);
}

ExtremalSet argmin_set(const GridFunction& f, double tolerance) {
  return make_extremal_set(f, sublevel_set(f, tolerance), false);
}

std::optional<DifferentiabilityWitness> full_differentiability_witness(FunctionalKind kind,
                                                                       const GridFunction& f,
                                                                       double tolerance) {
  DifferentiabilityWitness w;
  switch (kind) {
    case FunctionalKind::sup_norm: {
      require(f.sup_norm() > 0.0, "sup-norm derivative is undefined at f = 0");
      const auto peak = argmax_set(f.abs(), tolerance);
      if (peak.cluster_count() != 1) return std::nullopt;
      const auto& cluster = peak.clusters.front();
      const bool negative = f.at(cluster.front()) < 0.0;
      for (const auto& p : cluster) {
        if ((f.at(p) < 0.0) != negative) return std::nullopt;
      }
      w.argmax = peak.representatives.front();
      w.sign = negative ? -1 : 1;
      return w;
    }
    case FunctionalKind::sup: {
      const auto top = argmax_set(f, tolerance);
      if (top.cluster_count() != 1) return std::nullopt;
      w.argmax = top.representatives.front();
      return w;
    }
    case FunctionalKind::inf: {
      const auto bottom = argmin_set(f, tolerance);
      if (bottom.cluster_count() != 1) return std::nullopt;
      w.argmin = bottom.representatives.front();
      return w;
    }
    case FunctionalKind::amplitude: {
      const auto top = argmax_set(f, tolerance);
      const auto bottom = argmin_set(f, tolerance);
      if (top.cluster_count() != 1 || bottom.cluster_count() != 1) return std::nullopt;
      w.argmax = top.representatives.front();
      w.argmin = bottom.representatives.front();
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace supdiff
