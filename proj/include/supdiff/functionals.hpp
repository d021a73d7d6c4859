#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "supdiff/grid.hpp"

namespace supdiff {

/// The four supremum-type maps on bounded functions.
enum class FunctionalKind {
  sup_norm,   ///< delta(f) = sup |f|
  sup,        ///< sigma(f) = sup f
  inf,        ///< iota(f) = inf f
  amplitude,  ///< alpha(f) = sup f - inf f
};

std::string_view to_string(FunctionalKind kind) noexcept;
/// Accepts "delta"/"sup_norm", "sigma"/"sup", "iota"/"inf", "alpha"/"amplitude".
FunctionalKind parse_functional_kind(std::string_view name);

/// phi(f) over every channel of f.
double evaluate(FunctionalKind kind, const GridFunction& f);

/// Points with f >= sup f - epsilon.
LevelSet superlevel_set(const GridFunction& f, double epsilon);
/// Points with f <= inf f + epsilon.
LevelSet sublevel_set(const GridFunction& f, double epsilon);

/// Directional derivative of phi at f, with the level sets extracted once so
/// the derivative can be applied to many directions.
///
/// For a cadlag f the level sets range over both channels and g is read on
/// the same channel. When f is continuous and g is cadlag, both channels of g
/// are read at every node of the level set. The sign used by the sup-norm
/// derivative is taken from f on the same channel, with sgn(0) = +1.
class DirectionalDerivative {
 public:
  DirectionalDerivative(FunctionalKind kind, const GridFunction& f, double epsilon);

  double operator()(const GridFunction& g) const;

  FunctionalKind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }
  /// A_eps(f) (or A_eps(|f|) for the sup norm); empty for the infimum.
  const std::vector<GridPoint>& upper_points() const noexcept { return upper_; }
  /// Signs of f on upper_points() (all +1 unless kind is sup_norm).
  const std::vector<double>& upper_signs() const noexcept { return upper_sign_; }
  /// B_eps(f); empty unless kind is inf or amplitude.
  const std::vector<GridPoint>& lower_points() const noexcept { return lower_; }

 private:
  double sup_over_upper(const GridFunction& g) const;
  double inf_over_lower(const GridFunction& g) const;

  FunctionalKind kind_;
  double epsilon_;
  DomainPtr domain_;
  bool f_cadlag_;
  std::vector<GridPoint> upper_;
  std::vector<double> upper_sign_;
  std::vector<GridPoint> lower_;
};

double directional_derivative(FunctionalKind kind, const GridFunction& f, const GridFunction& g,
                              double epsilon);

/// (phi(f + t g) - phi(f)) / t.
double difference_quotient(FunctionalKind kind, const GridFunction& f, const GridFunction& g, double t);

/// A tolerance level set split into clusters of grid-adjacent nodes.
struct ExtremalSet {
  LevelSet level;
  std::vector<std::vector<GridPoint>> clusters;
  /// Per cluster, the point with the most extreme value (first in grid order on ties).
  std::vector<GridPoint> representatives;

  std::size_t cluster_count() const noexcept { return clusters.size(); }
};

ExtremalSet argmax_set(const GridFunction& f, double tolerance);
ExtremalSet argmin_set(const GridFunction& f, double tolerance);

struct DifferentiabilityWitness {
  std::optional<GridPoint> argmax;  ///< x+ (or the peak of |f| for the sup norm)
  std::optional<GridPoint> argmin;  ///< x-
  int sign = 1;                     ///< sgn f at the peak, sup norm only
};

/// Witness of full (linear) differentiability: the relevant extremal sets
/// consist of a single cluster, and for the sup norm f keeps one sign on it.
std::optional<DifferentiabilityWitness> full_differentiability_witness(FunctionalKind kind,
                                                                       const GridFunction& f,
                                                                       double tolerance);

}  // namespace supdiff
