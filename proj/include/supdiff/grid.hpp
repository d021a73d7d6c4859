#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace supdiff {

/// Finite ordered grid standing in for the index set of a bounded function.
///
/// A one-dimensional grid is a strictly increasing list of abscissae. A
/// lattice is the product of per-axis strictly increasing lists, flattened
/// row-major (last axis fastest). A compactified grid may carry -inf/+inf as
/// its first/last abscissa on each axis; those sentinels are the images of
/// 0 and 1 under x -> 1/2 + atan(x)/pi.
class GridDomain {
 public:
  static GridDomain line(std::vector<double> abscissae);
  /// Interior abscissae plus -inf/+inf sentinels.
  static GridDomain compactified_line(std::vector<double> interior);
  static GridDomain lattice(std::vector<std::vector<double>> axes, bool compactified = false);
  /// Unordered index set {0, ..., count-1} (e.g. a finite function class).
  /// Distinct nodes are never adjacent and a single node is allowed.
  static GridDomain index_set(std::size_t count);
  /// n equally spaced points on [lo, hi], both ends included.
  static std::vector<double> linspace(double lo, double hi, std::size_t n);

  std::size_t dimension() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  bool compactified() const noexcept { return compactified_; }
  bool discrete() const noexcept { return discrete_; }
  const std::vector<double>& axis(std::size_t k) const { return axes_.at(k); }
  std::size_t extent(std::size_t k) const { return axes_.at(k).size(); }

  /// Per-axis indices of a flattened node.
  std::vector<std::size_t> unflatten(std::size_t node) const;
  std::size_t flatten(std::span<const std::size_t> index) const;
  double coordinate(std::size_t node, std::size_t axis) const;
  /// All coordinates of a node.
  std::vector<double> point(std::size_t node) const;

  /// Nodes whose per-axis indices differ by at most one (Chebyshev distance <= 1).
  bool adjacent(std::size_t a, std::size_t b) const;

  /// Image of x under the fixed homeomorphism of the extended line onto [0, 1].
  static double compact_coordinate(double x) noexcept;

  bool operator==(const GridDomain& other) const = default;

 private:
  GridDomain(std::vector<std::vector<double>> axes, bool compactified, bool discrete = false);

  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  bool compactified_ = false;
  bool discrete_ = false;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

inline DomainPtr share(GridDomain domain) {
  return std::make_shared<const GridDomain>(std::move(domain));
}

enum class Continuity : std::uint8_t { continuous, cadlag };

/// Which one-sided value of a cadlag function a grid point refers to. The
/// value channel is the right limit; the left channel is the limit from below.
enum class Channel : std::uint8_t { value = 0, left_limit = 1 };

struct GridPoint {
  std::size_t node = 0;
  Channel channel = Channel::value;

  auto operator<=>(const GridPoint&) const = default;
};

/// Real values on the nodes of a grid, optionally with a left-limit channel
/// (one-dimensional cadlag functions only).
class GridFunction {
 public:
  GridFunction(DomainPtr domain, std::vector<double> values);
  GridFunction(DomainPtr domain, std::vector<double> values, std::vector<double> left_limits);

  static GridFunction tabulate(DomainPtr domain, const std::function<double(std::span<const double>)>& fn);
  static GridFunction constant(DomainPtr domain, double c);

  const DomainPtr& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }
  Continuity continuity() const noexcept { return continuity_; }
  bool cadlag() const noexcept { return continuity_ == Continuity::cadlag; }

  std::span<const double> values() const noexcept { return values_; }
  /// Left limits; for a continuous function this is the value array.
  std::span<const double> left_limits() const noexcept { return cadlag() ? left_ : values_; }

  double operator[](std::size_t node) const { return values_[node]; }
  double at(GridPoint p) const {
    return p.channel == Channel::left_limit && cadlag() ? left_[p.node] : values_[p.node];
  }

  /// Every (node, channel) pair carried by the function, in grid order.
  std::vector<GridPoint> points() const;

  bool same_domain(const GridFunction& other) const;

  /// this + t * other, channel by channel. The result is cadlag if either operand is.
  GridFunction axpy(double t, const GridFunction& other) const;
  GridFunction scaled(double c) const;
  GridFunction abs() const;
  GridFunction operator-() const { return scaled(-1.0); }
  GridFunction operator+(const GridFunction& other) const { return axpy(1.0, other); }
  GridFunction operator-(const GridFunction& other) const { return axpy(-1.0, other); }

  /// Largest absolute value over all channels.
  double sup_norm() const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
  std::vector<double> left_;
  Continuity continuity_ = Continuity::continuous;
};

/// Sorted, duplicate-free set of grid points selected by a level or
/// tolerance criterion.
struct LevelSet {
  std::vector<GridPoint> points;
  double epsilon = 0.0;

  bool empty() const noexcept { return points.empty(); }
  std::size_t size() const noexcept { return points.size(); }
  /// Distinct node indices, ascending.
  std::vector<std::size_t> nodes() const;
  bool contains(GridPoint p) const;
};

}  // namespace supdiff
