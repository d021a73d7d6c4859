#include "supdiff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "supdiff/error.hpp"

namespace supdiff {

namespace {

void validate_axis(const std::vector<double>& axis, bool compactified, bool discrete, std::size_t k) {
  const std::string where = "grid axis " + std::to_string(k);
  require(axis.size() >= (discrete ? 1U : 2U), where + " needs at least 2 abscissae");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double x = axis[i];
    require(!std::isnan(x), where + " contains NaN");
    if (std::isinf(x)) {
      require(compactified, where + " has an infinite abscissa but is not compactified");
      require((i == 0 && x < 0) || (i + 1 == axis.size() && x > 0),
              where + " may hold -inf/+inf only as first/last abscissa");
    }
    if (i > 0) require(axis[i - 1] < x, where + " must be strictly increasing");
  }
}

}  // namespace

GridDomain::GridDomain(std::vector<std::vector<double>> axes, bool compactified, bool discrete)
    : axes_(std::move(axes)), compactified_(compactified), discrete_(discrete) {
  require(!axes_.empty(), "grid needs at least one axis");
  for (std::size_t k = 0; k < axes_.size(); ++k) validate_axis(axes_[k], compactified_, discrete_, k);
  strides_.assign(axes_.size(), 1);
  for (std::size_t k = axes_.size() - 1; k > 0; --k) strides_[k - 1] = strides_[k] * axes_[k].size();
  size_ = strides_[0] * axes_[0].size();
}

GridDomain GridDomain::line(std::vector<double> abscissae) {
  return GridDomain({std::move(abscissae)}, false);
}

GridDomain GridDomain::compactified_line(std::vector<double> interior) {
  std::vector<double> axis;
  axis.reserve(interior.size() + 2);
  axis.push_back(-std::numeric_limits<double>::infinity());
  axis.insert(axis.end(), interior.begin(), interior.end());
  axis.push_back(std::numeric_limits<double>::infinity());
  return GridDomain({std::move(axis)}, true);
}

GridDomain GridDomain::lattice(std::vector<std::vector<double>> axes, bool compactified) {
  return GridDomain(std::move(axes), compactified);
}

GridDomain GridDomain::index_set(std::size_t count) {
  require(count >= 1, "index set needs at least one element");
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = static_cast<double>(i);
  return GridDomain({std::move(axis)}, false, true);
}

std::vector<double> GridDomain::linspace(double lo, double hi, std::size_t n) {
  require(n >= 2, "linspace needs at least 2 points");
  std::vector<double> out(n);
  const double span = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

std::vector<std::size_t> GridDomain::unflatten(std::size_t node) const {
  std::vector<std::size_t> index(axes_.size());
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    index[k] = node / strides_[k];
    node %= strides_[k];
  }
  return index;
}

std::size_t GridDomain::flatten(std::span<const std::size_t> index) const {
  std::size_t node = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) node += index[k] * strides_[k];
  return node;
}

double GridDomain::coordinate(std::size_t node, std::size_t axis) const {
  return axes_[axis][(node / strides_[axis]) % axes_[axis].size()];
}

std::vector<double> GridDomain::point(std::size_t node) const {
  std::vector<double> x(axes_.size());
  for (std::size_t k = 0; k < axes_.size(); ++k) x[k] = coordinate(node, k);
  return x;
}

bool GridDomain::adjacent(std::size_t a, std::size_t b) const {
  if (discrete_) return a == b;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const std::size_t ia = (a / strides_[k]) % axes_[k].size();
    const std::size_t ib = (b / strides_[k]) % axes_[k].size();
    if ((ia > ib ? ia - ib : ib - ia) > 1) return false;
  }
  return true;
}

double GridDomain::compact_coordinate(double x) noexcept {
  if (std::isinf(x)) return x < 0 ? 0.0 : 1.0;
  return 0.5 + std::atan(x) / std::numbers::pi;
}

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  require(domain_ != nullptr, "grid function needs a domain");
  require(values_.size() == domain_->size(), "value count must equal node count");
  for (double v : values_) require(std::isfinite(v), "grid function values must be finite");
}

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values, std::vector<double> left_limits)
    : GridFunction(std::move(domain), std::move(values)) {
  require(domain_->dimension() == 1, "left-limit channel exists only in dimension 1");
  require(left_limits.size() == values_.size(), "left-limit count must equal node count");
  for (double v : left_limits) require(std::isfinite(v), "left limits must be finite");
  left_ = std::move(left_limits);
  continuity_ = Continuity::cadlag;
}

GridFunction GridFunction::tabulate(DomainPtr domain,
                                    const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> values(domain->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto x = domain->point(i);
    values[i] = fn(x);
  }
  return GridFunction(std::move(domain), std::move(values));
}

GridFunction GridFunction::constant(DomainPtr domain, double c) {
  const std::size_t n = domain->size();
  return GridFunction(std::move(domain), std::vector<double>(n, c));
}

std::vector<GridPoint> GridFunction::points() const {
  std::vector<GridPoint> out;
  out.reserve(cadlag() ? 2 * size() : size());
  for (std::size_t i = 0; i < size(); ++i) {
    out.push_back({i, Channel::value});
    if (cadlag()) out.push_back({i, Channel::left_limit});
  }
  return out;
}

bool GridFunction::same_domain(const GridFunction& other) const {
  return domain_ == other.domain_ || *domain_ == *other.domain_;
}

GridFunction GridFunction::axpy(double t, const GridFunction& other) const {
  require(same_domain(other), "grid functions must share a domain");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + t * other.values_[i];
  if (!cadlag() && !other.cadlag()) return GridFunction(domain_, std::move(v));
  const auto fl = left_limits();
  const auto gl = other.left_limits();
  std::vector<double> l(v.size());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = fl[i] + t * gl[i];
  return GridFunction(domain_, std::move(v), std::move(l));
}

GridFunction GridFunction::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  if (!cadlag()) return GridFunction(domain_, std::move(v));
  std::vector<double> l(left_);
  for (double& x : l) x *= c;
  return GridFunction(domain_, std::move(v), std::move(l));
}

GridFunction GridFunction::abs() const {
  std::vector<double> v(values_);
  for (double& x : v) x = std::fabs(x);
  if (!cadlag()) return GridFunction(domain_, std::move(v));
  std::vector<double> l(left_);
  for (double& x : l) x = std::fabs(x);
  return GridFunction(domain_, std::move(v), std::move(l));
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::fabs(x));
  for (double x : left_) m = std::max(m, std::fabs(x));
  return m;
}

std::vector<std::size_t> LevelSet::nodes() const {
  std::vector<std::size_t> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (out.empty() || out.back() != p.node) out.push_back(p.node);
  }
  return out;
}

bool LevelSet::contains(GridPoint p) const {
  return std::binary_search(points.begin(), points.end(), p);
}

}  // namespace supdiff
