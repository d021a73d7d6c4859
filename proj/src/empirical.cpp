#include "supdiff/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "supdiff/detail/lattice_ops.hpp"
#include "supdiff/error.hpp"

namespace supdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Given, for every observation and axis, the first lattice index from which
// the observation is counted (or extent = never), returns the normalized
// cumulative counts on the lattice.
std::vector<double> cumulative_counts(const GridDomain& lattice, const std::vector<std::size_t>& first_index,
                                      std::size_t n) {
  const std::size_t d = lattice.dimension();
  std::vector<double> counts(lattice.size(), 0.0);
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < n; ++i) {
    bool counted = true;
    for (std::size_t k = 0; k < d; ++k) {
      idx[k] = first_index[i * d + k];
      if (idx[k] >= lattice.extent(k)) counted = false;
    }
    if (counted) counts[lattice.flatten(idx)] += 1.0;
  }
  detail::prefix_sum_lattice(lattice, counts);
  const double inv = 1.0 / static_cast<double>(n);
  for (double& c : counts) c *= inv;
  return counts;
}

std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

GridFunction ecdf(const Sample& sample) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dimension();
  const double inv = 1.0 / static_cast<double>(n);
  if (d == 1) {
    auto sorted = sample.column(0);
    std::sort(sorted.begin(), sorted.end());
    const auto points = distinct_sorted(sorted);
    auto domain = share(GridDomain::compactified_line(points));
    std::vector<double> value(domain->size()), left(domain->size());
    value.front() = left.front() = 0.0;
    value.back() = left.back() = 1.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), points[j]) - sorted.begin();
      const auto hi = std::upper_bound(sorted.begin(), sorted.end(), points[j]) - sorted.begin();
      left[j + 1] = static_cast<double>(lo) * inv;
      value[j + 1] = static_cast<double>(hi) * inv;
    }
    return GridFunction(std::move(domain), std::move(value), std::move(left));
  }

  std::vector<std::vector<double>> axes(d);
  for (std::size_t k = 0; k < d; ++k) {
    auto axis = distinct_sorted(sample.column(k));
    axis.insert(axis.begin(), -kInf);
    axis.push_back(kInf);
    axes[k] = std::move(axis);
  }
  auto lattice = share(GridDomain::lattice(axes, true));
  std::vector<std::size_t> first(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const auto& axis = axes[k];
      first[i * d + k] = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), sample(i, k)) - axis.begin());
    }
  }
  auto values = cumulative_counts(*lattice, first, n);
  return GridFunction(std::move(lattice), std::move(values));
}

double ecdf_at(const Sample& sample, std::span<const double> x) {
  require(x.size() == sample.dimension(), "ecdf argument has the wrong dimension");
  std::size_t count = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    bool below = true;
    for (std::size_t k = 0; k < x.size() && below; ++k) below = sample(i, k) <= x[k];
    if (below) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

GridFunction empirical_process(const Sample& sample, const UnivariateCdf& F, DomainPtr grid) {
  require(sample.dimension() == 1 && grid->dimension() == 1, "univariate empirical process needs d = 1");
  auto sorted = sample.column(0);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double root_n = std::sqrt(n);
  const auto& axis = grid->axis(0);
  std::vector<double> value(axis.size()), left(axis.size());
  for (std::size_t j = 0; j < axis.size(); ++j) {
    const double x = axis[j];
    const double below_or_at = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
    const double below = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
    value[j] = root_n * (below_or_at / n - F.cdf(x));
    left[j] = root_n * (below / n - F.left_limit(x));
  }
  return GridFunction(std::move(grid), std::move(value), std::move(left));
}

GridFunction ecdf_on_lattice(const Sample& sample, DomainPtr lattice) {
  const std::size_t d = sample.dimension();
  require(lattice != nullptr && d == lattice->dimension(), "sample and lattice dimensions differ");
  const std::size_t n = sample.size();
  std::vector<std::size_t> first(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const auto& axis = lattice->axis(k);
      first[i * d + k] = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), sample(i, k)) - axis.begin());
    }
  }
  auto values = cumulative_counts(*lattice, first, n);
  return GridFunction(std::move(lattice), std::move(values));
}

GridFunction empirical_process(const Sample& sample, const JointCdf& F, DomainPtr grid) {
  require(sample.dimension() == F.dimension(), "sample and cdf dimensions differ");
  const auto Fn = ecdf_on_lattice(sample, grid);
  const double root_n = std::sqrt(static_cast<double>(sample.size()));
  std::vector<double> values(Fn.size());
  for (std::size_t node = 0; node < values.size(); ++node) {
    values[node] = root_n * (Fn[node] - F(grid->point(node)));
  }
  return GridFunction(std::move(grid), std::move(values));
}

std::vector<std::size_t> min_ranks(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ranks[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin()) + 1;
  }
  return ranks;
}

GridFunction empirical_copula(const Sample& sample, DomainPtr lattice) {
  const std::size_t d = sample.dimension();
  require(d >= 2, "empirical copula needs dimension >= 2");
  require(lattice->dimension() == d, "lattice dimension must match the sample");
  for (std::size_t k = 0; k < d; ++k) {
    const auto& axis = lattice->axis(k);
    require(axis.front() >= 0.0 && axis.back() <= 1.0, "copula lattice must lie in [0, 1]^d");
  }
  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  std::vector<std::size_t> first(n * d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto column = sample.column(k);
    const auto ranks = min_ranks(column);
    const auto& axis = lattice->axis(k);
    for (std::size_t i = 0; i < n; ++i) {
      // Counted at u when n u > rank - 1; the slack absorbs rounding in i/n.
      const double threshold = static_cast<double>(ranks[i] - 1) + 1e-7;
      first[i * d + k] = static_cast<std::size_t>(
          std::upper_bound(axis.begin(), axis.end(), threshold,
                           [nd](double t, double u) { return t < nd * u; }) -
          axis.begin());
    }
  }
  auto values = cumulative_counts(*lattice, first, n);
  return GridFunction(std::move(lattice), std::move(values));
}

DomainPtr rank_lattice(std::size_t n, std::size_t dimension) {
  require(n >= 1, "rank lattice needs n >= 1");
  std::vector<double> axis(n + 1);
  for (std::size_t i = 0; i <= n; ++i) axis[i] = static_cast<double>(i) / static_cast<double>(n);
  return share(GridDomain::lattice(std::vector<std::vector<double>>(dimension, axis)));
}

bool reflection_closed(const GridDomain& lattice, double tolerance) {
  for (std::size_t k = 0; k < lattice.dimension(); ++k) {
    const auto& axis = lattice.axis(k);
    const std::size_t m = axis.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (std::fabs(axis[i] + axis[m - 1 - i] - 1.0) > tolerance) return false;
    }
  }
  return true;
}

std::size_t reflected_node(const GridDomain& lattice, std::size_t node) {
  auto idx = lattice.unflatten(node);
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = lattice.extent(k) - 1 - idx[k];
  return lattice.flatten(idx);
}

GridFunction survival_copula(const GridFunction& C) {
  const auto& lattice = *C.domain();
  require(lattice.dimension() == 2, "survival copula is defined for bivariate copulas");
  require(reflection_closed(lattice), "lattice must be closed under u -> 1 - u");
  const auto& au = lattice.axis(0);
  const auto& av = lattice.axis(1);
  const std::size_t nu = au.size();
  const std::size_t nv = av.size();
  std::vector<double> out(C.size());
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      out[i * nv + j] = au[i] + av[j] - 1.0 + C[(nu - 1 - i) * nv + (nv - 1 - j)];
    }
  }
  return GridFunction(C.domain(), std::move(out));
}

double interpolate(const GridFunction& f, std::span<const double> u) {
  const auto& lattice = *f.domain();
  const std::size_t d = lattice.dimension();
  require(u.size() == d, "interpolation point has the wrong dimension");
  std::vector<std::size_t> lo(d);
  std::vector<double> w(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto& axis = lattice.axis(k);
    const double x = std::clamp(u[k], axis.front(), axis.back());
    auto j = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
    j = std::clamp<std::size_t>(j, 1, axis.size() - 1);
    lo[k] = j - 1;
    w[k] = (x - axis[j - 1]) / (axis[j] - axis[j - 1]);
  }
  double total = 0.0;
  std::vector<std::size_t> idx(d);
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double weight = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const bool up = (corner >> k) & 1U;
      idx[k] = lo[k] + (up ? 1 : 0);
      weight *= up ? w[k] : 1.0 - w[k];
    }
    if (weight != 0.0) total += weight * f[lattice.flatten(idx)];
  }
  return total;
}

namespace {

template <class Eval>
std::pair<GridFunction, GridFunction> finite_difference_partials(const Eval& eval, DomainPtr lattice, double h) {
  require(h > 0.0 && h <= 0.5, "partial-derivative bandwidth must lie in (0, 1/2]");
  require(lattice->dimension() == 2, "copula partials are computed for bivariate copulas");
  std::vector<double> d1(lattice->size()), d2(lattice->size());
  for (std::size_t node = 0; node < lattice->size(); ++node) {
    const auto u = lattice->point(node);
    for (std::size_t k = 0; k < 2; ++k) {
      auto lo = u;
      auto hi = u;
      if (u[k] - h < 0.0) {
        hi[k] = u[k] + h;
      } else if (u[k] + h > 1.0) {
        lo[k] = u[k] - h;
      } else {
        lo[k] = u[k] - h;
        hi[k] = u[k] + h;
      }
      const double slope = (eval(hi) - eval(lo)) / (hi[k] - lo[k]);
      (k == 0 ? d1 : d2)[node] = std::clamp(slope, 0.0, 1.0);
    }
  }
  return {GridFunction(lattice, std::move(d1)), GridFunction(lattice, std::move(d2))};
}

}  // namespace

std::pair<GridFunction, GridFunction> copula_partials(const Copula& C, DomainPtr lattice, double h) {
  require(C.dimension() == 2, "copula partials are computed for bivariate copulas");
  return finite_difference_partials([&C](const std::vector<double>& u) { return C(u); }, std::move(lattice), h);
}

std::pair<GridFunction, GridFunction> copula_partials(const GridFunction& C, double h) {
  return finite_difference_partials([&C](const std::vector<double>& u) { return interpolate(C, u); }, C.domain(), h);
}

double default_partial_bandwidth(std::size_t n, const GridDomain& lattice) {
  require(n >= 1, "bandwidth needs n >= 1");
  double cell = 0.0;
  for (std::size_t k = 0; k < lattice.dimension(); ++k) {
    const auto& axis = lattice.axis(k);
    for (std::size_t i = 1; i < axis.size(); ++i) cell = std::max(cell, axis[i] - axis[i - 1]);
  }
  return std::min(0.5, std::max(1.0 / std::sqrt(static_cast<double>(n)), cell));
}

}  // namespace supdiff
