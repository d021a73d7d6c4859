#include "supdiff/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "supdiff/detail/lattice_ops.hpp"
#include "supdiff/error.hpp"

namespace supdiff {

struct PathSampler::Impl {
  CovarianceKind kind = CovarianceKind::bridge;
  DomainPtr domain;
  std::uint64_t seed = 0;
  Stream stream = Stream::limit;
  bool cadlag = false;
  std::size_t rank = 0;

  virtual ~Impl() = default;
  virtual double covariance(GridPoint a, GridPoint b) const = 0;
  virtual GridFunction draw(std::uint64_t index) const = 0;

  NormalSource normals(std::uint64_t index) const { return NormalSource(stream_engine(seed, stream, index)); }
  GridPoint normalize(GridPoint p) const { return cadlag ? p : GridPoint{p.node, Channel::value}; }
};

namespace {

using Impl = PathSampler::Impl;

constexpr double kMonotoneSlack = 1e-10;

std::vector<double> draw_normals(NormalSource& z, std::size_t count) {
  std::vector<double> out(count);
  for (auto& x : out) x = z();
  return out;
}

// Standard Brownian bridge read at the times F(x) / F(x-) of a line.
struct LineBridge final : Impl {
  std::vector<double> value_time;
  std::vector<double> left_time;

  double time(GridPoint p) const {
    return p.channel == Channel::left_limit && cadlag ? left_time[p.node] : value_time[p.node];
  }

  double covariance(GridPoint a, GridPoint b) const override {
    const double s = time(normalize(a));
    const double t = time(normalize(b));
    return std::min(s, t) - s * t;
  }

  GridFunction draw(std::uint64_t index) const override {
    auto z = normals(index);
    const std::size_t n = value_time.size();
    std::vector<double> value(n), left(cadlag ? n : 0);
    double s = 0.0, b = 0.0;
    auto advance = [&](double t) {
      if (t <= s) return b;
      if (t >= 1.0) {
        s = 1.0;
        b = 0.0;
        return b;
      }
      const double mean = b * (1.0 - t) / (1.0 - s);
      const double var = (t - s) * (1.0 - t) / (1.0 - s);
      b = mean + std::sqrt(var) * z();
      s = t;
      return b;
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (cadlag) left[i] = advance(left_time[i]);
      value[i] = advance(value_time[i]);
    }
    if (cadlag) return {domain, std::move(value), std::move(left)};
    return {domain, std::move(value)};
  }
};

std::shared_ptr<LineBridge> make_line_bridge(const UnivariateCdf& F, DomainPtr grid, std::uint64_t seed,
                                             Stream stream) {
  require(grid != nullptr, "grid is required");
  require(grid->dimension() == 1 && !grid->discrete(), "univariate bridge needs a one-dimensional grid");
  auto impl = std::make_shared<LineBridge>();
  impl->kind = CovarianceKind::bridge;
  impl->domain = grid;
  impl->seed = seed;
  impl->stream = stream;
  const auto& x = grid->axis(0);
  impl->value_time.resize(x.size());
  impl->left_time.resize(x.size());
  double previous = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double left = F.left_limit(x[i]);
    const double value = F.cdf(x[i]);
    require(std::isfinite(left) && std::isfinite(value), "F must be finite on the grid");
    require(left >= previous - kMonotoneSlack && value >= left - kMonotoneSlack && value <= 1.0 + kMonotoneSlack &&
                left >= -kMonotoneSlack,
            "F is not monotone on the grid");
    impl->left_time[i] = std::clamp(std::max(left, previous), 0.0, 1.0);
    impl->value_time[i] = std::clamp(std::max(value, impl->left_time[i]), 0.0, 1.0);
    previous = impl->value_time[i];
    if (impl->value_time[i] > impl->left_time[i]) impl->cadlag = true;
  }
  impl->rank = x.size();
  return impl;
}

// Per-axis indices of the coordinatewise minimum of two lattice nodes.
std::size_t meet(const GridDomain& lattice, std::size_t a, std::size_t b) {
  auto ia = lattice.unflatten(a);
  const auto ib = lattice.unflatten(b);
  for (std::size_t k = 0; k < ia.size(); ++k) ia[k] = std::min(ia[k], ib[k]);
  return lattice.flatten(ia);
}

// Backward differences along every axis; inverse of prefix_sum_lattice.
void difference_lattice(const GridDomain& lattice, std::span<double> values) {
  std::size_t stride = lattice.size();
  for (std::size_t k = 0; k < lattice.dimension(); ++k) {
    const std::size_t extent = lattice.extent(k);
    stride /= extent;
    const std::size_t block = stride * extent;
    for (std::size_t base = 0; base < values.size(); base += block) {
      for (std::size_t j = extent - 1; j >= 1; --j) {
        double* row = values.data() + base + j * stride;
        const double* prev = row - stride;
        for (std::size_t off = 0; off < stride; ++off) row[off] -= prev[off];
      }
    }
  }
}

struct Sheet final : Impl {
  std::vector<double> F;
  SheetMethod method = SheetMethod::cell_mass;
  std::vector<double> cell_sd;
  double remainder_sd = 0.0;
  Eigen::MatrixXd factor;

  double covariance(GridPoint a, GridPoint b) const override {
    return F[meet(*domain, a.node, b.node)] - F[a.node] * F[b.node];
  }

  GridFunction draw(std::uint64_t index) const override {
    auto z = normals(index);
    const std::size_t n = F.size();
    std::vector<double> out(n);
    if (method == SheetMethod::dense) {
      const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(draw_normals(z, rank).data(),
                                                                  static_cast<Eigen::Index>(rank));
      const Eigen::VectorXd path = factor * e;
      for (std::size_t i = 0; i < n; ++i) out[i] = path(static_cast<Eigen::Index>(i));
      return {domain, std::move(out)};
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = cell_sd[i] * z();
    detail::prefix_sum_lattice(*domain, out);
    const double total = out.back() + remainder_sd * z();
    for (std::size_t i = 0; i < n; ++i) out[i] -= F[i] * total;
    return {domain, std::move(out)};
  }
};

Eigen::MatrixXd covariance_over(const Impl& impl, const std::vector<GridPoint>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      S(i, j) = S(j, i) = impl.covariance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    }
  }
  return S;
}

std::vector<GridPoint> node_points(const GridDomain& domain) {
  std::vector<GridPoint> out(domain.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {i, Channel::value};
  return out;
}

std::shared_ptr<Sheet> make_sheet(const std::function<double(std::span<const double>)>& F, DomainPtr lattice,
                                  std::uint64_t seed, Stream stream, SheetMethod method) {
  require(lattice != nullptr, "lattice is required");
  require(!lattice->discrete(), "sheet needs an ordered lattice");
  auto impl = std::make_shared<Sheet>();
  impl->kind = CovarianceKind::sheet;
  impl->domain = lattice;
  impl->seed = seed;
  impl->stream = stream;
  impl->method = method;
  const std::size_t n = lattice->size();
  impl->F.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = F(lattice->point(i));
    require(std::isfinite(v) && v >= -kMonotoneSlack && v <= 1.0 + kMonotoneSlack,
            "distribution function must lie in [0, 1] on the lattice");
    impl->F[i] = std::clamp(v, 0.0, 1.0);
  }
  std::vector<double> mass = impl->F;
  difference_lattice(*lattice, mass);
  impl->cell_sd.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(mass[i] >= -kMonotoneSlack, "distribution function is not monotone on the lattice");
    impl->cell_sd[i] = std::sqrt(std::max(mass[i], 0.0));
  }
  const double remainder = 1.0 - impl->F.back();
  impl->remainder_sd = std::sqrt(std::max(remainder, 0.0));
  if (method == SheetMethod::dense) {
    const auto chol = pivoted_cholesky(covariance_over(*impl, node_points(*lattice)));
    impl->factor = chol.factor;
    impl->rank = chol.rank;
  } else {
    impl->rank = n;
  }
  return impl;
}

struct CopulaLimit final : Impl {
  std::shared_ptr<const Sheet> sheet;
  std::vector<GridFunction> partials;
  // margin[k][node]: node with axis k kept and every other axis at 1.
  std::vector<std::vector<std::size_t>> margin;

  double covariance(GridPoint a, GridPoint b) const override {
    const std::size_t d = partials.size();
    auto terms = [&](std::size_t node) {
      std::vector<std::pair<std::size_t, double>> t{{node, 1.0}};
      for (std::size_t k = 0; k < d; ++k) t.emplace_back(margin[k][node], -partials[k][node]);
      return t;
    };
    double acc = 0.0;
    for (const auto& [p, cp] : terms(a.node)) {
      for (const auto& [q, cq] : terms(b.node)) acc += cp * cq * sheet->covariance({p}, {q});
    }
    return acc;
  }

  GridFunction draw(std::uint64_t index) const override {
    const GridFunction B = sheet->draw(index);
    std::vector<double> out(B.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double v = B[i];
      for (std::size_t k = 0; k < partials.size(); ++k) v -= partials[k][i] * B[margin[k][i]];
      out[i] = v;
    }
    return {domain, std::move(out)};
  }
};

struct WeightedBridge final : Impl {
  std::shared_ptr<const LineBridge> bridge;
  std::vector<double> weight;

  double covariance(GridPoint a, GridPoint b) const override {
    return weight[a.node] * weight[b.node] * bridge->covariance(a, b);
  }

  GridFunction draw(std::uint64_t index) const override {
    const GridFunction B = bridge->draw(index);
    std::vector<double> out(B.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = weight[i] * B[i];
    return {domain, std::move(out)};
  }
};

struct Mixture final : Impl {
  double lambda = 0.5;
  PathSampler a, b;

  Mixture(PathSampler left, PathSampler right) : a(std::move(left)), b(std::move(right)) {}

  double covariance(GridPoint p, GridPoint q) const override {
    return (1.0 - lambda) * a.covariance(p, q) + lambda * b.covariance(p, q);
  }

  GridFunction draw(std::uint64_t index) const override {
    return a.sample(index).scaled(std::sqrt(1.0 - lambda)).axpy(-std::sqrt(lambda), b.sample(index));
  }
};

struct FiniteClass final : Impl {
  Eigen::MatrixXd S;
  Eigen::MatrixXd factor;

  double covariance(GridPoint a, GridPoint b) const override {
    return S(static_cast<Eigen::Index>(a.node), static_cast<Eigen::Index>(b.node));
  }

  GridFunction draw(std::uint64_t index) const override {
    auto z = normals(index);
    const std::size_t k = static_cast<std::size_t>(S.rows());
    std::vector<double> out(k, 0.0);
    if (rank > 0) {
      const auto e = draw_normals(z, rank);
      const Eigen::VectorXd path =
          factor * Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(rank));
      for (std::size_t i = 0; i < k; ++i) out[i] = path(static_cast<Eigen::Index>(i));
    }
    return {domain, std::move(out)};
  }
};

}  // namespace

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& S, double relative_tolerance, double residual_tolerance) {
  require(S.rows() == S.cols(), "covariance must be square");
  require(S.allFinite(), "covariance must be finite");
  const Eigen::Index n = S.rows();
  const double scale = n > 0 ? S.cwiseAbs().maxCoeff() : 0.0;
  require((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(scale, 1.0) || n == 0,
          "covariance must be symmetric");

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd d = S.diagonal();
  std::vector<bool> picked(static_cast<std::size_t>(n), false);
  double first = 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index j = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!picked[static_cast<std::size_t>(i)] && (j < 0 || d(i) > d(j))) j = i;
    }
    if (k == 0) first = d(j);
    if (d(j) <= 0.0 || d(j) <= relative_tolerance * first) break;
    const double pivot = std::sqrt(d(j));
    Eigen::VectorXd col = S.col(j);
    if (k > 0) col -= L.leftCols(k) * L.row(j).transpose();
    col /= pivot;
    picked[static_cast<std::size_t>(j)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (picked[static_cast<std::size_t>(i)] && i != j) col(i) = 0.0;
    }
    col(j) = pivot;
    L.col(k) = col;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!picked[static_cast<std::size_t>(i)]) d(i) -= col(i) * col(i);
    }
    rank = k + 1;
  }

  PivotedCholesky out;
  out.factor = L.leftCols(rank);
  out.rank = static_cast<std::size_t>(rank);
  const double norm = S.norm();
  out.residual = norm > 0.0 ? (S - out.factor * out.factor.transpose()).norm() / norm : 0.0;
  require(out.residual <= residual_tolerance,
          "covariance is not positive semidefinite (factor residual " + std::to_string(out.residual) + ")");
  return out;
}

CovarianceKind PathSampler::kind() const noexcept { return impl_->kind; }
const DomainPtr& PathSampler::domain() const noexcept { return impl_->domain; }
std::uint64_t PathSampler::seed() const noexcept { return impl_->seed; }
Stream PathSampler::stream() const noexcept { return impl_->stream; }
bool PathSampler::cadlag() const noexcept { return impl_->cadlag; }
std::size_t PathSampler::rank() const noexcept { return impl_->rank; }

std::vector<GridPoint> PathSampler::points() const {
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < impl_->domain->size(); ++i) {
    out.push_back({i, Channel::value});
    if (impl_->cadlag) out.push_back({i, Channel::left_limit});
  }
  return out;
}

double PathSampler::covariance(GridPoint a, GridPoint b) const {
  require(a.node < impl_->domain->size() && b.node < impl_->domain->size(), "grid point out of range");
  return impl_->covariance(impl_->normalize(a), impl_->normalize(b));
}

Eigen::MatrixXd PathSampler::covariance_matrix() const {
  const auto pts = points();
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      S(i, j) = S(j, i) = covariance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
    }
  }
  return S;
}

GridFunction PathSampler::sample(std::uint64_t index) const { return impl_->draw(index); }

PathSampler bridge_sampler(const UnivariateCdf& F, DomainPtr grid, std::uint64_t seed, Stream stream) {
  return PathSampler(make_line_bridge(F, std::move(grid), seed, stream));
}

PathSampler bridge_sampler(std::function<double(std::span<const double>)> F, DomainPtr lattice, std::uint64_t seed,
                           Stream stream, SheetMethod method) {
  return PathSampler(make_sheet(F, std::move(lattice), seed, stream, method));
}

PathSampler bridge_sampler(const JointCdf& F, DomainPtr lattice, std::uint64_t seed, Stream stream,
                           SheetMethod method) {
  require(lattice != nullptr && lattice->dimension() == F.dimension(), "lattice dimension must match F");
  return bridge_sampler([F](std::span<const double> x) { return F(x); }, std::move(lattice), seed, stream, method);
}

PathSampler bridge_sampler(const Copula& C, DomainPtr lattice, std::uint64_t seed, Stream stream,
                           SheetMethod method) {
  require(lattice != nullptr && lattice->dimension() == C.dimension(), "lattice dimension must match C");
  return bridge_sampler([C](std::span<const double> u) { return C(u); }, std::move(lattice), seed, stream, method);
}

PathSampler copula_limit_sampler(const Copula& C, DomainPtr lattice, std::vector<GridFunction> partials,
                                 std::uint64_t seed, Stream stream, SheetMethod method) {
  require(lattice != nullptr, "lattice is required");
  const std::size_t d = lattice->dimension();
  require(d == C.dimension(), "lattice dimension must match C");
  require(partials.size() == d, "one partial derivative per axis is required");
  for (const auto& p : partials) {
    require(*p.domain() == *lattice, "partials must live on the lattice");
  }
  std::vector<std::size_t> top(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto& axis = lattice->axis(k);
    require(axis.front() >= 0.0 && std::abs(axis.back() - 1.0) <= 1e-12, "copula lattice must end at 1 on every axis");
    top[k] = axis.size() - 1;
  }

  auto impl = std::make_shared<CopulaLimit>();
  impl->kind = CovarianceKind::copula_limit;
  impl->domain = lattice;
  impl->seed = seed;
  impl->stream = stream;
  impl->sheet = make_sheet([C](std::span<const double> u) { return C(u); }, lattice, seed, stream, method);
  impl->rank = impl->sheet->rank;
  impl->partials = std::move(partials);
  impl->margin.assign(d, std::vector<std::size_t>(lattice->size()));
  for (std::size_t node = 0; node < lattice->size(); ++node) {
    const auto idx = lattice->unflatten(node);
    for (std::size_t k = 0; k < d; ++k) {
      auto m = top;
      m[k] = idx[k];
      impl->margin[k][node] = lattice->flatten(m);
    }
  }
  return PathSampler(impl);
}

double log_odds_weight(double F, double G) { return std::log(F * (1.0 - G) / (G * (1.0 - F))); }

std::vector<bool> weighted_bridge_support(const UnivariateCdf& F, const UnivariateCdf& G, const GridDomain& grid,
                                          WeightTruncation truncation) {
  require(grid.dimension() == 1, "weighted bridge needs a one-dimensional grid");
  const auto& x = grid.axis(0);
  std::vector<bool> keep(x.size(), false);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = F.cdf(x[i]);
    if (!std::isfinite(x[i]) || f * (1.0 - f) < truncation.min_variance) continue;
    const double w = log_odds_weight(f, G.cdf(x[i]));
    require(std::isfinite(w), "log-odds weight is not finite at an interior node");
    keep[i] = std::abs(w) <= truncation.max_weight;
  }
  return keep;
}

PathSampler weighted_bridge_sampler(const UnivariateCdf& F, const UnivariateCdf& G, DomainPtr grid,
                                    std::uint64_t seed, WeightTruncation truncation, Stream stream) {
  require(F.continuous() && G.continuous(), "weighted bridge needs continuous F and G");
  require(truncation.min_variance >= 0.0 && truncation.max_weight > 0.0, "invalid truncation");
  auto bridge = make_line_bridge(F, grid, seed, stream);
  const auto keep = weighted_bridge_support(F, G, *grid, truncation);
  auto impl = std::make_shared<WeightedBridge>();
  impl->kind = CovarianceKind::weighted_bridge;
  impl->domain = grid;
  impl->seed = seed;
  impl->stream = stream;
  impl->rank = bridge->rank;
  impl->weight.assign(keep.size(), 0.0);
  const auto& x = grid->axis(0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) impl->weight[i] = log_odds_weight(F.cdf(x[i]), G.cdf(x[i]));
  }
  impl->bridge = std::move(bridge);
  return PathSampler(impl);
}

PathSampler mixture_sampler(double lambda, PathSampler a, PathSampler b) {
  require(lambda > 0.0 && lambda < 1.0, "mixture weight must lie in (0, 1)");
  require(*a.domain() == *b.domain(), "mixture components must share the grid");
  require(a.seed() != b.seed() || a.stream() != b.stream(), "mixture components need independent seeds");
  auto impl = std::make_shared<Mixture>(std::move(a), std::move(b));
  impl->kind = CovarianceKind::mixture;
  impl->domain = impl->a.domain();
  impl->seed = impl->a.seed();
  impl->stream = impl->a.stream();
  impl->cadlag = impl->a.cadlag() || impl->b.cadlag();
  impl->lambda = lambda;
  impl->rank = std::min(impl->domain->size(), impl->a.rank() + impl->b.rank());
  return PathSampler(impl);
}

PathSampler finite_class_sampler(const Eigen::MatrixXd& S, std::uint64_t seed, Stream stream) {
  require(S.rows() >= 1, "covariance must be non-empty");
  const auto chol = pivoted_cholesky(S);
  auto impl = std::make_shared<FiniteClass>();
  impl->kind = CovarianceKind::finite_class;
  impl->domain = share(GridDomain::index_set(static_cast<std::size_t>(S.rows())));
  impl->seed = seed;
  impl->stream = stream;
  impl->S = S;
  impl->factor = chol.factor;
  impl->rank = chol.rank;
  return PathSampler(impl);
}

}  // namespace supdiff
