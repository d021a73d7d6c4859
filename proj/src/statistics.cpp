#include "supdiff/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "supdiff/empirical.hpp"
#include "supdiff/error.hpp"

namespace supdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void update(Extremes& e, double h) {
  e.sup = std::max(e.sup, h);
  e.inf = std::min(e.inf, h);
}

std::vector<double> sorted_column(const Sample& s) {
  auto v = s.column(0);
  std::sort(v.begin(), v.end());
  return v;
}

double count_le(const std::vector<double>& sorted, double x) {
  return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

double count_lt(const std::vector<double>& sorted, double x) {
  return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_statistic_kind(FunctionalKind kind) {
  require(kind != FunctionalKind::inf, "iota is not a Kolmogorov-Smirnov type statistic");
}

// Per-axis distinct coordinates of the given samples plus extra points, with
// -inf/+inf sentinels.
DomainPtr coordinate_lattice(const std::vector<const Sample*>& samples,
                             const std::vector<std::vector<double>>& refinement) {
  const std::size_t d = samples.front()->dimension();
  require(refinement.empty() || refinement.size() == d, "refinement needs one list per axis");
  std::vector<std::vector<double>> axes(d);
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> axis;
    for (const auto* s : samples) {
      const auto c = s->column(k);
      axis.insert(axis.end(), c.begin(), c.end());
    }
    if (!refinement.empty()) {
      for (double x : refinement[k]) {
        if (std::isfinite(x)) axis.push_back(x);
      }
    }
    axis = unique_sorted(std::move(axis));
    axis.insert(axis.begin(), -kInf);
    axis.push_back(kInf);
    axes[k] = std::move(axis);
  }
  return share(GridDomain::lattice(std::move(axes), true));
}

using Member = FiniteFunctionClass::Member;

// Set on which an indicator member equals 1, as an interval (lo, hi].
std::pair<double, double> indicator_interval(const Member& f) {
  return f.decreasing ? std::pair{f.a, kInf} : std::pair{-kInf, f.a};
}

double interval_mass(const UnivariateCdf& P, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return P.cdf(hi) - P.cdf(lo);
}

std::vector<double> kinks(const Member& f) {
  if (f.shape == FiniteFunctionClass::Shape::indicator) return {f.a};
  return {f.a, f.b};
}

// E_P g(X) for g piecewise smooth with the given kink locations.
template <class G>
double expectation(const UnivariateCdf& P, const G& g, const std::vector<double>& kink_points) {
  if (!P.continuous()) {
    const auto& table = std::get<UnivariateCdf::Table>(P.family());
    double total = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < table.x.size(); ++i) {
      total += g(table.x[i]) * (table.F[i] - previous);
      previous = table.F[i];
    }
    return total;
  }
  std::vector<double> cuts{0.0, 1.0};
  for (double x : kink_points) cuts.push_back(std::clamp(P.cdf(x), 0.0, 1.0));
  cuts = unique_sorted(std::move(cuts));
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] <= cuts[i - 1]) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double u) { return g(P.quantile(u)); }, cuts[i - 1], cuts[i], 15, 1e-12);
  }
  return total;
}

}  // namespace

StatResult make_result(double raw, double reference, double scale, std::size_t n, std::size_t m, std::string kind) {
  return StatResult{.raw = raw,
                    .centered = scale * (raw - reference),
                    .scale = scale,
                    .reference = reference,
                    .n = n,
                    .m = m,
                    .kind = std::move(kind)};
}

double two_sample_scale(std::size_t n, std::size_t m) {
  require(n >= 1 && m >= 1, "samples must be non-empty");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return std::sqrt(nd * md / (nd + md));
}

double assemble(FunctionalKind kind, Extremes e) {
  switch (kind) {
    case FunctionalKind::sup_norm:
      return std::max(e.sup, -e.inf);
    case FunctionalKind::sup:
      return e.sup;
    case FunctionalKind::amplitude:
      return e.sup - e.inf;
    case FunctionalKind::inf:
      break;
  }
  throw ValidationError("iota is not a Kolmogorov-Smirnov type statistic");
}

Extremes one_sample_extremes(const Sample& s, const UnivariateCdf& G, std::span<const double> extra_jumps) {
  require(s.dimension() == 1, "univariate statistic needs a one-dimensional sample");
  const auto sorted = sorted_column(s);
  const double n = static_cast<double>(sorted.size());
  std::vector<double> breaks = sorted;
  for (double x : G.atoms()) breaks.push_back(x);
  for (double x : extra_jumps) {
    if (std::isfinite(x)) breaks.push_back(x);
  }
  breaks = unique_sorted(std::move(breaks));
  Extremes e;
  for (double x : breaks) {
    update(e, count_le(sorted, x) / n - G.cdf(x));
    update(e, count_lt(sorted, x) / n - G.left_limit(x));
  }
  return e;
}

Extremes one_sample_extremes(const Sample& s, const JointCdf& G, const std::vector<std::vector<double>>& refinement) {
  require(s.dimension() == G.dimension(), "sample and cdf dimensions differ");
  if (s.dimension() == 1 && refinement.empty()) {
    return one_sample_extremes(s, G.marginals().front());
  }
  const auto lattice = coordinate_lattice({&s}, refinement);
  const auto Fn = ecdf_on_lattice(s, lattice);
  const std::size_t d = lattice->dimension();
  std::vector<double> g(lattice->size());
  for (std::size_t node = 0; node < g.size(); ++node) g[node] = G(lattice->point(node));
  Extremes e;
  std::vector<std::size_t> upper(d);
  for (std::size_t node = 0; node < g.size(); ++node) {
    update(e, Fn[node] - g[node]);
    const auto idx = lattice->unflatten(node);
    for (std::size_t k = 0; k < d; ++k) upper[k] = std::min(idx[k] + 1, lattice->extent(k) - 1);
    update(e, Fn[node] - g[lattice->flatten(upper)]);
  }
  return e;
}

Extremes two_sample_extremes(const Sample& sx, const Sample& sy) {
  require(sx.dimension() == sy.dimension(), "samples must share a dimension");
  Extremes e;
  if (sx.dimension() == 1) {
    const auto x = sorted_column(sx);
    const auto y = sorted_column(sy);
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::vector<double> breaks = x;
    breaks.insert(breaks.end(), y.begin(), y.end());
    breaks = unique_sorted(std::move(breaks));
    for (double b : breaks) {
      update(e, count_le(x, b) / n - count_le(y, b) / m);
      update(e, count_lt(x, b) / n - count_lt(y, b) / m);
    }
    return e;
  }
  const auto lattice = coordinate_lattice({&sx, &sy}, {});
  const auto Fn = ecdf_on_lattice(sx, lattice);
  const auto Gm = ecdf_on_lattice(sy, lattice);
  for (std::size_t node = 0; node < lattice->size(); ++node) update(e, Fn[node] - Gm[node]);
  return e;
}

StatResult ks_one_sample(const Sample& s, const UnivariateCdf& G, FunctionalKind kind, double reference,
                         std::span<const double> extra_jumps) {
  require_statistic_kind(kind);
  const double raw = assemble(kind, one_sample_extremes(s, G, extra_jumps));
  return make_result(raw, reference, std::sqrt(static_cast<double>(s.size())), s.size(), 0,
                     "ks1-" + std::string(to_string(kind)));
}

StatResult ks_one_sample(const Sample& s, const JointCdf& G, FunctionalKind kind, double reference,
                         const std::vector<std::vector<double>>& refinement) {
  require_statistic_kind(kind);
  const double raw = assemble(kind, one_sample_extremes(s, G, refinement));
  return make_result(raw, reference, std::sqrt(static_cast<double>(s.size())), s.size(), 0,
                     "ks1-" + std::string(to_string(kind)));
}

StatResult ks_two_sample(const Sample& sx, const Sample& sy, FunctionalKind kind, double reference) {
  require_statistic_kind(kind);
  const double raw = assemble(kind, two_sample_extremes(sx, sy));
  return make_result(raw, reference, two_sample_scale(sx.size(), sy.size()), sx.size(), sy.size(),
                     "ks2-" + std::string(to_string(kind)));
}

double copula_distance(const Sample& s, const std::function<double(std::span<const double>)>& D) {
  const std::size_t d = s.dimension();
  require(d >= 2, "copula statistics need dimension >= 2");
  const auto lattice = rank_lattice(s.size(), d);
  const auto Cn = empirical_copula(s, lattice);
  std::vector<double> dv(lattice->size());
  for (std::size_t node = 0; node < dv.size(); ++node) dv[node] = D(lattice->point(node));
  double best = 0.0;
  for (std::size_t node = 0; node < dv.size(); ++node) {
    auto idx = lattice->unflatten(node);
    if (std::any_of(idx.begin(), idx.end(), [](std::size_t i) { return i == 0; })) continue;
    for (auto& i : idx) --i;
    const double c = Cn[node];
    best = std::max({best, c - dv[lattice->flatten(idx)], dv[node] - c});
  }
  return best;
}

double copula_distance(const Sample& s, const GridFunction& D) {
  const auto lattice = rank_lattice(s.size(), s.dimension());
  require(*D.domain() == *lattice, "tabulated copula must live on the rank lattice");
  const auto Cn = empirical_copula(s, lattice);
  return (Cn - D).sup_norm();
}

StatResult copula_stat_Tn(const Sample& s, const Copula& D, double reference) {
  require(s.dimension() == D.dimension(), "sample and copula dimensions differ");
  const double raw = copula_distance(s, [&D](std::span<const double> u) { return D(u); });
  return make_result(raw, reference, std::sqrt(static_cast<double>(s.size())), s.size(), 0, "copula-tn");
}

double copula_symmetry_distance(const Sample& s) {
  require(s.dimension() == 2, "radial symmetry statistic needs a bivariate sample");
  // n C_n(i/n, j/n) = #{k : r_k <= i, s_k <= j}, so the comparison with the
  // survival copula n (i/n + j/n - 1) + n C_n(1 - i/n, 1 - j/n) is exact in integers.
  const std::size_t n = s.size();
  const std::size_t m = n + 1;
  const auto r = min_ranks(s.column(0));
  const auto q = min_ranks(s.column(1));
  std::vector<std::int64_t> count(m * m, 0);
  for (std::size_t k = 0; k < n; ++k) ++count[r[k] * m + q[k]];
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 1; j < m; ++j) count[i * m + j] += count[i * m + j - 1];
  }
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) count[i * m + j] += count[(i - 1) * m + j];
  }
  const auto nn = static_cast<std::int64_t>(n);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<std::int64_t>(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<std::int64_t>(j);
      const std::int64_t diff = count[i * m + j] - (ii + jj - nn) - count[(n - i) * m + (n - j)];
      best = std::max(best, diff < 0 ? -diff : diff);
    }
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

StatResult copula_symmetry_stat(const Sample& s, double reference) {
  const double raw = copula_symmetry_distance(s);
  return make_result(raw, reference, std::sqrt(static_cast<double>(s.size())), s.size(), 0, "copula-symmetry");
}

double copula_asymmetry(const Copula& C, std::size_t points) {
  require(C.dimension() == 2, "radial asymmetry is defined for bivariate copulas");
  require(points >= 2, "grid needs at least two points");
  const double h = 1.0 / static_cast<double>(points - 1);
  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) * h;
    for (std::size_t j = 0; j < points; ++j) {
      const double v = static_cast<double>(j) * h;
      best = std::max(best, std::abs(C(u, v) - (u + v - 1.0 + C(1.0 - u, 1.0 - v))));
    }
  }
  return best;
}

double kl_bernoulli(double x, double y) {
  require(y > 0.0 && y < 1.0, "K(x, y) needs y in (0, 1)");
  require(x >= 0.0 && x <= 1.0, "K(x, y) needs x in [0, 1]");
  double k = 0.0;
  if (x > 0.0) k += x * std::log(x / y);
  if (x < 1.0) k += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return std::max(k, 0.0);
}

double kl_bernoulli_extended(double x, double y) {
  if (y <= 0.0) return x <= 0.0 ? 0.0 : kInf;
  if (y >= 1.0) return x >= 1.0 ? 0.0 : kInf;
  return kl_bernoulli(x, y);
}

double berk_jones_R(const Sample& s, const UnivariateCdf& G) {
  require(s.dimension() == 1, "Berk-Jones statistic needs a univariate sample");
  const auto sorted = sorted_column(s);
  const auto z = unique_sorted(sorted);
  const double n = static_cast<double>(sorted.size());
  double best = 0.0;
  for (std::size_t j = 0; j <= z.size(); ++j) {
    const double level = j == 0 ? 0.0 : count_le(sorted, z[j - 1]) / n;
    const double lower = j == 0 ? 0.0 : G.cdf(z[j - 1]);
    const double upper = j == z.size() ? 1.0 : G.left_limit(z[j]);
    best = std::max({best, kl_bernoulli_extended(level, lower), kl_bernoulli_extended(level, upper)});
  }
  return best;
}

double berk_jones_dn(std::size_t n, double loglog_sign) {
  require(n >= 16, "d_n needs n >= 16");
  const double l2 = std::log(std::log(static_cast<double>(n)));
  return l2 + loglog_sign * 0.5 * std::log(l2) - 0.5 * std::log(4.0 * std::numbers::pi);
}

double berk_jones_null_centered(const Sample& s, const UnivariateCdf& F, double loglog_sign) {
  const double dn = berk_jones_dn(s.size(), loglog_sign);
  return static_cast<double>(s.size()) * berk_jones_R(s, F) - dn;
}

StatResult berk_jones_Bn(const Sample& s, const UnivariateCdf& G, double reference) {
  return make_result(berk_jones_R(s, G), reference, std::sqrt(static_cast<double>(s.size())), s.size(), 0,
                     "berk-jones");
}

Maximizer berk_jones_maximizer(const UnivariateCdf& F, const UnivariateCdf& G, std::size_t points) {
  require(points >= 3, "reference grid needs at least three points");
  auto objective = [&](double u) {
    const double x = F.quantile(u);
    return kl_bernoulli_extended(F.cdf(x), G.cdf(x));
  };
  const double h = 1.0 / static_cast<double>(points);
  Maximizer best{.x = F.quantile(0.5 * h), .value = 0.0};
  std::size_t arg = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double k = objective((static_cast<double>(i) + 0.5) * h);
    if (k > best.value) {
      best.value = k;
      arg = i;
    }
  }
  best.x = F.quantile((static_cast<double>(arg) + 0.5) * h);
  if (!std::isfinite(best.value)) return best;
  const double lo = std::max(static_cast<double>(arg) - 0.5, 0.5) * h;
  const double hi = std::min(static_cast<double>(arg) + 1.5, static_cast<double>(points) - 0.5) * h;
  const auto polished = boost::math::tools::brent_find_minima([&](double u) { return -objective(u); }, lo, hi, 50);
  if (-polished.second > best.value) {
    best.value = -polished.second;
    best.x = F.quantile(polished.first);
  }
  return best;
}

double berk_jones_reference(const UnivariateCdf& F, const UnivariateCdf& G, std::size_t points) {
  return berk_jones_maximizer(F, G, points).value;
}

FiniteFunctionClass::FiniteFunctionClass(std::vector<Member> members, bool symmetric)
    : members_(std::move(members)), symmetric_(symmetric) {
  require(!members_.empty(), "function class needs at least one member");
  for (const auto& f : members_) {
    require(std::isfinite(f.a), "member location must be finite");
    if (f.shape == Shape::ramp) require(std::isfinite(f.b) && f.b > f.a, "ramp needs a < b");
  }
}

FiniteFunctionClass FiniteFunctionClass::indicators(std::vector<double> thresholds, bool symmetric) {
  std::vector<Member> members;
  members.reserve(thresholds.size());
  for (double t : thresholds) members.push_back({Shape::indicator, t, t, false});
  return {std::move(members), symmetric};
}

double FiniteFunctionClass::evaluate(std::size_t k, double x) const {
  const auto& f = members_.at(k);
  double v = 0.0;
  if (f.shape == Shape::indicator) {
    v = x <= f.a ? 1.0 : 0.0;
  } else {
    v = std::clamp((x - f.a) / (f.b - f.a), 0.0, 1.0);
  }
  return f.decreasing ? 1.0 - v : v;
}

Eigen::MatrixXd FiniteFunctionClass::evaluate(const Sample& s) const {
  require(s.dimension() == 1, "function classes act on univariate samples");
  const auto n = static_cast<Eigen::Index>(s.size());
  const auto K = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd out(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s(static_cast<std::size_t>(i), 0);
    for (Eigen::Index k = 0; k < K; ++k) out(i, k) = evaluate(static_cast<std::size_t>(k), x);
  }
  return out;
}

Eigen::VectorXd FiniteFunctionClass::means(const UnivariateCdf& P) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k) {
    const auto& f = members_[k];
    if (f.shape == Shape::indicator) {
      const auto [lo, hi] = indicator_interval(f);
      out(static_cast<Eigen::Index>(k)) = interval_mass(P, lo, hi);
    } else {
      out(static_cast<Eigen::Index>(k)) = expectation(P, [&](double x) { return evaluate(k, x); }, kinks(f));
    }
  }
  return out;
}

Eigen::MatrixXd FiniteFunctionClass::covariance(const UnivariateCdf& P) const {
  const auto mu = means(P);
  const auto K = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd S(K, K);
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = 0; k <= j; ++k) {
      const auto& fj = members_[j];
      const auto& fk = members_[k];
      double second = 0.0;
      if (fj.shape == Shape::indicator && fk.shape == Shape::indicator) {
        const auto [lj, hj] = indicator_interval(fj);
        const auto [lk, hk] = indicator_interval(fk);
        second = interval_mass(P, std::max(lj, lk), std::min(hj, hk));
      } else {
        auto points = kinks(fj);
        const auto more = kinks(fk);
        points.insert(points.end(), more.begin(), more.end());
        second = expectation(P, [&](double x) { return evaluate(j, x) * evaluate(k, x); }, points);
      }
      const auto a = static_cast<Eigen::Index>(j);
      const auto b = static_cast<Eigen::Index>(k);
      S(a, b) = S(b, a) = second - mu(a) * mu(b);
    }
  }
  return S;
}

double FiniteFunctionClass::population_mmd(const UnivariateCdf& P, const UnivariateCdf& Q) const {
  const Eigen::VectorXd gaps = means(P) - means(Q);
  return symmetric_ ? gaps.cwiseAbs().maxCoeff() : gaps.maxCoeff();
}

MmdResult mmd_finite(const Eigen::MatrixXd& evals_x, const Eigen::MatrixXd& evals_y, bool symmetric) {
  require(evals_x.cols() == evals_y.cols(), "evaluation matrices must have the same columns");
  require(evals_x.cols() >= 1, "function class must be non-empty");
  require(evals_x.rows() >= 1 && evals_y.rows() >= 1, "samples must be non-empty");
  const Eigen::VectorXd gaps = evals_x.colwise().mean().transpose() - evals_y.colwise().mean().transpose();
  MmdResult out;
  out.gaps.assign(gaps.data(), gaps.data() + gaps.size());
  Eigen::Index arg = 0;
  out.value = symmetric ? gaps.cwiseAbs().maxCoeff(&arg) : gaps.maxCoeff(&arg);
  out.argmax = static_cast<std::size_t>(arg);
  return out;
}

StatResult mmd_statistic(const Sample& sx, const Sample& sy, const FiniteFunctionClass& cls, double reference) {
  const auto r = mmd_finite(cls.evaluate(sx), cls.evaluate(sy), cls.symmetric());
  return make_result(r.value, reference, two_sample_scale(sx.size(), sy.size()), sx.size(), sy.size(), "mmd-finite");
}

double kernel_mmd(const Sample& sx, const Sample& sy, Kernel kernel) {
  require(sx.dimension() == sy.dimension(), "samples must share a dimension");
  require(kernel.parameter > 0.0 && std::isfinite(kernel.parameter), "kernel bandwidth must be positive");
  auto k = [&](std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    if (kernel.type == Kernel::Type::gaussian) return std::exp(-sq / (2.0 * kernel.parameter * kernel.parameter));
    return std::exp(-std::sqrt(sq) / kernel.parameter);
  };
  auto mean_kernel = [&](const Sample& a, const Sample& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) total += k(a.row(i), b.row(j));
    }
    return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  };
  const double v = mean_kernel(sx, sx) - 2.0 * mean_kernel(sx, sy) + mean_kernel(sy, sy);
  return std::sqrt(std::max(v, 0.0));
}

}  // namespace supdiff
