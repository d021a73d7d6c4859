#include "supdiff/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include "supdiff/error.hpp"

namespace supdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void validate(const UnivariateCdf::Family& family) {
  std::visit(overloaded{
                 [](const UnivariateCdf::Uniform& f) {
                   require(std::isfinite(f.lo) && std::isfinite(f.hi) && f.lo < f.hi,
                           "uniform needs finite lo < hi");
                 },
                 [](const UnivariateCdf::Normal& f) {
                   require(std::isfinite(f.mean) && f.sd > 0.0, "normal needs finite mean and sd > 0");
                 },
                 [](const UnivariateCdf::Beta& f) { require(f.a > 0.0 && f.b > 0.0, "beta needs a, b > 0"); },
                 [](const UnivariateCdf::Power& f) { require(f.theta > 0.0, "power needs theta > 0"); },
                 [](const UnivariateCdf::Table& t) {
                   require(t.x.size() >= 1 && t.x.size() == t.F.size(), "table needs matching x and F arrays");
                   for (std::size_t i = 0; i < t.x.size(); ++i) {
                     require(std::isfinite(t.x[i]), "table abscissae must be finite");
                     require(t.F[i] >= 0.0 && t.F[i] <= 1.0, "table values must lie in [0, 1]");
                     if (i > 0) {
                       require(t.x[i - 1] < t.x[i], "table abscissae must be strictly increasing");
                       require(t.F[i - 1] <= t.F[i], "table values must be non-decreasing");
                     }
                   }
                   require(t.F.back() == 1.0, "table must reach 1 at its last abscissa");
                   if (!t.step) {
                     require(t.x.size() >= 2 && t.F.front() == 0.0,
                             "linear table must start at 0 and have at least 2 abscissae");
                   }
                 },
             },
             family);
}

// Index of the last abscissa <= x, or -1.
std::ptrdiff_t table_floor(const std::vector<double>& xs, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  return static_cast<std::ptrdiff_t>(it - xs.begin()) - 1;
}

double table_cdf(const UnivariateCdf::Table& t, double x) {
  const auto k = table_floor(t.x, x);
  if (k < 0) return 0.0;
  const auto i = static_cast<std::size_t>(k);
  if (t.step || i + 1 == t.x.size()) return t.F[i];
  const double w = (x - t.x[i]) / (t.x[i + 1] - t.x[i]);
  return t.F[i] + w * (t.F[i + 1] - t.F[i]);
}

double table_left_limit(const UnivariateCdf::Table& t, double x) {
  if (!t.step) return table_cdf(t, x);
  const auto it = std::lower_bound(t.x.begin(), t.x.end(), x);
  if (it == t.x.begin()) return 0.0;
  return t.F[static_cast<std::size_t>(it - t.x.begin()) - 1];
}

}  // namespace

Sample::Sample(std::size_t dimension, std::vector<double> data) : d_(dimension), data_(std::move(data)) {
  require(d_ >= 1, "sample dimension must be at least 1");
  require(data_.size() % d_ == 0, "sample data size must be a multiple of the dimension");
  n_ = data_.size() / d_;
  require(n_ >= 1, "sample must hold at least one observation");
  for (double x : data_) require(std::isfinite(x), "sample entries must be finite");
}

Sample Sample::univariate(std::vector<double> values) { return Sample(1, std::move(values)); }

std::vector<double> Sample::column(std::size_t k) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = data_[i * d_ + k];
  return out;
}

Sample read_sample_csv(std::istream& in) {
  std::string line;
  std::vector<double> data;
  std::size_t d = 0;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      require(first, "non-numeric entry on CSV line " + std::to_string(line_no));
      first = false;
      continue;
    }
    first = false;
    if (d == 0) d = row.size();
    require(row.size() == d, "inconsistent column count on CSV line " + std::to_string(line_no));
    data.insert(data.end(), row.begin(), row.end());
  }
  require(d > 0, "CSV sample is empty");
  return Sample(d, std::move(data));
}

Sample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open sample file " + path);
  return read_sample_csv(in);
}

UnivariateCdf::UnivariateCdf(Family family) : family_(std::move(family)) { validate(family_); }

std::string UnivariateCdf::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Uniform& f) { os << "uniform(" << f.lo << "," << f.hi << ")"; },
                 [&](const Normal& f) { os << "normal(" << f.mean << "," << f.sd << ")"; },
                 [&](const Beta& f) { os << "beta(" << f.a << "," << f.b << ")"; },
                 [&](const Power& f) { os << "power(" << f.theta << ")"; },
                 [&](const Table& t) { os << (t.step ? "step-table(" : "table(") << t.x.size() << ")"; },
             },
             family_);
  return os.str();
}

double UnivariateCdf::cdf(double x) const {
  if (std::isnan(x)) throw ValidationError("cdf evaluated at NaN");
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  return std::visit(overloaded{
                        [x](const Uniform& f) { return clamp01((x - f.lo) / (f.hi - f.lo)); },
                        [x](const Normal& f) { return 0.5 * std::erfc(-(x - f.mean) / (f.sd * std::sqrt(2.0))); },
                        [x](const Beta& f) {
                          if (x <= 0.0) return 0.0;
                          if (x >= 1.0) return 1.0;
                          return boost::math::ibeta(f.a, f.b, x);
                        },
                        [x](const Power& f) {
                          if (x <= 0.0) return 0.0;
                          if (x >= 1.0) return 1.0;
                          return std::pow(x, f.theta);
                        },
                        [x](const Table& t) { return table_cdf(t, x); },
                    },
                    family_);
}

double UnivariateCdf::left_limit(double x) const {
  if (const auto* t = std::get_if<Table>(&family_)) {
    if (x == -kInf) return 0.0;
    if (x == kInf) return 1.0;
    return table_left_limit(*t, x);
  }
  if (x == kInf) return 1.0;
  return cdf(x);
}

double UnivariateCdf::pdf(double x) const {
  if (!std::isfinite(x)) return 0.0;
  return std::visit(overloaded{
                        [x](const Uniform& f) { return (x >= f.lo && x <= f.hi) ? 1.0 / (f.hi - f.lo) : 0.0; },
                        [x](const Normal& f) {
                          const double z = (x - f.mean) / f.sd;
                          return std::exp(-0.5 * z * z) / (f.sd * std::sqrt(2.0 * M_PI));
                        },
                        [x](const Beta& f) {
                          if (x <= 0.0 || x >= 1.0) return 0.0;
                          return boost::math::pdf(boost::math::beta_distribution<>(f.a, f.b), x);
                        },
                        [x](const Power& f) {
                          if (x <= 0.0 || x >= 1.0) return 0.0;
                          return f.theta * std::pow(x, f.theta - 1.0);
                        },
                        [x](const Table& t) {
                          if (t.step) return 0.0;
                          const auto k = table_floor(t.x, x);
                          if (k < 0 || static_cast<std::size_t>(k) + 1 >= t.x.size()) return 0.0;
                          const auto i = static_cast<std::size_t>(k);
                          return (t.F[i + 1] - t.F[i]) / (t.x[i + 1] - t.x[i]);
                        },
                    },
                    family_);
}

double UnivariateCdf::quantile(double u) const {
  require(u >= 0.0 && u <= 1.0, "quantile level must lie in [0, 1]");
  return std::visit(overloaded{
                        [u](const Uniform& f) { return f.lo + u * (f.hi - f.lo); },
                        [u](const Normal& f) {
                          if (u == 0.0) return -kInf;
                          if (u == 1.0) return kInf;
                          return boost::math::quantile(boost::math::normal_distribution<>(f.mean, f.sd), u);
                        },
                        [u](const Beta& f) {
                          if (u == 0.0) return 0.0;
                          if (u == 1.0) return 1.0;
                          return boost::math::ibeta_inv(f.a, f.b, u);
                        },
                        [u](const Power& f) { return std::pow(u, 1.0 / f.theta); },
                        [u](const Table& t) {
                          if (u == 0.0) return t.step ? -kInf : t.x.front();
                          const auto it = std::lower_bound(t.F.begin(), t.F.end(), u);
                          const auto i = static_cast<std::size_t>(it - t.F.begin());
                          if (t.step || i == 0) return t.x[i];
                          const double w = (u - t.F[i - 1]) / (t.F[i] - t.F[i - 1]);
                          return t.x[i - 1] + w * (t.x[i] - t.x[i - 1]);
                        },
                    },
                    family_);
}

std::vector<double> UnivariateCdf::atoms() const {
  std::vector<double> out;
  if (const auto* t = std::get_if<Table>(&family_); t != nullptr && t->step) {
    double prev = 0.0;
    for (std::size_t i = 0; i < t->x.size(); ++i) {
      if (t->F[i] > prev) out.push_back(t->x[i]);
      prev = t->F[i];
    }
  }
  return out;
}

bool UnivariateCdf::continuous() const { return atoms().empty(); }

std::pair<double, double> UnivariateCdf::support() const {
  return std::visit(overloaded{
                        [](const Uniform& f) { return std::pair{f.lo, f.hi}; },
                        [](const Normal&) { return std::pair{-kInf, kInf}; },
                        [](const Beta&) { return std::pair{0.0, 1.0}; },
                        [](const Power&) { return std::pair{0.0, 1.0}; },
                        [](const Table& t) { return std::pair{t.x.front(), t.x.back()}; },
                    },
                    family_);
}

double UnivariateCdf::draw(Engine& engine) const {
  return std::visit(overloaded{
                        [&](const Normal& f) {
                          std::normal_distribution<double> dist(f.mean, f.sd);
                          return dist(engine);
                        },
                        [&](const Beta& f) {
                          std::gamma_distribution<double> ga(f.a, 1.0);
                          std::gamma_distribution<double> gb(f.b, 1.0);
                          const double x = ga(engine);
                          const double y = gb(engine);
                          return x / (x + y);
                        },
                        [&](const auto&) { return quantile(open_uniform(engine)); },
                    },
                    family_);
}

Copula::Copula(Family family, double theta, std::size_t dimension)
    : family_(family), theta_(theta), dimension_(dimension) {
  require(dimension_ >= 2, "copula dimension must be at least 2");
}

Copula Copula::clayton(double theta) {
  require(theta > 0.0 && std::isfinite(theta), "Clayton copula needs theta > 0");
  return Copula(Family::clayton, theta, 2);
}

std::string Copula::name() const {
  switch (family_) {
    case Family::independence:
      return "independence";
    case Family::clayton: {
      std::ostringstream os;
      os << "clayton(" << theta_ << ")";
      return os.str();
    }
    case Family::comonotone:
      return "comonotone";
  }
  return "?";
}

double Copula::operator()(double u, double v) const {
  const double w[2] = {u, v};
  return (*this)(std::span<const double>(w, 2));
}

double Copula::operator()(std::span<const double> u) const {
  require(u.size() == dimension_, "copula argument has the wrong dimension");
  for (double x : u) {
    if (x <= 0.0) return 0.0;
  }
  switch (family_) {
    case Family::independence: {
      double p = 1.0;
      for (double x : u) p *= std::min(x, 1.0);
      return p;
    }
    case Family::comonotone:
      return std::min(1.0, *std::min_element(u.begin(), u.end()));
    case Family::clayton: {
      const double a = std::min(u[0], 1.0);
      const double b = std::min(u[1], 1.0);
      const double s = std::pow(a, -theta_) + std::pow(b, -theta_) - 1.0;
      return std::min({std::pow(s, -1.0 / theta_), a, b});
    }
  }
  return 0.0;
}

std::vector<double> Copula::draw(Engine& engine) const {
  std::vector<double> u(dimension_);
  switch (family_) {
    case Family::independence:
      for (double& x : u) x = open_uniform(engine);
      break;
    case Family::comonotone:
      u[0] = u[1] = open_uniform(engine);
      break;
    case Family::clayton: {
      // Conditional inversion of dC/du(v | u).
      u[0] = open_uniform(engine);
      const double w = open_uniform(engine);
      const double t = theta_;
      u[1] = std::pow(std::pow(u[0], -t) * (std::pow(w, -t / (1.0 + t)) - 1.0) + 1.0, -1.0 / t);
      break;
    }
  }
  return u;
}

JointCdf::JointCdf(Copula copula, std::vector<UnivariateCdf> marginals)
    : copula_(std::move(copula)), marginals_(std::move(marginals)) {
  require(copula_.dimension() == marginals_.size(), "copula and marginal counts differ");
}

double JointCdf::operator()(std::span<const double> x) const {
  require(x.size() == marginals_.size(), "joint cdf argument has the wrong dimension");
  std::vector<double> u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) u[k] = marginals_[k].cdf(x[k]);
  return copula_(u);
}

std::vector<double> JointCdf::draw(Engine& engine) const {
  auto u = copula_.draw(engine);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = marginals_[k].quantile(u[k]);
  return u;
}

Sample draw_sample(const UnivariateCdf& F, std::size_t n, Engine& engine) {
  std::vector<double> x(n);
  for (double& v : x) v = F.draw(engine);
  return Sample::univariate(std::move(x));
}

Sample draw_sample(const Copula& C, std::size_t n, Engine& engine) {
  std::vector<double> data;
  data.reserve(n * C.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = C.draw(engine);
    data.insert(data.end(), u.begin(), u.end());
  }
  return Sample(C.dimension(), std::move(data));
}

Sample draw_sample(const JointCdf& F, std::size_t n, Engine& engine) {
  std::vector<double> data;
  data.reserve(n * F.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = F.draw(engine);
    data.insert(data.end(), x.begin(), x.end());
  }
  return Sample(F.dimension(), std::move(data));
}

}  // namespace supdiff
