#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "supdiff/random.hpp"

namespace supdiff {

/// n observations of a d-dimensional random vector, stored row-major.
class Sample {
 public:
  Sample(std::size_t dimension, std::vector<double> data);
  static Sample univariate(std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return d_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }
  double operator()(std::size_t i, std::size_t k) const { return data_[i * d_ + k]; }
  std::vector<double> column(std::size_t k) const;
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t d_;
  std::size_t n_;
  std::vector<double> data_;
};

/// Reads one observation per line, comma separated. A first line that does
/// not parse as numbers is treated as a header.
Sample read_sample_csv(std::istream& in);
Sample read_sample_csv(const std::string& path);

/// Univariate distribution function given by a named family or a table.
class UnivariateCdf {
 public:
  struct Uniform {
    double lo = 0.0, hi = 1.0;
    bool operator==(const Uniform&) const = default;
  };
  struct Normal {
    double mean = 0.0, sd = 1.0;
    bool operator==(const Normal&) const = default;
  };
  struct Beta {
    double a = 1.0, b = 1.0;
    bool operator==(const Beta&) const = default;
  };
  /// F(x) = x^theta on [0, 1].
  struct Power {
    double theta = 1.0;
    bool operator==(const Power&) const = default;
  };
  /// Tabulated F at increasing abscissae; below the first abscissa F = 0,
  /// from the last one on F = 1. Between abscissae F is either linearly
  /// interpolated or held constant (a step function with atoms at the
  /// abscissae).
  struct Table {
    std::vector<double> x;
    std::vector<double> F;
    bool step = false;
    bool operator==(const Table&) const = default;
  };
  using Family = std::variant<Uniform, Normal, Beta, Power, Table>;

  UnivariateCdf(Family family);  // NOLINT(google-explicit-constructor)
  static UnivariateCdf uniform(double lo = 0.0, double hi = 1.0) { return UnivariateCdf(Family{Uniform{lo, hi}}); }
  static UnivariateCdf normal(double mean = 0.0, double sd = 1.0) { return UnivariateCdf(Family{Normal{mean, sd}}); }
  static UnivariateCdf beta(double a, double b) { return UnivariateCdf(Family{Beta{a, b}}); }
  static UnivariateCdf power(double theta) { return UnivariateCdf(Family{Power{theta}}); }

  const Family& family() const noexcept { return family_; }
  std::string name() const;

  double operator()(double x) const { return cdf(x); }
  double cdf(double x) const;
  /// F(x-).
  double left_limit(double x) const;
  /// Density; zero for step tables.
  double pdf(double x) const;
  /// Generalized inverse inf{x : F(x) >= u}.
  double quantile(double u) const;
  /// Jump locations (non-empty only for step tables).
  std::vector<double> atoms() const;
  bool continuous() const;
  /// Smallest interval carrying all mass (may be infinite).
  std::pair<double, double> support() const;

  double draw(Engine& engine) const;

  bool operator==(const UnivariateCdf&) const = default;

 private:
  Family family_;
};

/// Bivariate (or, for independence, d-variate) copula.
class Copula {
 public:
  enum class Family { independence, clayton, comonotone };

  static Copula independence(std::size_t dimension = 2) { return Copula(Family::independence, 0.0, dimension); }
  /// Clayton copula (u^-theta + v^-theta - 1)^(-1/theta), theta > 0.
  static Copula clayton(double theta);
  /// Upper Frechet bound min(u, v).
  static Copula comonotone() { return Copula(Family::comonotone, 0.0, 2); }

  Family family() const noexcept { return family_; }
  double theta() const noexcept { return theta_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::string name() const;

  double operator()(std::span<const double> u) const;
  double operator()(double u, double v) const;

  /// One draw of the uniform-marginal random vector.
  std::vector<double> draw(Engine& engine) const;

  bool operator==(const Copula&) const = default;

 private:
  Copula(Family family, double theta, std::size_t dimension);

  Family family_;
  double theta_;
  std::size_t dimension_;
};

/// d-variate distribution function C(F_1(x_1), ..., F_d(x_d)).
class JointCdf {
 public:
  JointCdf(Copula copula, std::vector<UnivariateCdf> marginals);

  std::size_t dimension() const noexcept { return marginals_.size(); }
  const Copula& copula() const noexcept { return copula_; }
  const std::vector<UnivariateCdf>& marginals() const noexcept { return marginals_; }

  double operator()(std::span<const double> x) const;
  std::vector<double> draw(Engine& engine) const;

 private:
  Copula copula_;
  std::vector<UnivariateCdf> marginals_;
};

Sample draw_sample(const UnivariateCdf& F, std::size_t n, Engine& engine);
Sample draw_sample(const Copula& C, std::size_t n, Engine& engine);
Sample draw_sample(const JointCdf& F, std::size_t n, Engine& engine);

}  // namespace supdiff
