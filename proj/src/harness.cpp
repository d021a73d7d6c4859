#include "supdiff/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/minima.hpp>

#include "supdiff/empirical.hpp"
#include "supdiff/error.hpp"
#include "supdiff/limits.hpp"
#include "supdiff/parallel.hpp"
#include "supdiff/random.hpp"

#ifndef SUPDIFF_VERSION
#define SUPDIFF_VERSION "0.0.0"
#endif

namespace supdiff {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultLineGrid = 2000;
constexpr std::size_t kDefaultCopulaGrid = 60;
constexpr double kDefaultMmdTolerance = 1e-9;
// Extremal-set tolerance for analytic q: ties that only rounding separates stay tied.
constexpr double kDefaultTieTolerance = 1e-12;
constexpr std::size_t kDenseGridPoints = 100000;
constexpr std::size_t kCopulaOracleGrid = 400;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ValidationError("config field '" + field + "': " + what);
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    field_error(where.empty() ? key : where + "." + key, j.contains(key) ? "wrong type" : "missing");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get_field<T>(j, key, where);
}

bool needs_two_samples(ExperimentKind k) { return k == ExperimentKind::ks2 || k == ExperimentKind::mmd_finite; }

FunctionalKind effective_functional(const ExperimentConfig& c) {
  return c.experiment == ExperimentKind::kuiper ? FunctionalKind::amplitude : c.functional;
}

std::size_t effective_grid(const ExperimentConfig& c) {
  if (c.grid_size != 0) return c.grid_size;
  const bool copula = c.experiment == ExperimentKind::copula_tn || c.experiment == ExperimentKind::copula_symmetry;
  return copula ? kDefaultCopulaGrid : kDefaultLineGrid;
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

// sup and inf of F - G over the line.
Extremes cdf_difference_extremes(const UnivariateCdf& F, const UnivariateCdf& G, std::string& provenance) {
  const auto* nf = std::get_if<UnivariateCdf::Normal>(&F.family());
  const auto* ng = std::get_if<UnivariateCdf::Normal>(&G.family());
  if (nf != nullptr && ng != nullptr && nf->sd == ng->sd) {
    provenance = "analytic";
    const double half = (ng->mean - nf->mean) / (2.0 * nf->sd);
    const double gap = normal_cdf(std::abs(half)) - normal_cdf(-std::abs(half));
    return half >= 0.0 ? Extremes{.sup = gap, .inf = 0.0} : Extremes{.sup = 0.0, .inf = -gap};
  }
  provenance = "dense-grid oracle";
  std::vector<double> x;
  for (std::size_t i = 0; i < kDenseGridPoints; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(kDenseGridPoints);
    x.push_back(F.quantile(u));
    x.push_back(G.quantile(u));
  }
  for (double a : F.atoms()) x.push_back(a);
  for (double a : G.atoms()) x.push_back(a);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  Extremes e;
  std::size_t arg_sup = 0, arg_inf = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = F.cdf(x[i]) - G.cdf(x[i]);
    const double l = F.left_limit(x[i]) - G.left_limit(x[i]);
    if (std::max(v, l) > e.sup) {
      e.sup = std::max(v, l);
      arg_sup = i;
    }
    if (std::min(v, l) < e.inf) {
      e.inf = std::min(v, l);
      arg_inf = i;
    }
  }
  auto polish = [&](std::size_t i, double sign) {
    const double lo = x[i == 0 ? 0 : i - 1];
    const double hi = x[std::min(i + 1, x.size() - 1)];
    if (!(hi > lo)) return 0.0;
    const auto r = boost::math::tools::brent_find_minima(
        [&](double t) { return -sign * (F.cdf(t) - G.cdf(t)); }, lo, hi, 50);
    return -r.second;
  };
  e.sup = std::max(e.sup, polish(arg_sup, 1.0));
  e.inf = std::min(e.inf, -polish(arg_inf, -1.0));
  return e;
}

double copula_sup_distance(const Copula& C, const Copula& D, std::size_t points) {
  const double h = 1.0 / static_cast<double>(points - 1);
  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      const double u = static_cast<double>(i) * h;
      const double v = static_cast<double>(j) * h;
      best = std::max(best, std::abs(C(u, v) - D(u, v)));
    }
  }
  return best;
}

// Compactified line through F-quantiles and the atoms of F and G.
DomainPtr quantile_line(const UnivariateCdf& F, const UnivariateCdf& G, std::size_t nodes) {
  const std::size_t interior = std::max<std::size_t>(nodes, 3) - 2;
  std::vector<double> x;
  for (std::size_t i = 0; i < interior; ++i) {
    x.push_back(F.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(interior)));
  }
  for (double a : F.atoms()) x.push_back(a);
  for (double a : G.atoms()) x.push_back(a);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  return share(GridDomain::compactified_line(std::move(x)));
}

DomainPtr unit_lattice(std::size_t points) {
  const auto axis = GridDomain::linspace(0.0, 1.0, points);
  return share(GridDomain::lattice({axis, axis}));
}

std::vector<double> finite_n_quotients(const LimitSpec& spec, double t, std::size_t count, std::size_t threads) {
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto g = apply_transform(spec.transform, spec.sampler.sample(i));
    out[i] = difference_quotient(spec.kind, spec.q, g, t);
  });
  return out;
}

json summary_json(const Summary& s) {
  json q = json::object();
  for (std::size_t k = 0; k < kSummaryLevels.size(); ++k) {
    char name[8];
    std::snprintf(name, sizeof name, "q%02d", static_cast<int>(std::lround(kSummaryLevels[k] * 100)));
    q[name] = s.quantiles[k];
  }
  return json{{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}, {"quantiles", q}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string replicate_csv(const std::vector<double>& values) {
  std::string s = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) s += std::to_string(i) + "," + format_double(values[i]) + "\n";
  return s;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ks1:
      return "ks1";
    case ExperimentKind::ks2:
      return "ks2";
    case ExperimentKind::kuiper:
      return "kuiper";
    case ExperimentKind::copula_tn:
      return "copula-tn";
    case ExperimentKind::copula_symmetry:
      return "copula-symmetry";
    case ExperimentKind::berk_jones:
      return "berk-jones";
    case ExperimentKind::berk_jones_null:
      return "berk-jones-null";
    case ExperimentKind::mmd_finite:
      return "mmd-finite";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::ks1, ExperimentKind::ks2, ExperimentKind::kuiper, ExperimentKind::copula_tn,
                 ExperimentKind::copula_symmetry, ExperimentKind::berk_jones, ExperimentKind::berk_jones_null,
                 ExperimentKind::mmd_finite}) {
    if (to_string(k) == name) return k;
  }
  field_error("experiment", "unknown experiment '" + name + "'");
}

json to_json(const UnivariateCdf& F) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, UnivariateCdf::Uniform>) {
          return {{"family", "uniform"}, {"lo", f.lo}, {"hi", f.hi}};
        } else if constexpr (std::is_same_v<T, UnivariateCdf::Normal>) {
          return {{"family", "normal"}, {"mean", f.mean}, {"sd", f.sd}};
        } else if constexpr (std::is_same_v<T, UnivariateCdf::Beta>) {
          return {{"family", "beta"}, {"a", f.a}, {"b", f.b}};
        } else if constexpr (std::is_same_v<T, UnivariateCdf::Power>) {
          return {{"family", "power"}, {"theta", f.theta}};
        } else {
          return {{"family", "table"}, {"x", f.x}, {"F", f.F}, {"step", f.step}};
        }
      },
      F.family());
}

UnivariateCdf cdf_from_json(const json& j) {
  require(j.is_object(), "distribution must be a JSON object");
  const auto family = get_field<std::string>(j, "family", "distribution");
  if (family == "uniform") {
    return UnivariateCdf::uniform(get_or(j, "lo", 0.0, family), get_or(j, "hi", 1.0, family));
  }
  if (family == "normal") {
    return UnivariateCdf::normal(get_or(j, "mean", 0.0, family), get_or(j, "sd", 1.0, family));
  }
  if (family == "beta") return UnivariateCdf::beta(get_field<double>(j, "a", family), get_field<double>(j, "b", family));
  if (family == "power") return UnivariateCdf::power(get_field<double>(j, "theta", family));
  if (family == "table") {
    return UnivariateCdf(UnivariateCdf::Table{get_field<std::vector<double>>(j, "x", family),
                                              get_field<std::vector<double>>(j, "F", family),
                                              get_or(j, "step", false, family)});
  }
  throw ValidationError("unknown distribution family '" + family + "'");
}

json to_json(const Copula& C) {
  switch (C.family()) {
    case Copula::Family::independence:
      return {{"family", "independence"}, {"dimension", C.dimension()}};
    case Copula::Family::clayton:
      return {{"family", "clayton"}, {"theta", C.theta()}};
    case Copula::Family::comonotone:
      return {{"family", "comonotone"}};
  }
  return {};
}

Copula copula_from_json(const json& j) {
  require(j.is_object(), "copula must be a JSON object");
  const auto family = get_field<std::string>(j, "family", "copula");
  if (family == "independence") return Copula::independence(get_or<std::size_t>(j, "dimension", 2, family));
  if (family == "clayton") return Copula::clayton(get_field<double>(j, "theta", family));
  if (family == "comonotone") return Copula::comonotone();
  throw ValidationError("unknown copula family '" + family + "'");
}

json to_json(const FiniteFunctionClass& cls) {
  json members = json::array();
  for (const auto& f : cls.members()) {
    json m{{"shape", f.shape == FiniteFunctionClass::Shape::indicator ? "indicator" : "ramp"}, {"a", f.a}};
    if (f.shape == FiniteFunctionClass::Shape::ramp) m["b"] = f.b;
    m["decreasing"] = f.decreasing;
    members.push_back(std::move(m));
  }
  return {{"symmetric", cls.symmetric()}, {"members", members}};
}

FiniteFunctionClass function_class_from_json(const json& j) {
  require(j.is_object(), "function_class must be a JSON object");
  const auto& members = j.at("members");
  require(members.is_array(), "function_class.members must be an array");
  std::vector<FiniteFunctionClass::Member> out;
  for (const auto& m : members) {
    const auto shape = get_field<std::string>(m, "shape", "function_class.members");
    FiniteFunctionClass::Member f;
    f.a = get_field<double>(m, "a", "function_class.members");
    f.decreasing = get_or(m, "decreasing", false, "function_class.members");
    if (shape == "indicator") {
      f.shape = FiniteFunctionClass::Shape::indicator;
      f.b = f.a;
    } else if (shape == "ramp") {
      f.shape = FiniteFunctionClass::Shape::ramp;
      f.b = get_field<double>(m, "b", "function_class.members");
    } else {
      field_error("function_class.members.shape", "unknown shape '" + shape + "'");
    }
    out.push_back(f);
  }
  return {std::move(out), get_or(j, "symmetric", false, "function_class")};
}

json to_json(const ExperimentConfig& c) {
  json j{{"experiment", to_string(c.experiment)},
         {"seed", c.seed},
         {"n", c.n},
         {"m", c.m},
         {"stat_replicates", c.stat_replicates},
         {"limit_replicates", c.limit_replicates},
         {"grid_size", c.grid_size},
         {"functional", std::string(to_string(c.functional))}};
  if (c.epsilon) j["epsilon"] = *c.epsilon;
  if (c.F) j["F"] = to_json(*c.F);
  if (c.G) j["G"] = to_json(*c.G);
  if (c.C) j["C"] = to_json(*c.C);
  if (c.D) j["D"] = to_json(*c.D);
  if (c.function_class) j["function_class"] = to_json(*c.function_class);
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  static const std::set<std::string> known{"experiment",       "seed",      "n",          "m", "stat_replicates",
                                           "limit_replicates", "grid_size", "epsilon",    "functional",
                                           "F",                "G",         "C",          "D", "function_class",
                                           "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) field_error(key, "unknown field");
  }
  ExperimentConfig c;
  c.experiment = parse_experiment_kind(get_field<std::string>(j, "experiment", ""));
  if (!j.contains("seed")) field_error("seed", "missing (a seed is mandatory)");
  c.seed = get_field<std::uint64_t>(j, "seed", "");
  c.n = get_field<std::size_t>(j, "n", "");
  c.m = get_or<std::size_t>(j, "m", 0, "");
  c.stat_replicates = get_field<std::size_t>(j, "stat_replicates", "");
  c.limit_replicates = get_field<std::size_t>(j, "limit_replicates", "");
  c.grid_size = get_or<std::size_t>(j, "grid_size", 0, "");
  if (j.contains("epsilon")) c.epsilon = get_field<double>(j, "epsilon", "");
  if (j.contains("functional")) {
    try {
      c.functional = parse_functional_kind(get_field<std::string>(j, "functional", ""));
    } catch (const ValidationError& e) {
      field_error("functional", e.what());
    }
  }
  auto sub = [&](const char* key, auto parse) {
    try {
      return parse(j.at(key));
    } catch (const ValidationError& e) {
      field_error(key, e.what());
    } catch (const json::exception& e) {
      field_error(key, e.what());
    }
  };
  if (j.contains("F")) c.F = sub("F", cdf_from_json);
  if (j.contains("G")) c.G = sub("G", cdf_from_json);
  if (j.contains("C")) c.C = sub("C", copula_from_json);
  if (j.contains("D")) c.D = sub("D", copula_from_json);
  if (j.contains("function_class")) c.function_class = sub("function_class", function_class_from_json);
  c.output_dir = get_or<std::string>(j, "output_dir", "", "");
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  if (c.n < 1) field_error("n", "must be >= 1");
  if (c.stat_replicates < 1) field_error("stat_replicates", "must be >= 1");
  if (c.limit_replicates < 1) field_error("limit_replicates", "must be >= 1");
  if (c.grid_size == 1) field_error("grid_size", "must be >= 2");
  if (c.epsilon && !(*c.epsilon >= 0.0)) field_error("epsilon", "must be non-negative");
  if (needs_two_samples(c.experiment) && c.m < 1) field_error("m", "must be >= 1 for two-sample experiments");
  auto need = [&](bool present, const char* field) {
    if (!present) field_error(field, "required for experiment " + to_string(c.experiment));
  };
  switch (c.experiment) {
    case ExperimentKind::ks1:
    case ExperimentKind::ks2:
    case ExperimentKind::kuiper:
      need(c.F.has_value(), "F");
      need(c.G.has_value(), "G");
      if (c.functional == FunctionalKind::inf) field_error("functional", "iota is not a Kolmogorov-Smirnov statistic");
      break;
    case ExperimentKind::copula_tn:
      need(c.C.has_value(), "C");
      need(c.D.has_value(), "D");
      if (c.C->dimension() != 2 || c.D->dimension() != 2) field_error("C", "copula experiments are bivariate");
      break;
    case ExperimentKind::copula_symmetry:
      need(c.C.has_value(), "C");
      if (c.C->dimension() != 2) field_error("C", "copula experiments are bivariate");
      break;
    case ExperimentKind::berk_jones:
      need(c.F.has_value(), "F");
      need(c.G.has_value(), "G");
      if (!c.F->continuous() || !c.G->continuous()) field_error("G", "Berk-Jones needs continuous F and G");
      if (*c.F == *c.G) field_error("G", "Berk-Jones alternative needs F != G");
      break;
    case ExperimentKind::berk_jones_null:
      need(c.F.has_value(), "F");
      if (!c.F->continuous()) field_error("F", "Berk-Jones needs a continuous F");
      if (c.n < 16) field_error("n", "berk-jones-null needs n >= 16");
      break;
    case ExperimentKind::mmd_finite:
      need(c.F.has_value(), "F");
      need(c.G.has_value(), "G");
      need(c.function_class.has_value(), "function_class");
      break;
  }
}

double quantile_sorted(const std::vector<double>& sorted, double level) {
  require(!sorted.empty(), "quantile of an empty set");
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < kSummaryLevels.size(); ++k) s.quantiles[k] = quantile_sorted(sorted, kSummaryLevels[k]);
  return s;
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

std::vector<std::pair<double, double>> ecdf_points(const std::vector<double>& values) {
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) out.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  return out;
}

ExperimentReport run(const ExperimentConfig& config, RunOptions options) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;
  report.version = SUPDIFF_VERSION;
  const auto& c = config;
  const std::size_t threads = options.threads;
  const std::size_t R = c.stat_replicates;
  const std::size_t L = c.limit_replicates;
  report.stat_replicates.assign(R, 0.0);
  auto engine_x = [&](std::size_t r) { return stream_engine(c.seed, Stream::statistic_x, r); };
  auto engine_y = [&](std::size_t r) { return stream_engine(c.seed, Stream::statistic_y, r); };
  auto stats = [&](auto&& fn) { parallel_for(R, threads, [&](std::size_t r) { report.stat_replicates[r] = fn(r); }); };
  auto reference = [&](std::string name, double value, std::string provenance) {
    if (!std::isfinite(value)) throw OracleError(name, "reference constant is not finite");
    report.references.push_back({std::move(name), value, std::move(provenance)});
    return value;
  };
  std::optional<LimitSpec> spec;
  double scale = 1.0;

  switch (c.experiment) {
    case ExperimentKind::ks1:
    case ExperimentKind::kuiper:
    case ExperimentKind::ks2: {
      const auto kind = effective_functional(c);
      std::string provenance;
      const double value = assemble(kind, cdf_difference_extremes(*c.F, *c.G, provenance));
      const double ref = reference("phi(F - G)", value, provenance);
      const auto grid = quantile_line(*c.F, *c.G, effective_grid(c));
      const double eps = c.epsilon.value_or(kDefaultTieTolerance);
      if (c.experiment == ExperimentKind::ks2) {
        stats([&](std::size_t r) {
          auto ex = engine_x(r);
          auto ey = engine_y(r);
          const auto sx = draw_sample(*c.F, c.n, ex);
          const auto sy = draw_sample(*c.G, c.m, ey);
          return ks_two_sample(sx, sy, kind, ref).centered;
        });
        const double lambda = static_cast<double>(c.n) / static_cast<double>(c.n + c.m);
        spec = ks_two_sample_limit(*c.F, *c.G, lambda, kind, grid, c.seed, eps);
        scale = two_sample_scale(c.n, c.m);
      } else {
        stats([&](std::size_t r) {
          auto ex = engine_x(r);
          return ks_one_sample(draw_sample(*c.F, c.n, ex), *c.G, kind, ref).centered;
        });
        spec = ks_one_sample_limit(*c.F, *c.G, kind, grid, c.seed, eps);
        scale = std::sqrt(static_cast<double>(c.n));
      }
      break;
    }
    case ExperimentKind::copula_tn: {
      const double ref =
          reference("||C - D||", copula_sup_distance(*c.C, *c.D, kCopulaOracleGrid), "dense-grid oracle");
      stats([&](std::size_t r) {
        auto ex = engine_x(r);
        return copula_stat_Tn(draw_sample(*c.C, c.n, ex), *c.D, ref).centered;
      });
      spec = copula_Tn_limit_spec(*c.C, *c.D, unit_lattice(effective_grid(c)), c.seed, c.epsilon.value_or(kDefaultTieTolerance));
      scale = std::sqrt(static_cast<double>(c.n));
      break;
    }
    case ExperimentKind::copula_symmetry: {
      const double ref = reference("||C - C_bar||", copula_asymmetry(*c.C, kCopulaOracleGrid), "dense-grid oracle");
      stats([&](std::size_t r) {
        auto ex = engine_x(r);
        return copula_symmetry_stat(draw_sample(*c.C, c.n, ex), ref).centered;
      });
      spec = copula_symmetry_limit_spec(*c.C, unit_lattice(effective_grid(c)), c.seed, c.epsilon.value_or(kDefaultTieTolerance));
      scale = std::sqrt(static_cast<double>(c.n));
      break;
    }
    case ExperimentKind::berk_jones: {
      const auto top = berk_jones_maximizer(*c.F, *c.G, kDenseGridPoints);
      const double ref = reference("R(F, G)", top.value, "dense-grid oracle");
      reference("argmax K(F, G)", top.x, "dense-grid oracle");
      const double f = c.F->cdf(top.x);
      const double sd = std::sqrt(f * (1.0 - f)) * std::abs(log_odds_weight(f, c.G->cdf(top.x)));
      reference("limit sd at argmax", sd, "dense-grid oracle");
      stats([&](std::size_t r) {
        auto ex = engine_x(r);
        return berk_jones_Bn(draw_sample(*c.F, c.n, ex), *c.G, ref).centered;
      });
      spec = bj_limit_spec(*c.F, *c.G, quantile_line(*c.F, *c.G, effective_grid(c)), c.seed, c.epsilon.value_or(kDefaultTieTolerance));
      scale = std::sqrt(static_cast<double>(c.n));
      break;
    }
    case ExperimentKind::berk_jones_null: {
      const double dn = reference("d_n", berk_jones_dn(c.n), "analytic");
      const double dn_plus = berk_jones_dn(c.n, 1.0);
      const double target = reference("median of exp(-4 exp(-x))", std::log(4.0 / std::numbers::ln2), "analytic");
      stats([&](std::size_t r) {
        auto ex = engine_x(r);
        return static_cast<double>(c.n) * berk_jones_R(draw_sample(*c.F, c.n, ex), *c.F) - dn;
      });
      report.limit_replicates.assign(L, 0.0);
      parallel_for(L, threads, [&](std::size_t r) {
        auto e = stream_engine(c.seed, Stream::limit, r);
        report.limit_replicates[r] = -std::log(-std::log(open_uniform(e)) / 4.0);
      });
      auto sorted = report.stat_replicates;
      std::sort(sorted.begin(), sorted.end());
      const double median = quantile_sorted(sorted, 0.5);
      report.diagnostics["median"] = median;
      report.diagnostics["median_target"] = target;
      report.diagnostics["d_n_plus_half_logloglog"] = dn_plus;
      report.diagnostics["median_with_plus_half_logloglog"] = median + dn - dn_plus;
      break;
    }
    case ExperimentKind::mmd_finite: {
      const auto& cls = *c.function_class;
      const double ref = reference("MMD(P, Q)", cls.population_mmd(*c.F, *c.G), "analytic");
      stats([&](std::size_t r) {
        auto ex = engine_x(r);
        auto ey = engine_y(r);
        const auto sx = draw_sample(*c.F, c.n, ex);
        const auto sy = draw_sample(*c.G, c.m, ey);
        return mmd_statistic(sx, sy, cls, ref).centered;
      });
      const double lambda = static_cast<double>(c.n) / static_cast<double>(c.n + c.m);
      const Eigen::VectorXd gaps = cls.means(*c.F) - cls.means(*c.G);
      spec = mmd_limit_spec(gaps, cls.covariance(*c.F), cls.covariance(*c.G), lambda,
                            c.epsilon.value_or(kDefaultMmdTolerance), c.seed, cls.symmetric());
      scale = two_sample_scale(c.n, c.m);
      break;
    }
  }

  if (spec) {
    const auto lim = simulate_limit(*spec, L, {.threads = threads});
    report.limit_replicates = lim.values;
    report.shortcut_variance = lim.shortcut_variance;
    const auto quotients = finite_n_quotients(*spec, 1.0 / scale, L, threads);
    report.diagnostics["finite_n_quotient_mean"] = summarize(quotients).mean;
    report.diagnostics["finite_n_quotient_ks_distance"] = compare_distributions(report.stat_replicates, quotients);
    report.diagnostics["epsilon"] = spec->epsilon;
    report.diagnostics["grid_nodes"] = spec->q.size();
  }
  report.statistic = summarize(report.stat_replicates);
  report.limit = summarize(report.limit_replicates);
  report.ks_distance = compare_distributions(report.stat_replicates, report.limit_replicates);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.write_outputs && !config.output_dir.empty()) emit_plot_data(report, config.output_dir);
  return report;
}

json to_json(const ExperimentReport& r) {
  json refs = json::array();
  for (const auto& c : r.references) refs.push_back({{"name", c.name}, {"value", c.value}, {"provenance", c.provenance}});
  json j{{"version", r.version},
         {"config", to_json(r.config)},
         {"references", refs},
         {"statistic", summary_json(r.statistic)},
         {"limit", summary_json(r.limit)},
         {"ks_distance", r.ks_distance},
         {"shortcut_variance", r.shortcut_variance ? json(*r.shortcut_variance) : json(nullptr)},
         {"diagnostics", r.diagnostics},
         {"wall_clock_seconds", r.wall_clock_seconds}};
  return j;
}

void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "stat_replicates.csv", replicate_csv(report.stat_replicates));
  write_text(dir / "limit_replicates.csv", replicate_csv(report.limit_replicates));
  std::string overlay = "set,value,level\n";
  for (const auto& [name, values] : {std::pair{"statistic", &report.stat_replicates},
                                     std::pair{"limit", &report.limit_replicates}}) {
    for (const auto& [v, level] : ecdf_points(*values)) {
      overlay += std::string(name) + "," + format_double(v) + "," + format_double(level) + "\n";
    }
  }
  write_text(dir / "ecdf_overlay.csv", overlay);
}

std::vector<std::string> oracle_names() {
  return {"normal-shift-ks",   "normal-shift-variance", "clayton1-asymmetry", "bj-power2-reference",
          "bj-power2-argmax",  "bj-power2-limit-sd",    "bj-null-median",     "half-log-4pi",
          "dn-10000",          "max-two-normals-mean"};
}

ReferenceConstant oracle_constant(const std::string& name) {
  const double p = normal_cdf(0.25);
  if (name == "normal-shift-ks") return {name, p - normal_cdf(-0.25), "analytic"};
  if (name == "normal-shift-variance") return {name, p * (1.0 - p), "analytic"};
  if (name == "clayton1-asymmetry") {
    return {name, copula_asymmetry(Copula::clayton(1.0), kCopulaOracleGrid), "dense-grid oracle"};
  }
  if (name.starts_with("bj-power2-")) {
    const auto F = UnivariateCdf::uniform();
    const auto G = UnivariateCdf::power(2.0);
    const auto top = berk_jones_maximizer(F, G, kDenseGridPoints);
    if (!std::isfinite(top.value)) throw OracleError(name, "maximization failed");
    if (name == "bj-power2-reference") return {name, top.value, "dense-grid oracle"};
    if (name == "bj-power2-argmax") return {name, top.x, "dense-grid oracle"};
    if (name == "bj-power2-limit-sd") {
      const double x = top.x;
      return {name, std::sqrt(x * (1.0 - x)) * std::abs(log_odds_weight(x, x * x)), "dense-grid oracle"};
    }
  }
  if (name == "bj-null-median") return {name, std::log(4.0 / std::numbers::ln2), "analytic"};
  if (name == "half-log-4pi") return {name, 0.5 * std::log(4.0 * std::numbers::pi), "analytic"};
  if (name == "dn-10000") return {name, berk_jones_dn(10000), "analytic"};
  if (name == "max-two-normals-mean") return {name, 1.0 / std::sqrt(std::numbers::pi), "analytic"};
  throw ValidationError("unknown oracle '" + name + "'");
}

}  // namespace supdiff
