#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supdiff/distributions.hpp"
#include "supdiff/functionals.hpp"
#include "supdiff/statistics.hpp"

namespace supdiff {

enum class ExperimentKind { ks1, ks2, kuiper, copula_tn, copula_symmetry, berk_jones, berk_jones_null, mmd_finite };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// One experiment: statistic replicates from fresh samples against limit
/// replicates from simulated paths.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ks1;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t stat_replicates = 0;
  std::size_t limit_replicates = 0;
  /// Nodes of the 1-D limit grid, or points per axis of the copula lattice.
  std::size_t grid_size = 0;
  std::optional<double> epsilon;
  /// Functional for ks1/ks2 (kuiper always uses alpha).
  FunctionalKind functional = FunctionalKind::sup_norm;
  std::optional<UnivariateCdf> F;
  std::optional<UnivariateCdf> G;
  std::optional<Copula> C;
  std::optional<Copula> D;
  std::optional<FiniteFunctionClass> function_class;
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ValidationError naming the offending field.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const UnivariateCdf& F);
UnivariateCdf cdf_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Copula& C);
Copula copula_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FiniteFunctionClass& cls);
FiniteFunctionClass function_class_from_json(const nlohmann::json& j);

struct ReferenceConstant {
  std::string name;
  double value = 0.0;
  /// analytic | dense-grid oracle | plug-in
  std::string provenance;
};

inline constexpr std::array<double, 7> kSummaryLevels{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  /// At kSummaryLevels, linear interpolation between order statistics.
  std::array<double, 7> quantiles{};
};

Summary summarize(const std::vector<double>& values);
/// Linear-interpolation quantile of sorted values.
double quantile_sorted(const std::vector<double>& sorted, double level);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReferenceConstant> references;
  std::vector<double> stat_replicates;
  std::vector<double> limit_replicates;
  Summary statistic;
  Summary limit;
  double ks_distance = 0.0;
  std::optional<double> shortcut_variance;
  /// Informational quantities that do not enter the comparison.
  nlohmann::json diagnostics = nlohmann::json::object();
  double wall_clock_seconds = 0.0;
  std::string version;
};

struct RunOptions {
  std::size_t threads = 0;
  /// Write report.json and the CSV files when the config names an output directory.
  bool write_outputs = true;
};

ExperimentReport run(const ExperimentConfig& config, RunOptions options = {});

/// Report as JSON (replicate arrays are written to CSV, not here).
nlohmann::json to_json(const ExperimentReport& report);

/// Sorted replicates against ecdf levels i/R.
std::vector<std::pair<double, double>> ecdf_points(const std::vector<double>& values);

/// Writes report.json, stat_replicates.csv, limit_replicates.csv and
/// ecdf_overlay.csv into `dir`.
void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& dir);

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Named reference constants for the CLI. Unknown names raise ValidationError.
ReferenceConstant oracle_constant(const std::string& name);
std::vector<std::string> oracle_names();

}  // namespace supdiff
