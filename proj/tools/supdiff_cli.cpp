#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "supdiff/acceptance.hpp"
#include "supdiff/error.hpp"
#include "supdiff/functionals.hpp"
#include "supdiff/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitOracle = 3;
constexpr int kExitBreach = 4;

// Reads "x,value" rows (an optional third column holds the left limit).
supdiff::GridFunction read_function_csv(const std::string& path, supdiff::DomainPtr domain = nullptr) {
  std::ifstream in(path);
  if (!in) throw supdiff::ValidationError("cannot open " + path);
  std::vector<double> x, v, left;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a = 0.0, b = 0.0, c = 0.0;
    const int got = std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c);
    if (got < 2) {
      if (first) {
        first = false;
        continue;
      }
      throw supdiff::ValidationError(path + ": malformed row '" + line + "'");
    }
    first = false;
    x.push_back(a);
    v.push_back(b);
    if (got == 3) left.push_back(c);
  }
  if (!left.empty() && left.size() != v.size()) throw supdiff::ValidationError(path + ": left-limit column incomplete");
  if (!domain) domain = supdiff::share(supdiff::GridDomain::line(x));
  if (domain->axis(0) != x) throw supdiff::ValidationError(path + ": abscissae differ from the first function");
  if (left.empty()) return {domain, std::move(v)};
  return {domain, std::move(v), std::move(left)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional derivatives of supremum-type functionals and their limit laws"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t threads = 0;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::string f_path, g_path, kind_name = "delta";
  double epsilon = 0.0;
  std::optional<double> t;
  auto* deriv_cmd = app.add_subcommand("derivative", "Directional derivative of phi at f in direction g");
  deriv_cmd->add_option("f", f_path, "CSV with x,f(x)[,f(x-)]")->required()->check(CLI::ExistingFile);
  deriv_cmd->add_option("g", g_path, "CSV with x,g(x)[,g(x-)]")->required()->check(CLI::ExistingFile);
  deriv_cmd->add_option("--kind", kind_name, "delta | sigma | iota | alpha");
  deriv_cmd->add_option("--epsilon", epsilon, "Level-set tolerance")->check(CLI::NonNegativeNumber);
  deriv_cmd->add_option("--t", t, "Also print the difference quotient at this step")->check(CLI::PositiveNumber);

  std::string oracle_name;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print a named reference constant");
  oracle_cmd->add_option("name", oracle_name, "Constant name (--list to enumerate)");
  bool list = false;
  oracle_cmd->add_flag("--list", list, "List known constants");

  std::vector<int> criteria;
  auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance criteria");
  self_cmd->add_option("--criterion", criteria, "Criterion ids (default: all)");
  self_cmd->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      auto config = supdiff::load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      const auto report = supdiff::run(config, {.threads = threads});
      std::cout << supdiff::to_json(report).dump(2) << "\n";
    } else if (*deriv_cmd) {
      const auto kind = supdiff::parse_functional_kind(kind_name);
      const auto f = read_function_csv(f_path);
      const auto g = read_function_csv(g_path, f.domain());
      std::cout << supdiff::format_double(supdiff::directional_derivative(kind, f, g, epsilon)) << "\n";
      if (t) std::cout << supdiff::format_double(supdiff::difference_quotient(kind, f, g, *t)) << "\n";
    } else if (*oracle_cmd) {
      if (list || oracle_name.empty()) {
        for (const auto& name : supdiff::oracle_names()) std::cout << name << "\n";
      } else {
        const auto c = supdiff::oracle_constant(oracle_name);
        std::cout << c.name << " " << supdiff::format_double(c.value) << " (" << c.provenance << ")\n";
      }
    } else if (*self_cmd) {
      if (criteria.empty()) {
        for (int id = 1; id <= supdiff::kCriterionCount; ++id) criteria.push_back(id);
      }
      bool all = true;
      for (int id : criteria) {
        const auto outcome = supdiff::run_criterion(id, threads);
        std::cout << supdiff::format_outcome(outcome) << std::endl;
        all = all && outcome.pass;
      }
      return all ? 0 : kExitBreach;
    }
  } catch (const supdiff::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const supdiff::OracleError& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return kExitOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
