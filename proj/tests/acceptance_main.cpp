#include <CLI11.hpp>

#include <iostream>

#include "supdiff/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one PASS/FAIL line each"};
  std::vector<int> criteria;
  std::size_t threads = 0;
  app.add_option("--criterion", criteria, "Criterion ids (default: all)");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) {
    for (int id = 1; id <= supdiff::kCriterionCount; ++id) criteria.push_back(id);
  }
  bool all = true;
  for (int id : criteria) {
    try {
      const auto outcome = supdiff::run_criterion(id, threads);
      std::cout << supdiff::format_outcome(outcome) << std::endl;
      all = all && outcome.pass;
    } catch (const std::exception& e) {
      std::cout << "FAIL " << id << ": " << e.what() << std::endl;
      all = false;
    }
  }
  return all ? 0 : 1;
}
