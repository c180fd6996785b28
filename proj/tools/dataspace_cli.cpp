// Command-line entry point: list, run, check and oracle-verify the scenarios.

#include "dataspace/network.hpp"
#include "dataspace/scenarios.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#ifndef DATASPACE_GOLDENS_DIR
#define DATASPACE_GOLDENS_DIR "goldens"
#endif

namespace {

namespace ds = dataspace;
namespace sc = dataspace::scenarios;

constexpr int exit_mismatch = 1;
constexpr int exit_unknown = 2;
constexpr int exit_non_quiescent = 3;
constexpr int exit_divergence = 4;

const sc::scenario* lookup(const std::string& name) {
  auto* s = sc::find(name);
  if (!s)
    std::cerr << "unknown scenario: " << name
              << " (try `dataspace list`)\n";
  return s;
}

int cmd_list() {
  for (const auto& s : sc::all())
    std::cout << s.name << "\t" << s.summary << "\n";
  return 0;
}

int cmd_run(const std::string& name, std::size_t max_steps,
            const std::string& out) {
  auto* s = lookup(name);
  if (!s)
    return exit_unknown;
  auto r = sc::run(*s, {}, max_steps > 0 ? std::optional{max_steps}
                                         : std::nullopt);
  if (out.empty()) {
    std::cout << r.trace;
  } else {
    std::ofstream f{out, std::ios::binary};
    if (!f) {
      std::cerr << "cannot write " << out << "\n";
      return exit_mismatch;
    }
    f << r.trace;
  }
  return 0;
}

int cmd_check(const std::string& name, const std::string& goldens) {
  auto* s = lookup(name);
  if (!s)
    return exit_unknown;
  auto path = goldens + "/" + s->golden();
  std::ifstream f{path, std::ios::binary};
  if (!f) {
    std::cerr << "missing golden trace " << path << "\n";
    return exit_mismatch;
  }
  std::stringstream expected;
  expected << f.rdbuf();
  auto actual = sc::run(*s).trace;
  std::istringstream want{expected.str()};
  std::istringstream got{actual};
  std::string w;
  std::string g;
  for (std::size_t line = 1;; ++line) {
    bool has_w = static_cast<bool>(std::getline(want, w));
    bool has_g = static_cast<bool>(std::getline(got, g));
    if (!has_w && !has_g)
      break;
    if (has_w != has_g || w != g) {
      std::cerr << name << ": trace differs from " << path << " at line "
                << line << "\n  expected: " << (has_w ? w : "<end>")
                << "\n  actual:   " << (has_g ? g : "<end>") << "\n";
      return exit_mismatch;
    }
  }
  if (expected.str() != actual) {
    std::cerr << name << ": trace differs from " << path
              << " in line endings\n";
    return exit_mismatch;
  }
  std::cout << name << ": ok\n";
  return 0;
}

int cmd_oracle(const std::string& name, std::size_t seeds) {
  auto* s = lookup(name);
  if (!s)
    return exit_unknown;
  try {
    sc::run(*s, ds::network_options{true, std::nullopt});
    for (std::size_t seed = 1; seed <= seeds; ++seed)
      sc::run(*s, ds::network_options{true, seed});
  } catch (const ds::visibility_divergence& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return exit_divergence;
  }
  std::cout << name << ": incremental visibility matches recomputation ("
            << seeds + 1 << " schedules)\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataspace coordination runtime scenarios"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List scenario names");

  std::string name;
  std::size_t max_steps = 0;
  std::string out;
  auto* run = app.add_subcommand("run", "Run a scenario and emit its trace");
  run->add_option("name", name, "Scenario name")->required();
  run->add_option("--max-steps", max_steps, "Dispatch budget");
  run->add_option("--out", out, "Write the trace to FILE instead of stdout");

  std::string goldens = DATASPACE_GOLDENS_DIR;
  auto* check = app.add_subcommand("check",
                                   "Run a scenario and diff its golden trace");
  check->add_option("name", name, "Scenario name")->required();
  check->add_option("--goldens", goldens, "Directory of golden traces");

  std::size_t seeds = 0;
  auto* oracle = app.add_subcommand(
    "oracle", "Run with from-scratch visibility checks after every dispatch");
  oracle->add_option("name", name, "Scenario name")->required();
  oracle->add_option("--seeds", seeds,
                     "Additionally run N randomized dispatch orders");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list)
      return cmd_list();
    if (*run)
      return cmd_run(name, max_steps, out);
    if (*check)
      return cmd_check(name, goldens);
    if (*oracle)
      return cmd_oracle(name, seeds);
  } catch (const ds::non_quiescent& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return exit_non_quiescent;
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return exit_mismatch;
  }
  return 0;
}
