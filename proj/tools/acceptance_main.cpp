#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "pralab/acceptance.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Runs the acceptance criteria and prints one PASS/FAIL line each"};
  pralab::AcceptanceOptions opt;
  bool allow_known = false;
  app.add_option("--only", opt.only, "criteria to run (1-11); default all")->check(CLI::Range(1, 11));
  app.add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "seed for sampled criteria");
  app.add_flag("--allow-known", allow_known,
               "exit 0 when the only failures are the documented unattainable ones");
  CLI11_PARSE(app, argc, argv);

  opt.on_result = [](pralab::CriterionResult const &r) { std::cout << r.line() << std::endl; };
  auto const results = pralab::run_acceptance(opt);
  int failed = 0, unexpected = 0;
  for (auto const &r : results) {
    failed += !r.pass;
    unexpected += !r.pass && !r.known_unattainable;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria pass";
  if (failed)
    std::cout << "; " << failed - unexpected << " known unattainable, " << unexpected << " unexpected";
  std::cout << std::endl;
  if (unexpected)
    return 1;
  return failed && !allow_known ? 1 : 0;
}
