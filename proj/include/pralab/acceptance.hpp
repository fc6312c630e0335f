#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pralab
{

struct CriterionResult
{
  int id = 0;
  std::string name;
  bool pass = false;
  /// Failed exactly as the documented analysis predicts (claim does not
  /// hold as stated); still a failure.
  bool known_unattainable = false;
  std::string detail;
  double seconds = 0;
  nlohmann::json data;

  std::string line() const;
};

struct AcceptanceOptions
{
  unsigned workers = 1;
  std::uint64_t seed = 1;
  std::optional<std::string> cache_dir;
  /// Criteria to run; empty means 1 to 11.
  std::vector<int> only;
  /// Called as each criterion finishes.
  std::function<void(CriterionResult const &)> on_result;
  bool fail_fast = false;
};

constexpr int acceptance_criteria = 11;

std::vector<CriterionResult> run_acceptance(AcceptanceOptions const &options = {});

/// Runs a single criterion.
CriterionResult run_criterion(int id, AcceptanceOptions const &options = {});

} // namespace pralab
