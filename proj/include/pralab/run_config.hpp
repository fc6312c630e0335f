#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pralab
{

/// Everything one CLI invocation needs; serializes to JSON and back.
struct RunConfig
{
  std::string command;
  std::string group = "psl";
  std::uint32_t q = 5;
  std::size_t k = 3;
  bool extended = false;
  std::uint64_t seed = 1;
  std::uint64_t steps = 100;
  std::uint64_t samples = 1;
  unsigned workers = 1;
  std::uint64_t state_budget = 200'000'000;
  std::uint64_t search_budget = 20'000;
  std::uint64_t set_budget = 10'000'000'000;
  std::string format = "json";
  bool deterministic = false;
  /// Tuple or generator list in the matrix text format; empty with random.
  std::string tuple;
  bool random = false;
  bool census = false;
  std::string element;
  std::size_t m = 2;
  std::string mode = "exact";
  bool class_reduction = true;
  bool search_fallback = true;
  bool experimental_k = false;
  std::vector<int> only;
  bool fail_fast = false;
  bool allow_known = false;

  NLOHMANN_DEFINE_TYPE_INTRUSIVE_WITH_DEFAULT(RunConfig, command, group, q, k, extended, seed, steps, samples,
                                              workers, state_budget, search_budget, set_budget, format,
                                              deterministic, tuple, random, census, element, m, mode,
                                              class_reduction, search_fallback, experimental_k, only, fail_fast,
                                              allow_known)

  bool operator==(RunConfig const &) const = default;
};

} // namespace pralab
