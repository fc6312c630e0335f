#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "json.hpp"

#include "pralab/pra_graph.hpp"

namespace pralab
{

class SpreadError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive scan would exceed its set budget.
class SpreadBudgetError : public SpreadError
{
public:
  using SpreadError::SpreadError;
};

/// Conjugacy classes of G under conjugation by G itself.
struct ConjugacyClasses
{
  std::vector<ElemIndex> reps;      // ascending
  std::vector<std::size_t> class_of; // position in reps
  /// conj(reps[class_of[g]], conjugator[g]) == g
  std::vector<ElemIndex> conjugator;
  std::vector<std::size_t> sizes;
};

ConjugacyClasses conjugacy_classes(Group const &group);

/// M(g) = {h : <g,h> = G} for every g; closure tests run on class
/// representatives only and are transported by conjugation.
class MateTable
{
public:
  explicit MateTable(GroupPtr group);

  Group const &group() const { return *group_; }
  ConjugacyClasses const &classes() const { return classes_; }
  /// Throws SpreadError for the identity.
  boost::dynamic_bitset<> const &mates(ElemIndex g) const;
  std::uint64_t closure_tests() const { return closure_tests_; }
  /// mates(g) as raw 64-bit words, for the hot loops
  std::uint64_t const *mate_words(ElemIndex g) const { return flat_.data() + std::size_t(g) * words_; }
  std::size_t words_per_set() const { return words_; }

private:
  GroupPtr group_;
  ConjugacyClasses classes_;
  std::vector<boost::dynamic_bitset<>> mates_;
  std::vector<std::uint64_t> flat_;
  std::size_t words_ = 0;
  std::uint64_t closure_tests_ = 0;
};

/// One-off M(g) by direct closure tests.
boost::dynamic_bitset<> mate_set(GroupPtr const &group, ElemIndex g);

enum class SpreadMode { lower, upper, exact };
enum class SpreadVerdict { holds, fails, inconclusive };

std::string to_string(SpreadMode mode);
std::string to_string(SpreadVerdict verdict);
SpreadMode parse_spread_mode(std::string_view text);

struct SpreadOptions
{
  /// Let the first element range over class representatives only.
  bool class_reduction = true;
  /// Largest number of m-sets an exhaustive scan may visit.
  std::uint64_t set_budget = 10'000'000'000;
  unsigned workers = 1;
  /// Greedy restarts for the blocking-set search.
  std::uint64_t search_budget = 20'000;
  std::uint64_t seed = 1;
  /// Exact mode stops raising m here.
  std::size_t max_m = 16;
};

struct SpreadStats
{
  std::uint64_t sets_checked = 0;
  std::uint64_t closure_tests = 0;
  std::uint64_t restarts = 0;
  double seconds = 0;
};

struct SpreadReport
{
  GroupKind kind;
  std::uint32_t q;
  SpreadMode mode;
  /// lower/upper: the tested level. exact: the largest level shown to hold.
  std::size_t m = 0;
  SpreadVerdict verdict = SpreadVerdict::inconclusive;
  /// A re-verified blocking set: no h generates G with every element.
  std::vector<ElemIndex> witness;
  std::vector<ElemCode> witness_codes;
  std::vector<std::string> witness_matrices;
  bool class_reduction = true;
  SpreadStats stats;

  nlohmann::json to_json(bool deterministic = false) const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Exhaustive check that every m-set of nontrivial elements has a common
/// mate. The first counterexample is returned as the witness.
SpreadReport spread_at_least(GroupPtr const &group, std::size_t m, SpreadOptions const &options = {});
SpreadReport spread_at_least(MateTable const &table, std::size_t m, SpreadOptions const &options = {});

/// Greedy cover of G by the blocked sets G \ M(g), with random restarts.
/// Finding nothing is inconclusive, never a lower bound.
SpreadReport blocking_search(GroupPtr const &group, std::size_t m, SpreadOptions const &options = {});
SpreadReport blocking_search(MateTable const &table, std::size_t m, SpreadOptions const &options = {});

/// Raises m until the exhaustive scan fails, falling back to the search
/// once the scan is over budget.
SpreadReport exact_spread(GroupPtr const &group, SpreadOptions const &options = {});

/// Direct closure tests, independent of any mate table.
bool verify_blocking(Group const &group, std::vector<ElemIndex> const &witness);

struct RedundantComponentReport
{
  GroupKind kind;
  std::uint32_t q;
  std::size_t k;
  std::uint64_t redundant_tuples = 0;
  /// Component labels met by redundant tuples.
  std::vector<std::uint64_t> labels;
  std::size_t component_count = 0;

  bool shared() const { return labels.size() == 1; }
  nlohmann::json to_json() const;
};

/// All redundant generating k-tuples lie in one component of the extended
/// graph. Checks spread 2 first and throws SpreadError without it.
RedundantComponentReport redundant_component_check(GroupPtr const &group, std::size_t k,
                                                   ComponentOptions const &options = {});

} // namespace pralab
