#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "json.hpp"

#include "pralab/pra_graph.hpp"

namespace pralab
{

/// A lemma step that should be impossible happened; carries the trace so far.
class ConnectorError : public std::runtime_error
{
public:
  ConnectorError(std::string const &what, nlohmann::json trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  nlohmann::json const &trace() const { return trace_; }

private:
  nlohmann::json trace_;
};

struct ConnectorOptions
{
  /// Stop as soon as the tuple is redundant. Stage tests switch this off to
  /// exercise the lemma steps on tuples that are redundant already.
  bool short_circuit = true;
  /// Allow a bounded breadth-first search when a lemma's case analysis
  /// does not apply. Every use is recorded as its own trace stage.
  bool search_fallback = true;
  std::uint64_t search_states = 200'000;
  /// Accept k > 4 (stages 1 and 2 act on every entry, stage 3 searches).
  bool experimental_k = false;
};

struct ConnectorStage
{
  std::string label;
  std::vector<NielsenMove> moves;
  std::vector<std::string> certificates;
};

struct ConnectorTrace
{
  GenTuple input;
  std::vector<ConnectorStage> stages;
  GenTuple endpoint;
  /// Entry whose removal leaves a generating tuple.
  std::optional<std::size_t> redundant_index;
  std::size_t fallback_count = 0;

  MovePath path() const;
  std::size_t move_count() const;
  nlohmann::json to_json() const;
};

/// Non-pivot entries end outside N_G(<w>) and of order other than 2.
MovePath clear_normalizer(GenTuple const &t, std::size_t pivot, ConnectorOptions const &options = {});

/// First entry ends split or non-split with order outside {2, p}.
MovePath order_fix(GenTuple const &t, ConnectorOptions const &options = {});

/// With w the first entry, <w, w^u> ends non-structural for every other u.
MovePath destructuralize(GenTuple const &t, ConnectorOptions const &options = {});

/// Reaches a redundant tuple from one whose triple subgroups are non-structural.
MovePath subfield_resolve(GenTuple const &t, ConnectorOptions const &options = {});

/// The whole pipeline; the returned path is replay-verified and ends redundant.
ConnectorTrace connect_to_redundant(GenTuple const &t, ConnectorOptions const &options = {});

struct LemmaOracleReport
{
  std::string lemma;
  GroupKind kind;
  std::uint32_t q;
  std::uint64_t cases = 0;
  /// Cases resolved by the lemma's stated alternative (the A4 closure).
  std::uint64_t alternatives = 0;
  std::uint64_t violations = 0;

  bool holds() const { return violations == 0; }
};

/// Every non-commuting pair x, y of order p has some i in [1, p-1] with
/// |x y^i| outside {2, p}, or p = 3 and <x, y> = A4. Exhaustive.
LemmaOracleReport not_2_p_oracle(GroupPtr const &group);

/// For w != 1 and an involution y outside N(<w>), |w y| != 2. Exhaustive.
LemmaOracleReport normalizer_oracle(GroupPtr const &group);

/// Points of P^1(q) fixed by x.
std::vector<Point> fixed_points(Group const &group, ElemIndex x);

/// N_G(<w>) as a membership bitset over the dense indices of G.
boost::dynamic_bitset<> cyclic_normalizer(Group const &group, ElemIndex w);

/// <gens> is a proper structural subgroup (the whole group is not structural).
bool structural_span(Group const &group, std::span<ElemIndex const> gens);

} // namespace pralab
