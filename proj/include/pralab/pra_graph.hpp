#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pralab/projective.hpp"
#include "pralab/random.hpp"

namespace pralab
{

class GraphError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// |G|^k exceeds the configured state budget.
class BudgetError : public GraphError
{
public:
  BudgetError(std::string const &what, std::uint64_t required)
      : GraphError(what), required_(required) {}
  std::uint64_t required() const { return required_; }

private:
  std::uint64_t required_;
};

class NotConnectedError : public GraphError
{
public:
  using GraphError::GraphError;
};

/**
 * R^s_{i,j}: g_i <- g_i g_j^s.  L^s_{i,j}: g_i <- g_j^s g_i.
 * P_{i,j}: swap.  I_i: g_i <- g_i^-1.
 * Indices are 0-based here and 1-based in the text format ("R+ 1 2").
 */
struct NielsenMove
{
  enum class Kind : std::uint8_t { R, L, P, I };

  Kind kind = Kind::R;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  int sign = 1;

  static NielsenMove r(std::uint32_t i, std::uint32_t j, int sign = 1) { return {Kind::R, i, j, sign}; }
  static NielsenMove l(std::uint32_t i, std::uint32_t j, int sign = 1) { return {Kind::L, i, j, sign}; }
  static NielsenMove swap(std::uint32_t i, std::uint32_t j) { return {Kind::P, i, j, 1}; }
  static NielsenMove invert(std::uint32_t i) { return {Kind::I, i, 0, 1}; }

  NielsenMove inverse() const;
  bool operator==(NielsenMove const &) const = default;
};

std::string to_string(NielsenMove const &m);
NielsenMove parse_move(std::string_view text);

/// Throws GraphError unless the move is valid for tuples of length k.
void check_move(NielsenMove const &m, std::size_t k);

/// Every move label for length k: R and L with both signs, plus P (i < j)
/// and I when extended.
std::vector<NielsenMove> move_labels(std::size_t k, bool extended);

/// A k-tuple of elements of an enumerated group, stored as dense indices.
class GenTuple
{
public:
  GenTuple(GroupPtr group, std::vector<ElemIndex> entries);
  static GenTuple from_elems(std::span<GroupElem const> elems);

  GroupPtr const &group() const { return group_; }
  std::vector<ElemIndex> const &entries() const { return entries_; }
  std::vector<ElemIndex> &entries() { return entries_; }
  std::size_t k() const { return entries_.size(); }
  ElemIndex operator[](std::size_t i) const { return entries_[i]; }
  GroupElem elem(std::size_t i) const { return GroupElem(group_, entries_[i]); }

  bool generates() const;
  bool is_redundant() const;

  /// Comma-separated matrices, e.g. "1,1,0,1,1,0,1,1".
  std::string to_string() const;
  nlohmann::json to_json() const;

  bool operator==(GenTuple const &other) const
  { return group_->same_as(*other.group_) && entries_ == other.entries_; }

private:
  GroupPtr group_;
  std::vector<ElemIndex> entries_;
};

/// Parses comma-separated matrices (4 field elements each).
GenTuple parse_tuple(GroupPtr const &group, std::string_view text);

/// Uniformly random generating k-tuple by rejection.
GenTuple random_generating_tuple(GroupPtr const &group, std::size_t k, Rng &rng);

void apply_move(Group const &group, std::span<ElemIndex> entries, NielsenMove const &m);
GenTuple apply_move(GenTuple const &t, NielsenMove const &m);

/// Images under all move labels, deduplicated, in label order.
std::vector<GenTuple> neighbors(GenTuple const &t, bool extended);

struct MovePath
{
  GenTuple start;
  std::vector<NielsenMove> moves;

  /// Replays the moves.
  GenTuple end() const;
  /// Replays the moves and throws GraphError if the start or any
  /// intermediate tuple fails to generate.
  GenTuple verify() const;
  std::size_t size() const { return moves.size(); }

  /// One move per line.
  std::string to_text() const;
  static std::vector<NielsenMove> parse_moves(std::string_view text);
};

struct WalkResult
{
  GenTuple tuple;
  ElemIndex sample;
};

/**
 * The product replacement walk. Each step draws r uniformly from
 * [0, 4 k (k-1)); r / 4 picks the ordered pair (i, j), i != j, in row-major
 * order and r % 4 picks R+, R-, L+, L-. The sample is a uniform entry of the
 * final tuple. Randomness comes from Rng seeded with `seed`.
 */
WalkResult pra_walk(GenTuple const &t0, std::uint64_t steps, std::uint64_t seed);

/// Same walk in place on raw entries, with a caller-owned generator.
ElemIndex pra_walk_in_place(Group const &group, std::span<ElemIndex> entries, std::uint64_t steps, Rng &rng);

struct ComponentOptions
{
  std::uint64_t state_budget = 200'000'000;
  unsigned workers = 1;
  /// Directory for memoized generation tests; none disables the cache.
  std::optional<std::filesystem::path> cache_dir;
};

struct ComponentInfo
{
  /// Least packed tuple code in the component.
  std::uint64_t label;
  std::uint64_t size;
};

struct ComponentReport
{
  GroupKind kind;
  std::uint32_t q;
  std::size_t k;
  bool extended;
  std::uint64_t vertex_count = 0;
  std::vector<ComponentInfo> components; // ascending label
  double seconds = 0;
  std::uint64_t memory_bytes = 0;
  std::uint64_t generation_tests = 0;
  bool cache_hit = false;

  std::size_t component_count() const { return components.size(); }
  /// Component sizes, descending.
  std::vector<std::uint64_t> sizes() const;
  nlohmann::json to_json(bool deterministic = false) const;
  std::string sizes_csv() const;
};

/**
 * Full component labelling of Γ_k(G) or its extended variant. States are
 * dense mixed-radix tuple indices with entry 1 most significant, so the
 * least state in a component also has the least packed code.
 */
class ComponentMap
{
public:
  GroupPtr const &group() const { return group_; }
  std::size_t k() const { return k_; }
  bool extended() const { return extended_; }
  ComponentReport const &report() const { return report_; }

  std::uint64_t state_of(std::span<ElemIndex const> entries) const;
  std::vector<ElemIndex> tuple_of(std::uint64_t state) const;
  bool generates(std::uint64_t state) const;
  /// Least state of the component; throws for a non-generating tuple.
  std::uint64_t root(std::uint64_t state) const;
  std::uint64_t root(std::span<ElemIndex const> entries) const { return root(state_of(entries)); }
  std::uint64_t state_count() const { return parent_.size(); }

private:
  friend ComponentMap component_map(GroupPtr const &, std::size_t, bool, ComponentOptions const &);

  GroupPtr group_;
  std::size_t k_ = 0;
  bool extended_ = false;
  std::vector<std::uint32_t> parent_; // fully compressed
  std::vector<std::uint64_t> gen_bits_;
  ComponentReport report_;
};

ComponentMap component_map(GroupPtr const &group, std::size_t k, bool extended, ComponentOptions const &options = {});
ComponentReport components(GroupPtr const &group, std::size_t k, bool extended, ComponentOptions const &options = {});

/// Limit law of the walk's sample: a uniform entry of a uniform vertex of
/// the component of `start`.
std::vector<double> stationary_entry_law(ComponentMap const &map, std::span<ElemIndex const> start);

/// Packs entry codes with ceil(log2 q^4) bits per entry, entry 1 first.
std::uint64_t packed_code(Group const &group, std::span<ElemIndex const> entries);

/// Shortest move path by bidirectional BFS, replay-verified. Throws
/// NotConnectedError when the search space is exhausted, BudgetError when
/// more than max_states tuples would be visited.
MovePath find_path(GenTuple const &t1, GenTuple const &t2, bool extended, std::uint64_t max_states = 50'000'000);

} // namespace pralab
