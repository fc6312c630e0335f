#include "pralab/pra_graph.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "pralab/subgroup.hpp"

namespace pralab
{

NielsenMove NielsenMove::inverse() const
{
  NielsenMove m = *this;
  if (kind == Kind::R || kind == Kind::L)
    m.sign = -sign;
  return m;
}

std::string to_string(NielsenMove const &m)
{
  switch (m.kind) {
  case NielsenMove::Kind::R:
  case NielsenMove::Kind::L:
    return std::string(m.kind == NielsenMove::Kind::R ? "R" : "L") + (m.sign > 0 ? "+ " : "- ") +
           std::to_string(m.i + 1) + " " + std::to_string(m.j + 1);
  case NielsenMove::Kind::P:
    return "P " + std::to_string(m.i + 1) + " " + std::to_string(m.j + 1);
  case NielsenMove::Kind::I:
    return "I " + std::to_string(m.i + 1);
  }
  return {};
}

NielsenMove parse_move(std::string_view text)
{
  std::istringstream in{std::string(text)};
  std::string op;
  in >> op;
  auto bad = [&] { return GraphError("malformed move '" + std::string(text) + "'"); };
  auto index = [&] {
    long v = 0;
    if (!(in >> v) || v < 1)
      throw bad();
    return static_cast<std::uint32_t>(v - 1);
  };

  NielsenMove m;
  if (op == "R+" || op == "R-" || op == "L+" || op == "L-") {
    m.kind = op[0] == 'R' ? NielsenMove::Kind::R : NielsenMove::Kind::L;
    m.sign = op[1] == '+' ? 1 : -1;
    m.i = index();
    m.j = index();
  } else if (op == "P") {
    m.kind = NielsenMove::Kind::P;
    m.i = index();
    m.j = index();
  } else if (op == "I") {
    m.kind = NielsenMove::Kind::I;
    m.i = index();
  } else {
    throw bad();
  }
  std::string rest;
  if (in >> rest)
    throw bad();
  return m;
}

void check_move(NielsenMove const &m, std::size_t k)
{
  bool ok = m.i < k;
  if (m.kind != NielsenMove::Kind::I)
    ok = ok && m.j < k && m.i != m.j;
  if (m.kind == NielsenMove::Kind::R || m.kind == NielsenMove::Kind::L)
    ok = ok && (m.sign == 1 || m.sign == -1);
  if (!ok)
    throw GraphError("move '" + to_string(m) + "' invalid for k = " + std::to_string(k));
}

std::vector<NielsenMove> move_labels(std::size_t k, bool extended)
{
  std::vector<NielsenMove> out;
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < k; ++j) {
      if (i == j)
        continue;
      for (int s : {1, -1}) {
        out.push_back(NielsenMove::r(i, j, s));
        out.push_back(NielsenMove::l(i, j, s));
      }
    }
  }
  if (extended) {
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t j = i + 1; j < k; ++j)
        out.push_back(NielsenMove::swap(i, j));
    }
    for (std::uint32_t i = 0; i < k; ++i)
      out.push_back(NielsenMove::invert(i));
  }
  return out;
}

GenTuple::GenTuple(GroupPtr group, std::vector<ElemIndex> entries)
: group_(std::move(group)), entries_(std::move(entries))
{
  if (!group_ || !group_->enumerated())
    throw GraphError("tuples need an enumerated group");
  if (entries_.empty())
    throw GraphError("tuple length must be at least 1");
  for (auto x : entries_) {
    if (x >= group_->size())
      throw GraphError("tuple entry out of range");
  }
}

GenTuple GenTuple::from_elems(std::span<GroupElem const> elems)
{
  if (elems.empty())
    throw GraphError("tuple length must be at least 1");
  std::vector<ElemIndex> idx;
  for (auto const &e : elems) {
    if (!e.group()->same_as(*elems.front().group()))
      throw GraphError("tuple entries from different groups");
    idx.push_back(e.index());
  }
  return {elems.front().group(), std::move(idx)};
}

bool GenTuple::generates() const { return pralab::generates(*group_, entries_); }

bool GenTuple::is_redundant() const { return pralab::is_redundant(*group_, entries_); }

std::string GenTuple::to_string() const
{
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i)
      out += ',';
    out += group_->format(entries_[i]);
  }
  return out;
}

nlohmann::json GenTuple::to_json() const
{
  auto arr = nlohmann::json::array();
  for (auto x : entries_)
    arr.push_back({{"code", group_->code(x)}, {"matrix", group_->format(x)}});
  return arr;
}

GenTuple parse_tuple(GroupPtr const &group, std::string_view text)
{
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    auto const comma = text.find(',', start);
    parts.push_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  if (parts.size() % 4 != 0)
    throw GraphError("tuple '" + std::string(text) + "' is not a list of a,b,c,d matrices");
  std::vector<ElemIndex> entries;
  for (std::size_t i = 0; i < parts.size(); i += 4) {
    std::string m;
    for (std::size_t r = 0; r < 4; ++r)
      m += std::string(parts[i + r]) + (r < 3 ? "," : "");
    entries.push_back(group->index_of(group->canonical_checked(group->parse_matrix(m))));
  }
  return {group, std::move(entries)};
}

GenTuple random_generating_tuple(GroupPtr const &group, std::size_t k, Rng &rng)
{
  std::vector<ElemIndex> e(k);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    for (auto &x : e)
      x = static_cast<ElemIndex>(rng.below(group->size()));
    if (generates(*group, e))
      return {group, e};
  }
  throw GraphError("no generating " + std::to_string(k) + "-tuple found for " + group->name());
}

void apply_move(Group const &group, std::span<ElemIndex> e, NielsenMove const &m)
{
  check_move(m, e.size());
  switch (m.kind) {
  case NielsenMove::Kind::R: {
    auto const y = m.sign > 0 ? e[m.j] : group.inv(e[m.j]);
    e[m.i] = group.mul(e[m.i], y);
    break;
  }
  case NielsenMove::Kind::L: {
    auto const y = m.sign > 0 ? e[m.j] : group.inv(e[m.j]);
    e[m.i] = group.mul(y, e[m.i]);
    break;
  }
  case NielsenMove::Kind::P:
    std::swap(e[m.i], e[m.j]);
    break;
  case NielsenMove::Kind::I:
    e[m.i] = group.inv(e[m.i]);
    break;
  }
}

GenTuple apply_move(GenTuple const &t, NielsenMove const &m)
{
  GenTuple out = t;
  apply_move(*t.group(), out.entries(), m);
  return out;
}

std::vector<GenTuple> neighbors(GenTuple const &t, bool extended)
{
  std::vector<GenTuple> out;
  for (auto const &m : move_labels(t.k(), extended)) {
    auto u = apply_move(t, m);
    if (std::find(out.begin(), out.end(), u) == out.end())
      out.push_back(std::move(u));
  }
  return out;
}

GenTuple MovePath::end() const
{
  GenTuple t = start;
  for (auto const &m : moves)
    apply_move(*t.group(), t.entries(), m);
  return t;
}

GenTuple MovePath::verify() const
{
  GenTuple t = start;
  if (!t.generates())
    throw GraphError("path start " + t.to_string() + " does not generate");
  for (std::size_t s = 0; s < moves.size(); ++s) {
    apply_move(*t.group(), t.entries(), moves[s]);
    if (!t.generates())
      throw GraphError("tuple after move " + std::to_string(s + 1) + " does not generate");
  }
  return t;
}

std::string MovePath::to_text() const
{
  std::string out;
  for (auto const &m : moves)
    out += to_string(m) + "\n";
  return out;
}

std::vector<NielsenMove> MovePath::parse_moves(std::string_view text)
{
  std::vector<NielsenMove> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    out.push_back(parse_move(line));
  }
  return out;
}

ElemIndex pra_walk_in_place(Group const &group, std::span<ElemIndex> e, std::uint64_t steps, Rng &rng)
{
  std::uint64_t const k = e.size();
  if (k < 2 && steps > 0)
    throw GraphError("the walk needs k >= 2");
  std::uint64_t const labels = 4 * k * (k - 1);
  for (std::uint64_t s = 0; s < steps; ++s) {
    auto const r = rng.below(labels);
    auto const pair = r / 4;
    auto const i = pair / (k - 1);
    auto j = pair % (k - 1);
    if (j >= i)
      ++j;
    switch (r % 4) {
    case 0:
      e[i] = group.mul(e[i], e[j]);
      break;
    case 1:
      e[i] = group.mul(e[i], group.inv(e[j]));
      break;
    case 2:
      e[i] = group.mul(e[j], e[i]);
      break;
    default:
      e[i] = group.mul(group.inv(e[j]), e[i]);
      break;
    }
  }
  return e[rng.below(k)];
}

WalkResult pra_walk(GenTuple const &t0, std::uint64_t steps, std::uint64_t seed)
{
  if (!t0.generates())
    throw GraphError("walk start " + t0.to_string() + " does not generate");
  Rng rng(seed);
  GenTuple t = t0;
  auto const sample = pra_walk_in_place(*t.group(), t.entries(), steps, rng);
  return {std::move(t), sample};
}

std::uint64_t packed_code(Group const &group, std::span<ElemIndex const> entries)
{
  std::uint64_t const q = group.q();
  unsigned const bits = std::bit_width(q * q * q * q - 1);
  if (bits * entries.size() > 64)
    throw GraphError("tuple does not fit a 64-bit packed code");
  std::uint64_t out = 0;
  for (auto x : entries)
    out = (out << bits) | group.code(x);
  return out;
}

std::vector<std::uint64_t> ComponentReport::sizes() const
{
  std::vector<std::uint64_t> out;
  for (auto const &c : components)
    out.push_back(c.size);
  std::sort(out.rbegin(), out.rend());
  return out;
}

nlohmann::json ComponentReport::to_json(bool deterministic) const
{
  nlohmann::json j;
  j["group"] = to_string(kind);
  j["q"] = q;
  j["k"] = k;
  j["extended"] = extended;
  j["vertex_count"] = vertex_count;
  j["component_count"] = component_count();
  j["component_sizes"] = sizes();
  auto labels = nlohmann::json::array();
  for (auto const &c : components)
    labels.push_back({{"label", c.label}, {"size", c.size}});
  j["components"] = labels;
  j["memory_bytes"] = memory_bytes;
  if (!deterministic) {
    j["seconds"] = seconds;
    j["generation_tests"] = generation_tests;
    j["cache_hit"] = cache_hit;
  }
  return j;
}

std::string ComponentReport::sizes_csv() const
{
  std::string out = "group,q,k,extended,component,label,size\n";
  for (std::size_t c = 0; c < components.size(); ++c) {
    out += to_string(kind) + "," + std::to_string(q) + "," + std::to_string(k) + "," +
           (extended ? "true" : "false") + "," + std::to_string(c) + "," +
           std::to_string(components[c].label) + "," + std::to_string(components[c].size) + "\n";
  }
  return out;
}

namespace
{

std::uint64_t checked_power(std::uint64_t n, std::size_t k)
{
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (out > UINT64_MAX / n)
      throw GraphError("state space does not fit 64 bits");
    out *= n;
  }
  return out;
}

/// Mixed-radix digits with entry 0 most significant.
struct StateCodec
{
  std::uint64_t n;
  std::size_t k;
  std::vector<std::uint64_t> weight;

  StateCodec(std::uint64_t n_, std::size_t k_) : n(n_), k(k_), weight(k_)
  {
    checked_power(n, k);
    std::uint64_t w = 1;
    for (std::size_t i = k; i-- > 0;) {
      weight[i] = w;
      w *= n;
    }
  }

  std::uint64_t encode(std::span<ElemIndex const> e) const
  {
    std::uint64_t s = 0;
    for (auto x : e)
      s = s * n + x;
    return s;
  }

  void decode(std::uint64_t s, std::span<ElemIndex> e) const
  {
    for (std::size_t i = k; i-- > 0;) {
      e[i] = static_cast<ElemIndex>(s % n);
      s /= n;
    }
  }

  std::uint64_t sorted(std::span<ElemIndex const> e) const
  {
    ElemIndex buf[16];
    std::copy(e.begin(), e.end(), buf);
    std::sort(buf, buf + k);
    return encode({buf, k});
  }
};

bool test_bit(std::vector<std::uint64_t> const &bits, std::uint64_t i)
{
  return (bits[i >> 6] >> (i & 63)) & 1;
}

void set_bit_atomic(std::vector<std::uint64_t> &bits, std::uint64_t i)
{
  std::atomic_ref<std::uint64_t>(bits[i >> 6]).fetch_or(std::uint64_t(1) << (i & 63), std::memory_order_relaxed);
}

template <class F>
void run_workers(unsigned workers, F const &body)
{
  workers = std::max(1u, workers);
  if (workers == 1) {
    body(0u, 1u);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] { body(w, workers); });
}

// Binary cache: magic, version, kind, q, k, count, then count records of
// (packed sorted code multiset u64, generates u8), little-endian host order.
constexpr char cache_magic[8] = {'P', 'R', 'A', 'L', 'A', 'B', 'G', 'C'};
constexpr std::uint32_t cache_version = 1;

std::filesystem::path cache_file(std::filesystem::path const &dir, Group const &group, std::size_t k)
{
  return dir / ("gen-" + to_string(group.kind()) + "-q" + std::to_string(group.q()) + "-k" + std::to_string(k) + ".bin");
}

template <class T>
void put(std::ostream &out, T v) { out.write(reinterpret_cast<char const *>(&v), sizeof v); }

template <class T>
bool get(std::istream &in, T &v) { return bool(in.read(reinterpret_cast<char *>(&v), sizeof v)); }

bool load_cache(std::filesystem::path const &file, Group const &group, StateCodec const &codec,
                std::vector<std::uint64_t> &memo)
{
  std::ifstream in(file, std::ios::binary);
  if (!in)
    return false;
  char magic[8];
  std::uint32_t version, kind, q, k;
  std::uint64_t count;
  if (!in.read(magic, 8) || std::memcmp(magic, cache_magic, 8) != 0 || !get(in, version) ||
      version != cache_version || !get(in, kind) || !get(in, q) || !get(in, k) || !get(in, count))
    return false;
  if (kind != static_cast<std::uint32_t>(group.kind()) || q != group.q() || k != codec.k)
    return false;

  unsigned const bits = std::bit_width(std::uint64_t(q) * q * q * q - 1);
  std::uint64_t const mask = (std::uint64_t(1) << bits) - 1;
  std::vector<std::uint64_t> loaded(memo.size(), 0);
  std::vector<ElemIndex> e(k);
  for (std::uint64_t r = 0; r < count; ++r) {
    std::uint64_t key;
    std::uint8_t flag;
    if (!get(in, key) || !get(in, flag))
      return false;
    for (std::size_t i = k; i-- > 0;) {
      auto const idx = group.find(static_cast<ElemCode>(key & mask));
      if (!idx)
        return false;
      e[i] = *idx;
      key >>= bits;
    }
    if (flag)
      loaded[codec.sorted(e) >> 6] |= std::uint64_t(1) << (codec.sorted(e) & 63);
  }
  memo = std::move(loaded);
  return true;
}

void save_cache(std::filesystem::path const &file, Group const &group, StateCodec const &codec,
                std::vector<std::uint64_t> const &memo)
{
  std::filesystem::create_directories(file.parent_path());
  auto const tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(cache_magic, 8);
    put(out, cache_version);
    put(out, static_cast<std::uint32_t>(group.kind()));
    put(out, static_cast<std::uint32_t>(group.q()));
    put(out, static_cast<std::uint32_t>(codec.k));
    auto const count_pos = out.tellp();
    put(out, std::uint64_t(0));

    std::uint64_t count = 0;
    std::vector<ElemIndex> e(codec.k, 0);
    for (;;) {
      put(out, packed_code(group, e));
      put(out, static_cast<std::uint8_t>(test_bit(memo, codec.encode(e))));
      ++count;
      // next nondecreasing tuple
      std::size_t i = codec.k;
      while (i > 0 && e[i - 1] == codec.n - 1)
        --i;
      if (i == 0)
        break;
      ++e[i - 1];
      std::fill(e.begin() + i, e.end(), e[i - 1]);
    }
    out.seekp(count_pos);
    put(out, count);
  }
  std::filesystem::rename(tmp, file);
}

/// Marks memo bits for every nondecreasing tuple that generates.
std::uint64_t fill_generation_memo(Group const &group, StateCodec const &codec, unsigned workers,
                                   std::vector<std::uint64_t> &memo)
{
  auto const n = static_cast<ElemIndex>(codec.n);
  std::size_t const k = codec.k;

  // pair table: does {a, b} generate
  std::vector<std::uint64_t> pair(std::size_t(n) * n / 64 + 1, 0);
  std::atomic<std::uint64_t> tests{0};
  run_workers(workers, [&](unsigned w, unsigned workers_) {
    std::uint64_t local = 0;
    for (ElemIndex a = w; a < n; a += workers_) {
      for (ElemIndex b = a; b < n; ++b) {
        ElemIndex const g[2] = {a, b};
        ++local;
        if (generates(group, g)) {
          set_bit_atomic(pair, std::uint64_t(a) * n + b);
          set_bit_atomic(pair, std::uint64_t(b) * n + a);
        }
      }
    }
    tests += local;
  });

  run_workers(workers, [&](unsigned w, unsigned workers_) {
    std::uint64_t local = 0;
    std::vector<ElemIndex> e(k);
    for (ElemIndex first = w; first < n; first += workers_) {
      std::fill(e.begin(), e.end(), first);
      for (;;) {
        bool gen = false;
        for (std::size_t i = 0; i < k && !gen; ++i) {
          for (std::size_t j = i; j < k && !gen; ++j)
            gen = test_bit(pair, std::uint64_t(e[i]) * n + e[j]);
        }
        if (!gen && k > 2) {
          ++local;
          gen = generates(group, e);
        }
        if (gen)
          set_bit_atomic(memo, codec.encode(e));
        std::size_t i = k;
        while (i > 1 && e[i - 1] == n - 1)
          --i;
        if (i == 1)
          break;
        ++e[i - 1];
        std::fill(e.begin() + i, e.end(), e[i - 1]);
      }
    }
    tests += local;
  });
  return tests;
}

std::uint32_t find_root(std::uint32_t *parent, std::uint32_t x)
{
  for (;;) {
    std::atomic_ref<std::uint32_t> px(parent[x]);
    auto p = px.load(std::memory_order_relaxed);
    if (p == x)
      return x;
    auto gp = std::atomic_ref<std::uint32_t>(parent[p]).load(std::memory_order_relaxed);
    if (gp != p)
      px.compare_exchange_weak(p, gp, std::memory_order_relaxed);
    x = gp;
  }
}

// Links the larger root under the smaller, so every root ends as the least
// state of its component whatever the interleaving.
void unite(std::uint32_t *parent, std::uint32_t a, std::uint32_t b)
{
  for (;;) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a == b)
      return;
    if (a < b)
      std::swap(a, b);
    auto expected = a;
    if (std::atomic_ref<std::uint32_t>(parent[a]).compare_exchange_strong(expected, b, std::memory_order_relaxed))
      return;
  }
}

} // namespace

std::uint64_t ComponentMap::state_of(std::span<ElemIndex const> entries) const
{
  if (entries.size() != k_)
    throw GraphError("tuple length differs from the component map");
  return StateCodec(group_->size(), k_).encode(entries);
}

std::vector<ElemIndex> ComponentMap::tuple_of(std::uint64_t state) const
{
  std::vector<ElemIndex> e(k_);
  StateCodec(group_->size(), k_).decode(state, e);
  return e;
}

bool ComponentMap::generates(std::uint64_t state) const
{
  StateCodec const codec(group_->size(), k_);
  std::vector<ElemIndex> e(k_);
  codec.decode(state, e);
  return test_bit(gen_bits_, codec.sorted(e));
}

std::uint64_t ComponentMap::root(std::uint64_t state) const
{
  if (state >= parent_.size() || !generates(state))
    throw GraphError("state is not a generating tuple");
  return parent_[state];
}

ComponentMap component_map(GroupPtr const &group, std::size_t k, bool extended, ComponentOptions const &options)
{
  auto const t0 = std::chrono::steady_clock::now();
  if (!group->enumerated())
    throw GraphError("components need an enumerated group");
  if (k < 1 || k > 16)
    throw GraphError("k must be between 1 and 16");
  std::uint64_t const n = group->size();
  std::uint64_t states = 0;
  try {
    states = checked_power(n, k);
  } catch (GraphError const &) {
    states = UINT64_MAX;
  }
  if (states > options.state_budget || states >= UINT32_MAX) {
    throw BudgetError(group->name() + "^" + std::to_string(k) + " has " +
                          (states == UINT64_MAX ? std::string("more than 2^64") : std::to_string(states)) +
                          " states, over the budget of " + std::to_string(options.state_budget) +
                          "; about " + std::to_string(states == UINT64_MAX ? 0 : states * 4 / (1 << 20)) +
                          " MiB would be needed",
                      states);
  }

  StateCodec const codec(n, k);
  ComponentMap map;
  map.group_ = group;
  map.k_ = k;
  map.extended_ = extended;
  auto &report = map.report_;
  report.kind = group->kind();
  report.q = group->q();
  report.k = k;
  report.extended = extended;

  map.gen_bits_.assign(states / 64 + 1, 0);
  std::optional<std::filesystem::path> file;
  if (options.cache_dir)
    file = cache_file(*options.cache_dir, *group, k);
  if (file && load_cache(*file, *group, codec, map.gen_bits_)) {
    report.cache_hit = true;
  } else {
    report.generation_tests = fill_generation_memo(*group, codec, options.workers, map.gen_bits_);
    if (file)
      save_cache(*file, *group, codec, map.gen_bits_);
  }

  auto &parent = map.parent_;
  parent.resize(states);
  for (std::uint64_t s = 0; s < states; ++s)
    parent[s] = static_cast<std::uint32_t>(s);

  auto const moves = move_labels(k, extended);
  std::vector<NielsenMove> forward;
  for (auto const &m : moves) {
    // inverse moves give the same undirected edges
    if (m.sign > 0)
      forward.push_back(m);
  }

  run_workers(options.workers, [&](unsigned w, unsigned workers_) {
    std::uint64_t const lo = states * w / workers_;
    std::uint64_t const hi = states * (w + 1) / workers_;
    std::vector<ElemIndex> e(k);
    if (lo < hi)
      codec.decode(lo, e);
    for (std::uint64_t s = lo; s < hi; ++s) {
      if (test_bit(map.gen_bits_, codec.sorted(e))) {
        for (auto const &m : forward) {
          std::uint64_t u = s;
          auto const ei = e[m.i];
          switch (m.kind) {
          case NielsenMove::Kind::R:
            u = u - ei * codec.weight[m.i] + std::uint64_t(group->mul(ei, e[m.j])) * codec.weight[m.i];
            break;
          case NielsenMove::Kind::L:
            u = u - ei * codec.weight[m.i] + std::uint64_t(group->mul(e[m.j], ei)) * codec.weight[m.i];
            break;
          case NielsenMove::Kind::P:
            u = u - ei * codec.weight[m.i] - e[m.j] * codec.weight[m.j] + std::uint64_t(e[m.j]) * codec.weight[m.i] +
                std::uint64_t(ei) * codec.weight[m.j];
            break;
          case NielsenMove::Kind::I:
            u = u - ei * codec.weight[m.i] + std::uint64_t(group->inv(ei)) * codec.weight[m.i];
            break;
          }
          unite(parent.data(), static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(u));
        }
      }
      for (std::size_t i = k; i-- > 0;) {
        if (++e[i] < n)
          break;
        e[i] = 0;
      }
    }
  });

  // parent[s] <= s, so one ascending pass compresses every path
  std::unordered_map<std::uint32_t, std::size_t> slot;
  std::vector<ElemIndex> e(k, 0);
  for (std::uint64_t s = 0; s < states; ++s) {
    parent[s] = parent[parent[s]];
    if (test_bit(map.gen_bits_, codec.sorted(e))) {
      ++report.vertex_count;
      auto [it, fresh] = slot.try_emplace(parent[s], report.components.size());
      if (fresh)
        report.components.push_back({packed_code(*group, e), 0});
      ++report.components[it->second].size;
    }
    for (std::size_t i = k; i-- > 0;) {
      if (++e[i] < n)
        break;
      e[i] = 0;
    }
  }

  report.memory_bytes = parent.size() * sizeof(std::uint32_t) + map.gen_bits_.size() * sizeof(std::uint64_t);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return map;
}

ComponentReport components(GroupPtr const &group, std::size_t k, bool extended, ComponentOptions const &options)
{
  return component_map(group, k, extended, options).report();
}

std::vector<double> stationary_entry_law(ComponentMap const &map, std::span<ElemIndex const> start)
{
  // Every move has an inverse move, so the walk is a random walk on a
  // regular multigraph and its limit is uniform on the component.
  auto const root = map.root(start);
  std::vector<double> law(map.group()->size(), 0.0);
  double total = 0;
  for (std::uint64_t s = 0; s < map.state_count(); ++s) {
    if (!map.generates(s) || map.root(s) != root)
      continue;
    for (auto x : map.tuple_of(s))
      law[x] += 1;
    total += static_cast<double>(map.k());
  }
  for (auto &p : law)
    p /= total;
  return law;
}

MovePath find_path(GenTuple const &t1, GenTuple const &t2, bool extended, std::uint64_t max_states)
{
  if (!t1.group()->same_as(*t2.group()) || t1.k() != t2.k())
    throw GraphError("path endpoints differ in group or length");
  if (!t1.generates() || !t2.generates())
    throw GraphError("path endpoints must generate");
  auto const &group = *t1.group();
  std::size_t const k = t1.k();
  StateCodec const codec(group.size(), k);
  auto const moves = move_labels(k, extended);

  struct Link
  {
    std::uint64_t from;
    std::uint16_t move;
  };
  constexpr std::uint16_t none = UINT16_MAX;

  std::unordered_map<std::uint64_t, Link> seen[2];
  std::vector<std::uint64_t> frontier[2];
  auto const s1 = codec.encode(t1.entries());
  auto const s2 = codec.encode(t2.entries());
  seen[0][s1] = {s1, none};
  seen[1][s2] = {s2, none};
  frontier[0] = {s1};
  frontier[1] = {s2};

  std::optional<std::uint64_t> meet;
  if (s1 == s2)
    meet = s1;

  std::vector<ElemIndex> e(k);
  while (!meet && !frontier[0].empty() && !frontier[1].empty()) {
    int const side = frontier[0].size() <= frontier[1].size() ? 0 : 1;
    std::vector<std::uint64_t> next;
    for (auto s : frontier[side]) {
      for (std::uint16_t mi = 0; mi < moves.size() && !meet; ++mi) {
        codec.decode(s, e);
        apply_move(group, e, moves[mi]);
        auto const u = codec.encode(e);
        if (!seen[side].try_emplace(u, Link{s, mi}).second)
          continue;
        if (seen[1 - side].contains(u))
          meet = u;
        next.push_back(u);
      }
      if (meet)
        break;
    }
    if (seen[0].size() + seen[1].size() > max_states)
      throw BudgetError("path search exceeded " + std::to_string(max_states) + " states", max_states);
    frontier[side] = std::move(next);
  }
  if (!meet)
    throw NotConnectedError("tuples lie in different components");

  MovePath path{t1, {}};
  for (auto s = *meet; seen[0][s].move != none; s = seen[0][s].from)
    path.moves.push_back(moves[seen[0][s].move]);
  std::reverse(path.moves.begin(), path.moves.end());
  for (auto s = *meet; seen[1][s].move != none; s = seen[1][s].from)
    path.moves.push_back(moves[seen[1][s].move].inverse());

  if (!(path.verify() == t2))
    throw GraphError("path replay does not reach the target");
  return path;
}

} // namespace pralab
