#include "pralab/spread.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>

#include <boost/math/special_functions/binomial.hpp>

#include "pralab/random.hpp"
#include "pralab/subgroup.hpp"

namespace pralab
{

namespace
{

constexpr std::size_t max_table_order = 10'000;

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool pair_generates(Group const &g, ElemIndex a, ElemIndex b)
{
  ElemIndex const gens[2] = {a, b};
  return closure_order(g, gens) == g.size();
}

std::vector<ElemIndex> nontrivial(Group const &g)
{
  std::vector<ElemIndex> out;
  for (ElemIndex x = 0; x < g.size(); ++x) {
    if (x != g.identity())
      out.push_back(x);
  }
  return out;
}

SpreadReport blank_report(Group const &g, SpreadMode mode, std::size_t m, SpreadOptions const &opt)
{
  SpreadReport r;
  r.kind = g.kind();
  r.q = g.q();
  r.mode = mode;
  r.m = m;
  r.class_reduction = opt.class_reduction;
  return r;
}

void set_witness(SpreadReport &r, Group const &g, std::vector<ElemIndex> w)
{
  if (!verify_blocking(g, w))
    throw SpreadError("blocking witness failed re-verification");
  std::sort(w.begin(), w.end());
  r.witness = w;
  r.witness_codes.clear();
  r.witness_matrices.clear();
  for (auto x : w) {
    r.witness_codes.push_back(g.code(x));
    r.witness_matrices.push_back(g.format(x));
  }
}

void check_level(Group const &g, std::size_t m)
{
  if (m == 0)
    throw SpreadError("spread level must be at least 1");
  if (m > g.size() - 1)
    throw SpreadError("spread level " + std::to_string(m) + " exceeds the number of nontrivial elements");
}

struct Shard
{
  ElemIndex first;
  std::vector<ElemIndex> rest; // ascending
};

struct ShardResult
{
  std::uint64_t checked = 0;
  std::vector<ElemIndex> counterexample;
  bool done = false;
};

// Depth-first over (m-1)-subsets of shard.rest, intersecting mate sets
// word by word. Stops at the first empty intersection; a short blocking
// prefix is padded to m elements.
class ShardScan
{
public:
  ShardScan(MateTable const &t, Shard const &s, std::size_t m, std::atomic<std::size_t> const &first_fail,
            std::size_t index)
      : t_(t), s_(s), m_(m), w_(t.words_per_set()), first_fail_(first_fail), index_(index),
        buf_((m + 1) * w_), chosen_(m)
  {
  }

  ShardResult run()
  {
    auto const *m0 = t_.mate_words(s_.first);
    std::copy(m0, m0 + w_, buf_.begin());
    if (m_ == 1 || none(buf_.data())) {
      ++out_.checked;
      if (none(buf_.data()))
        record(0);
    } else {
      dfs(0, 0, buf_.data());
    }
    out_.done = !aborted_;
    return out_;
  }

private:
  bool none(std::uint64_t const *a) const
  {
    for (std::size_t i = 0; i < w_; ++i) {
      if (a[i])
        return false;
    }
    return true;
  }

  bool meets(std::uint64_t const *a, std::uint64_t const *b) const
  {
    for (std::size_t i = 0; i < w_; ++i) {
      if (a[i] & b[i])
        return true;
    }
    return false;
  }

  void record(std::size_t depth)
  {
    out_.counterexample = {s_.first};
    for (std::size_t d = 0; d < depth; ++d)
      out_.counterexample.push_back(s_.rest[chosen_[d]]);
    for (std::size_t i = 0; out_.counterexample.size() < m_; ++i) {
      auto const x = s_.rest[i];
      if (std::find(out_.counterexample.begin(), out_.counterexample.end(), x) == out_.counterexample.end())
        out_.counterexample.push_back(x);
    }
  }

  // true once a counterexample is recorded or the scan is cancelled
  bool dfs(std::size_t depth, std::size_t from, std::uint64_t const *cur)
  {
    auto const need = m_ - 1;
    auto const n = s_.rest.size();
    if (depth + 1 == need) {
      for (auto c = from; c < n; ++c) {
        if ((++out_.checked & 0xfffff) == 0 && first_fail_.load(std::memory_order_relaxed) < index_) {
          aborted_ = true;
          return true;
        }
        if (!meets(cur, t_.mate_words(s_.rest[c]))) {
          chosen_[depth] = c;
          record(depth + 1);
          return true;
        }
      }
      return false;
    }
    auto *next = buf_.data() + (depth + 1) * w_;
    for (auto c = from; c + (need - depth) <= n; ++c) {
      auto const *mc = t_.mate_words(s_.rest[c]);
      for (std::size_t i = 0; i < w_; ++i)
        next[i] = cur[i] & mc[i];
      chosen_[depth] = c;
      if (none(next)) {
        ++out_.checked;
        record(depth + 1);
        return true;
      }
      if (dfs(depth + 1, c + 1, next))
        return true;
    }
    return false;
  }

  MateTable const &t_;
  Shard const &s_;
  std::size_t m_, w_;
  std::atomic<std::size_t> const &first_fail_;
  std::size_t index_;
  std::vector<std::uint64_t> buf_;
  std::vector<std::size_t> chosen_;
  ShardResult out_;
  bool aborted_ = false;
};

} // namespace

ConjugacyClasses conjugacy_classes(Group const &g)
{
  auto const n = g.size();
  ConjugacyClasses c;
  c.class_of.assign(n, SIZE_MAX);
  c.conjugator.assign(n, g.identity());
  for (ElemIndex r = 0; r < n; ++r) {
    if (c.class_of[r] != SIZE_MAX)
      continue;
    auto const id = c.reps.size();
    c.reps.push_back(r);
    c.sizes.push_back(0);
    for (ElemIndex x = 0; x < n; ++x) {
      auto const y = g.conj(r, x);
      if (c.class_of[y] == SIZE_MAX) {
        c.class_of[y] = id;
        c.conjugator[y] = x;
        ++c.sizes[id];
      }
    }
  }
  return c;
}

MateTable::MateTable(GroupPtr group) : group_(std::move(group))
{
  auto const &g = *group_;
  auto const n = g.size();
  if (n > max_table_order)
    throw SpreadError("mate table needs |G| <= " + std::to_string(max_table_order));
  classes_ = conjugacy_classes(g);
  std::vector<boost::dynamic_bitset<>> rep_mates(classes_.reps.size(), boost::dynamic_bitset<>(n));
  for (std::size_t c = 0; c < classes_.reps.size(); ++c) {
    auto const r = classes_.reps[c];
    if (r == g.identity())
      continue;
    for (ElemIndex h = 0; h < n; ++h) {
      ++closure_tests_;
      if (pair_generates(g, r, h))
        rep_mates[c].set(h);
    }
  }
  // g = x^-1 r x, so <g,h> = G iff <r, x h x^-1> = G
  mates_.assign(n, boost::dynamic_bitset<>(n));
  for (ElemIndex x = 0; x < n; ++x) {
    auto const &base = rep_mates[classes_.class_of[x]];
    auto const back = g.inv(classes_.conjugator[x]);
    for (ElemIndex h = 0; h < n; ++h) {
      if (base.test(g.conj(h, back)))
        mates_[x].set(h);
    }
  }
  words_ = (n + 63) / 64;
  flat_.assign(n * words_, 0);
  for (ElemIndex x = 0; x < n; ++x) {
    for (auto h = mates_[x].find_first(); h != boost::dynamic_bitset<>::npos; h = mates_[x].find_next(h))
      flat_[x * words_ + h / 64] |= std::uint64_t{1} << (h % 64);
  }
}

boost::dynamic_bitset<> const &MateTable::mates(ElemIndex g) const
{
  if (g == group_->identity())
    throw SpreadError("mate set of the identity");
  return mates_.at(g);
}

boost::dynamic_bitset<> mate_set(GroupPtr const &group, ElemIndex g)
{
  if (g == group->identity())
    throw SpreadError("mate set of the identity");
  boost::dynamic_bitset<> out(group->size());
  for (ElemIndex h = 0; h < group->size(); ++h) {
    if (pair_generates(*group, g, h))
      out.set(h);
  }
  return out;
}

std::string to_string(SpreadMode mode)
{
  switch (mode) {
  case SpreadMode::lower:
    return "lower";
  case SpreadMode::upper:
    return "upper";
  case SpreadMode::exact:
    return "exact";
  }
  return "?";
}

std::string to_string(SpreadVerdict verdict)
{
  switch (verdict) {
  case SpreadVerdict::holds:
    return "holds";
  case SpreadVerdict::fails:
    return "fails";
  case SpreadVerdict::inconclusive:
    return "inconclusive";
  }
  return "?";
}

SpreadMode parse_spread_mode(std::string_view text)
{
  if (text == "lower")
    return SpreadMode::lower;
  if (text == "upper")
    return SpreadMode::upper;
  if (text == "exact")
    return SpreadMode::exact;
  throw SpreadError("unknown spread mode '" + std::string(text) + "'");
}

nlohmann::json SpreadReport::to_json(bool deterministic) const
{
  nlohmann::json j;
  j["group"] = to_string(kind);
  j["q"] = q;
  j["mode"] = to_string(mode);
  j["m"] = m;
  j["verdict"] = to_string(verdict);
  j["class_reduction"] = class_reduction;
  auto w = nlohmann::json::array();
  for (std::size_t i = 0; i < witness.size(); ++i)
    w.push_back({{"code", witness_codes[i]}, {"matrix", witness_matrices[i]}});
  j["witness"] = w;
  j["stats"] = {{"sets_checked", stats.sets_checked},
                {"closure_tests", stats.closure_tests},
                {"restarts", stats.restarts}};
  if (!deterministic)
    j["stats"]["seconds"] = stats.seconds;
  return j;
}

std::string SpreadReport::csv_header() { return "group,q,m,mode,verdict\n"; }

std::string SpreadReport::csv_row() const
{
  return to_string(kind) + "," + std::to_string(q) + "," + std::to_string(m) + "," + to_string(mode) + "," +
         to_string(verdict) + "\n";
}

bool verify_blocking(Group const &g, std::vector<ElemIndex> const &witness)
{
  std::set<ElemIndex> distinct(witness.begin(), witness.end());
  if (distinct.size() != witness.size() || distinct.contains(g.identity()))
    return false;
  for (ElemIndex h = 0; h < g.size(); ++h) {
    bool blocked = false;
    for (auto x : witness) {
      if (!pair_generates(g, x, h)) {
        blocked = true;
        break;
      }
    }
    if (!blocked)
      return false;
  }
  return true;
}

SpreadReport spread_at_least(GroupPtr const &group, std::size_t m, SpreadOptions const &options)
{
  return spread_at_least(MateTable(group), m, options);
}

SpreadReport spread_at_least(MateTable const &table, std::size_t m, SpreadOptions const &options)
{
  auto const start = std::chrono::steady_clock::now();
  auto const &g = table.group();
  check_level(g, m);
  auto report = blank_report(g, SpreadMode::lower, m, options);
  report.stats.closure_tests = table.closure_tests();

  // Conjugating a whole m-set keeps the property, so some member can be
  // taken to be a class representative.
  auto const all = nontrivial(g);
  std::vector<Shard> shards;
  long double sets = 0;
  auto add = [&](ElemIndex first, std::vector<ElemIndex> rest) {
    if (rest.size() + 1 < m)
      return;
    sets += boost::math::binomial_coefficient<long double>(static_cast<unsigned>(rest.size()),
                                                           static_cast<unsigned>(m - 1));
    shards.push_back({first, std::move(rest)});
  };
  if (options.class_reduction) {
    for (auto r : table.classes().reps) {
      if (r == g.identity())
        continue;
      std::vector<ElemIndex> rest;
      for (auto x : all) {
        if (x != r)
          rest.push_back(x);
      }
      add(r, std::move(rest));
    }
  } else {
    for (std::size_t i = 0; i < all.size(); ++i)
      add(all[i], std::vector<ElemIndex>(all.begin() + static_cast<std::ptrdiff_t>(i) + 1, all.end()));
  }
  if (sets > static_cast<long double>(options.set_budget)) {
    throw SpreadBudgetError("exhaustive scan needs about " + std::to_string(static_cast<double>(sets)) +
                      " sets, over the budget of " + std::to_string(options.set_budget) +
                      "; use the upper mode (blocking search) instead");
  }

  std::vector<ShardResult> results(shards.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_fail{SIZE_MAX};
  auto work = [&] {
    for (;;) {
      auto const i = next.fetch_add(1);
      if (i >= shards.size() || i > first_fail.load())
        return;
      results[i] = ShardScan(table, shards[i], m, first_fail, i).run();
      if (!results[i].counterexample.empty()) {
        auto cur = first_fail.load();
        while (i < cur && !first_fail.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  auto const workers = std::max(1u, options.workers);
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w)
    pool.emplace_back(work);
  work();
  pool.clear();

  report.verdict = SpreadVerdict::holds;
  for (auto const &r : results) {
    report.stats.sets_checked += r.checked;
    if (!r.counterexample.empty()) {
      report.verdict = SpreadVerdict::fails;
      set_witness(report, g, r.counterexample);
      break;
    }
  }
  report.stats.seconds = seconds_since(start);
  return report;
}

SpreadReport blocking_search(GroupPtr const &group, std::size_t m, SpreadOptions const &options)
{
  return blocking_search(MateTable(group), m, options);
}

SpreadReport blocking_search(MateTable const &table, std::size_t m, SpreadOptions const &options)
{
  auto const start = std::chrono::steady_clock::now();
  auto const &g = table.group();
  check_level(g, m);
  auto report = blank_report(g, SpreadMode::upper, m, options);
  report.stats.closure_tests = table.closure_tests();
  auto const all = nontrivial(g);
  auto const n = g.size();
  Rng rng(options.seed);

  // common mates of the chosen set, skipping position `skip`
  auto common = [&](std::vector<ElemIndex> const &chosen, std::size_t skip) {
    boost::dynamic_bitset<> c(n);
    c.set();
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (i != skip)
        c &= table.mates(chosen[i]);
    }
    return c;
  };
  // the element leaving the fewest common mates, ties broken at random
  auto best_addition = [&](boost::dynamic_bitset<> const &left, std::vector<ElemIndex> const &chosen) {
    std::size_t best = SIZE_MAX, ties = 0;
    ElemIndex pick = all.front();
    for (auto x : all) {
      if (std::find(chosen.begin(), chosen.end(), x) != chosen.end())
        continue;
      auto const c = (left & table.mates(x)).count();
      if (c < best) {
        best = c;
        ties = 1;
        pick = x;
      } else if (c == best && rng.below(++ties) == 0) {
        pick = x;
      }
    }
    return std::pair{pick, best};
  };

  report.verdict = SpreadVerdict::inconclusive;
  for (std::uint64_t restart = 0; restart < options.search_budget; ++restart) {
    ++report.stats.restarts;
    std::vector<ElemIndex> chosen{all[rng.below(all.size())]};
    auto left = table.mates(chosen[0]);
    while (chosen.size() < m && left.any()) {
      auto const [x, c] = best_addition(left, chosen);
      chosen.push_back(x);
      left &= table.mates(x);
    }
    // swap single elements while that strictly shrinks the common mates
    for (bool improved = left.any(); improved && left.any();) {
      improved = false;
      for (std::size_t i = 0; i < chosen.size() && left.any(); ++i) {
        auto others = chosen;
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(i));
        auto const without = common(chosen, i);
        auto const [x, c] = best_addition(without, others);
        if (c < left.count()) {
          chosen[i] = x;
          left = without & table.mates(x);
          improved = true;
        }
      }
    }
    if (left.none()) {
      for (std::size_t i = 0; chosen.size() < m; ++i) {
        if (std::find(chosen.begin(), chosen.end(), all[i]) == chosen.end())
          chosen.push_back(all[i]);
      }
      report.verdict = SpreadVerdict::fails;
      set_witness(report, g, chosen);
      break;
    }
  }
  report.stats.seconds = seconds_since(start);
  return report;
}

SpreadReport exact_spread(GroupPtr const &group, SpreadOptions const &options)
{
  auto const start = std::chrono::steady_clock::now();
  MateTable table(group);
  auto const &g = *group;
  auto report = blank_report(g, SpreadMode::exact, 0, options);
  report.stats.closure_tests = table.closure_tests();
  auto const top = std::min(options.max_m, g.size() - 1);
  for (std::size_t m = 1; m <= top; ++m) {
    SpreadReport step;
    try {
      step = spread_at_least(table, m, options);
    } catch (SpreadBudgetError const &) {
      step = blocking_search(table, m, options);
      if (step.verdict != SpreadVerdict::fails) {
        report.stats.restarts += step.stats.restarts;
        break; // m - 1 stays a lower bound only
      }
    }
    report.stats.sets_checked += step.stats.sets_checked;
    report.stats.restarts += step.stats.restarts;
    if (step.verdict == SpreadVerdict::fails) {
      report.verdict = SpreadVerdict::holds;
      report.witness = step.witness;
      report.witness_codes = step.witness_codes;
      report.witness_matrices = step.witness_matrices;
      break;
    }
    report.m = m;
  }
  report.stats.seconds = seconds_since(start);
  return report;
}

nlohmann::json RedundantComponentReport::to_json() const
{
  return {{"group", to_string(kind)},     {"q", q},
          {"k", k},                       {"redundant_tuples", redundant_tuples},
          {"labels", labels},             {"component_count", component_count},
          {"shared", shared()}};
}

RedundantComponentReport redundant_component_check(GroupPtr const &group, std::size_t k,
                                                   ComponentOptions const &options)
{
  if (k < 3)
    throw SpreadError("redundant component check needs k >= 3");
  MateTable table(group);
  if (spread_at_least(table, 2).verdict != SpreadVerdict::holds)
    throw SpreadError(group->name() + " does not have spread 2");
  auto const map = component_map(group, k, true, options);
  auto const &g = *group;

  RedundantComponentReport out;
  out.kind = g.kind();
  out.q = g.q();
  out.k = k;
  out.component_count = map.report().component_count();
  std::set<std::uint64_t> roots;
  std::vector<ElemIndex> sub(k - 1);
  for (std::uint64_t s = 0; s < map.state_count(); ++s) {
    if (!map.generates(s))
      continue;
    auto const t = map.tuple_of(s);
    bool redundant = false;
    for (std::size_t drop = 0; drop < k && !redundant; ++drop) {
      std::size_t j = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (i != drop)
          sub[j++] = t[i];
      }
      if (k == 3) {
        redundant = sub[0] != g.identity() && table.mates(sub[0]).test(sub[1]);
      } else {
        redundant = generates(g, sub);
      }
    }
    if (redundant) {
      ++out.redundant_tuples;
      roots.insert(map.root(s));
    }
  }
  for (auto r : roots)
    out.labels.push_back(packed_code(g, map.tuple_of(r)));
  std::sort(out.labels.begin(), out.labels.end());
  return out;
}

} // namespace pralab
