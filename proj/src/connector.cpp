#include "pralab/connector.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "pralab/subgroup.hpp"

namespace pralab
{

std::vector<Point> fixed_points(Group const &group, ElemIndex x)
{
  std::vector<Point> out;
  for (Point z = 0; z < group.point_count(); ++z) {
    if (group.act(x, z) == z)
      out.push_back(z);
  }
  return out;
}

boost::dynamic_bitset<> cyclic_normalizer(Group const &group, ElemIndex w)
{
  ElemIndex const gen[1] = {w};
  auto const n = normalizer(closure(group.shared_from_this(), gen));
  boost::dynamic_bitset<> out(group.size());
  for (ElemIndex x = 0; x < group.size(); ++x)
    out[x] = n.contains(group.to_pgl(x));
  return out;
}

bool structural_span(Group const &group, std::span<ElemIndex const> gens)
{
  auto const h = closure(group.shared_from_this(), gens);
  return h.is_proper() && is_structural(h);
}

MovePath ConnectorTrace::path() const
{
  MovePath p{input, {}};
  for (auto const &s : stages)
    p.moves.insert(p.moves.end(), s.moves.begin(), s.moves.end());
  return p;
}

std::size_t ConnectorTrace::move_count() const
{
  std::size_t n = 0;
  for (auto const &s : stages)
    n += s.moves.size();
  return n;
}

namespace
{

nlohmann::json stages_json(std::vector<ConnectorStage> const &stages)
{
  auto arr = nlohmann::json::array();
  for (auto const &s : stages) {
    auto moves = nlohmann::json::array();
    for (auto const &m : s.moves)
      moves.push_back(to_string(m));
    arr.push_back({{"label", s.label}, {"moves", moves}, {"certificates", s.certificates}});
  }
  return arr;
}

} // namespace

nlohmann::json ConnectorTrace::to_json() const
{
  nlohmann::json j;
  j["group"] = input.group()->name();
  j["input"] = input.to_json();
  j["stages"] = stages_json(stages);
  j["endpoint"] = endpoint.to_json();
  j["redundant_witness_index"] = redundant_index ? nlohmann::json(*redundant_index + 1) : nlohmann::json();
  j["move_count"] = move_count();
  j["fallback_count"] = fallback_count;
  return j;
}

namespace
{

/// Letters (entry position, exponent sign); the word's value is the product
/// of the letters from left to right.
using Word = std::vector<std::pair<std::uint32_t, int>>;

Word inverse(Word w)
{
  std::reverse(w.begin(), w.end());
  for (auto &l : w)
    l.second = -l.second;
  return w;
}

Word power_word(std::uint32_t pos, int sign, std::uint32_t n) { return Word(n, {pos, sign}); }

std::string type_name(Group const &g, ElemIndex x)
{
  return to_string(classify(GroupElem(g.shared_from_this(), x)));
}

class Run
{
public:
  Run(GenTuple const &t, ConnectorOptions const &opt)
      : t(t), input(t), g(*t.group()), opt(opt)
  {}

  GenTuple t;
  GenTuple input;
  Group const &g;
  ConnectorOptions opt;
  std::vector<ConnectorStage> stages;
  std::size_t fallbacks = 0;

  std::size_t k() const { return t.k(); }
  ElemIndex e(std::size_t i) const { return t[i]; }
  std::uint32_t order(std::size_t i) const { return g.order_of(t[i]); }
  bool good(ElemIndex x) const
  {
    auto const o = g.order_of(x);
    return o != 1 && o != 2 && o != g.p();
  }

  void begin(std::string label) { stages.push_back({std::move(label), {}, {}}); }
  void note(std::string s) { stages.back().certificates.push_back(std::move(s)); }

  void move(NielsenMove const &m)
  {
    apply_move(g, t.entries(), m);
    stages.back().moves.push_back(m);
  }

  bool redundant() const { return t.is_redundant(); }
  bool done() const { return opt.short_circuit && redundant(); }

  nlohmann::json trace_json() const
  {
    return {{"group", g.name()}, {"input", input.to_json()}, {"stages", stages_json(stages)},
            {"current", t.to_json()}};
  }

  [[noreturn]] void fail(std::string const &what) const
  {
    throw ConnectorError(what + " at " + t.to_string(), trace_json());
  }

  ElemIndex value(Word const &w) const
  {
    ElemIndex v = g.identity();
    for (auto [pos, s] : w)
      v = g.mul(v, s > 0 ? t[pos] : g.inv(t[pos]));
    return v;
  }

  /// entry i <- entry i * word
  void right_mul(std::uint32_t i, Word const &w)
  {
    for (auto [pos, s] : w)
      move(NielsenMove::r(i, pos, s));
  }

  /// entry i <- word * entry i
  void left_mul(std::uint32_t i, Word const &w)
  {
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      move(NielsenMove::l(i, it->first, it->second));
  }

  /// entry i <- g entry_i g^-1 with g the value of the word
  void conjugate(std::uint32_t i, Word const &w)
  {
    left_mul(i, w);
    right_mul(i, inverse(w));
  }

  void swap_to_front(std::size_t i)
  {
    if (i != 0)
      move(NielsenMove::swap(0, static_cast<std::uint32_t>(i)));
  }

  /// Shortest word in the given positions whose value satisfies pred.
  std::optional<Word> find_word(std::vector<std::uint32_t> const &positions,
                                std::function<bool(ElemIndex)> const &pred) const
  {
    if (pred(g.identity()))
      return Word{};
    std::vector<std::pair<std::uint32_t, int>> letters;
    std::vector<ElemIndex> values;
    for (auto pos : positions) {
      for (int s : {1, -1}) {
        letters.push_back({pos, s});
        values.push_back(s > 0 ? t[pos] : g.inv(t[pos]));
      }
    }
    constexpr ElemIndex none = UINT32_MAX;
    std::vector<ElemIndex> parent(g.size(), none);
    std::vector<std::uint16_t> via(g.size(), 0);
    std::deque<ElemIndex> queue{g.identity()};
    parent[g.identity()] = g.identity();
    while (!queue.empty()) {
      auto const x = queue.front();
      queue.pop_front();
      for (std::uint16_t l = 0; l < letters.size(); ++l) {
        auto const y = g.mul(x, values[l]);
        if (parent[y] != none)
          continue;
        parent[y] = x;
        via[y] = l;
        if (pred(y)) {
          Word w;
          for (auto z = y; z != g.identity(); z = parent[z])
            w.push_back(letters[via[z]]);
          std::reverse(w.begin(), w.end());
          return w;
        }
        queue.push_back(y);
      }
    }
    return std::nullopt;
  }

  std::vector<std::uint32_t> positions_except(std::size_t skip) const
  {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < k(); ++i) {
      if (i != skip)
        out.push_back(i);
    }
    return out;
  }

  /// Bounded breadth-first search over the extended graph for a tuple
  /// satisfying goal. Recorded as its own stage.
  void search(std::string const &label, std::string const &reason,
              std::function<bool(std::span<ElemIndex const>)> const &goal)
  {
    if (!opt.search_fallback)
      fail(reason + " (search fallback disabled)");
    ++fallbacks;
    auto const resume = stages.back().label;
    begin(label);
    note(reason);

    auto const moves = move_labels(k(), true);
    std::uint64_t const n = g.size();
    auto encode = [&](std::span<ElemIndex const> e) {
      std::uint64_t s = 0;
      for (auto x : e)
        s = s * n + x;
      return s;
    };
    auto decode = [&](std::uint64_t s, std::vector<ElemIndex> &e) {
      for (std::size_t i = e.size(); i-- > 0;) {
        e[i] = static_cast<ElemIndex>(s % n);
        s /= n;
      }
    };
    struct Link
    {
      std::uint64_t from;
      std::uint16_t move;
    };
    std::unordered_map<std::uint64_t, Link> seen;
    auto const start = encode(t.entries());
    seen[start] = {start, UINT16_MAX};
    std::deque<std::uint64_t> queue{start};
    std::optional<std::uint64_t> hit;
    if (goal(t.entries()))
      hit = start;
    std::vector<ElemIndex> e(k());
    while (!hit && !queue.empty() && seen.size() < opt.search_states) {
      auto const s = queue.front();
      queue.pop_front();
      for (std::uint16_t mi = 0; mi < moves.size() && !hit; ++mi) {
        decode(s, e);
        apply_move(g, e, moves[mi]);
        auto const u = encode(e);
        if (!seen.try_emplace(u, Link{s, mi}).second)
          continue;
        if (goal(e))
          hit = u;
        queue.push_back(u);
      }
    }
    if (!hit)
      fail(reason + "; search over " + std::to_string(seen.size()) + " tuples found nothing");
    std::vector<NielsenMove> path;
    for (auto s = *hit; seen[s].move != UINT16_MAX; s = seen[s].from)
      path.push_back(moves[seen[s].move]);
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      move(*it);
    note("search found a tuple after " + std::to_string(path.size()) + " moves");
    begin(resume);
  }

  bool redundant(std::span<ElemIndex const> e) const { return is_redundant(g, e); }
};

std::string entry_name(std::size_t i) { return "entry " + std::to_string(i + 1); }

void clear_normalizer_impl(Run &r, std::size_t pivot)
{
  auto const &g = r.g;
  auto const w = r.e(pivot);
  if (w == g.identity())
    r.fail("pivot is the identity");
  auto const n = cyclic_normalizer(g, w);

  for (std::size_t y = 0; y < r.k(); ++y) {
    if (y == pivot || !n[r.e(y)])
      continue;
    std::optional<std::size_t> z;
    for (std::size_t c = 0; c < r.k() && !z; ++c) {
      if (c != pivot && c != y && !n[r.e(c)])
        z = c;
    }
    if (!z)
      r.fail("every entry normalizes <w>");
    r.move(NielsenMove::r(static_cast<std::uint32_t>(y), static_cast<std::uint32_t>(*z)));
  }
  for (std::size_t y = 0; y < r.k(); ++y) {
    if (y == pivot || r.order(y) != 2)
      continue;
    r.move(NielsenMove::l(static_cast<std::uint32_t>(y), static_cast<std::uint32_t>(pivot)));
    // |wy| = 2 would put y in N(<w>)
    if (r.order(y) == 2 || n[r.e(y)])
      r.fail("w y is an involution or normalizes <w>");
  }

  auto const check = cyclic_normalizer(g, r.e(pivot));
  for (std::size_t y = 0; y < r.k(); ++y) {
    if (y == pivot)
      continue;
    auto const o = element_order(r.t.elem(y));
    if (check[r.e(y)] || o == 2)
      r.fail("clear-normalizer postcondition");
    r.note(entry_name(y) + " outside N_G(<w>), order " + std::to_string(o));
  }
}

void order_fix_impl(Run &r)
{
  auto const &g = r.g;
  std::uint32_t const p = g.p();
  std::size_t const k = r.k();
  auto certify = [&] {
    auto const o = element_order(r.t.elem(0));
    if (o == 1 || o == 2 || o == p)
      r.fail("order-fix postcondition");
    r.note("entry 1 has order " + std::to_string(o) + ", not in {2," + std::to_string(p) + "}, " +
           type_name(g, r.e(0)));
  };
  auto find_good = [&]() -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < k; ++i) {
      if (r.good(r.e(i)))
        return i;
    }
    return std::nullopt;
  };
  auto goal = [&](std::span<ElemIndex const> e) {
    if (r.redundant(e))
      return true;
    return std::any_of(e.begin(), e.end(), [&](ElemIndex x) { return r.good(x); });
  };

  for (std::size_t iter = 0;; ++iter) {
    if (iter > g.size())
      r.fail("order-fix iteration cap reached");
    if (r.done())
      return;
    if (auto i = find_good()) {
      r.swap_to_front(*i);
      certify();
      return;
    }
    // an identity entry (only seen without the short-circuit) copies another
    auto one = std::find(r.t.entries().begin(), r.t.entries().end(), g.identity());
    if (one != r.t.entries().end()) {
      auto const i = static_cast<std::uint32_t>(one - r.t.entries().begin());
      auto other = std::find_if(r.t.entries().begin(), r.t.entries().end(), [&](ElemIndex x) { return x != g.identity(); });
      r.move(NielsenMove::r(i, static_cast<std::uint32_t>(other - r.t.entries().begin())));
      continue;
    }

    bool const involutions = std::all_of(r.t.entries().begin(), r.t.entries().end(),
                                         [&](ElemIndex x) { return g.order_of(x) == 2; });
    if (involutions) {
      // some product of two entries is not an involution, or G is abelian
      std::optional<std::pair<std::size_t, std::size_t>> pick, three;
      for (std::size_t i = 0; i < k && !pick; ++i) {
        for (std::size_t j = 0; j < k && !pick; ++j) {
          if (i == j)
            continue;
          auto const o = g.order_of(g.mul(r.e(i), r.e(j)));
          if (o > 2 && (p > 3 || o != 3))
            pick = {i, j};
          else if (o == 3 && !three)
            three = {i, j};
        }
      }
      if (pick) {
        r.note("involutions " + entry_name(pick->first) + ", " + entry_name(pick->second) + " have product of order " +
               std::to_string(g.order_of(g.mul(r.e(pick->first), r.e(pick->second)))));
        r.move(NielsenMove::r(static_cast<std::uint32_t>(pick->first), static_cast<std::uint32_t>(pick->second)));
        continue;
      }
      if (three) {
        r.search("order-fix search", "two involutions have a product of order 3", goal);
        continue;
      }
      r.fail("entries are pairwise commuting involutions");
    }

    // an entry of order p becomes the pivot
    std::size_t i = 0;
    while (r.order(i) != p)
      ++i;
    r.swap_to_front(i);
    clear_normalizer_impl(r, 0);
    if (r.done() || find_good())
      continue;

    if (p > 3) {
      // all entries unipotent; a non-commuting pair gives |x y^i| outside {2,p}
      bool moved = false;
      for (std::size_t a = 0; a < k && !moved; ++a) {
        for (std::size_t b = 0; b < k && !moved; ++b) {
          if (a == b || g.mul(r.e(a), r.e(b)) == g.mul(r.e(b), r.e(a)))
            continue;
          for (std::uint32_t n = 1; n < p && !moved; ++n) {
            if (r.good(g.mul(r.e(a), g.pow(r.e(b), n)))) {
              r.note("non-commuting unipotents " + entry_name(a) + ", " + entry_name(b) + ": exponent " +
                     std::to_string(n));
              r.right_mul(static_cast<std::uint32_t>(a), power_word(static_cast<std::uint32_t>(b), 1, n));
              moved = true;
            }
          }
          if (!moved)
            r.fail("no exponent i with |x y^i| outside {2,p}");
        }
      }
      if (!moved)
        r.fail("unipotent entries all commute");
      continue;
    }

    // p = 3: w of order 3, the others of order 3 and outside N(<w>)
    auto const w = r.e(0);
    bool moved = false;
    for (std::size_t a = 1; a < k && !moved; ++a) {
      for (std::uint32_t n = 1; n <= 2 && !moved; ++n) {
        if (r.good(g.mul(r.e(a), g.pow(w, n)))) {
          r.right_mul(static_cast<std::uint32_t>(a), power_word(0, 1, n));
          moved = true;
        }
      }
    }
    if (moved)
      continue;
    for (std::size_t a = 1; a < k; ++a) {
      ElemIndex const pair[2] = {w, r.e(a)};
      if (classify_subgroup(closure(r.t.group(), pair)).label == SubgroupLabel::a4)
        r.note("<w, " + entry_name(a) + "> = A4, routed through involutions");
      std::uint32_t n = 1;
      while (n <= 2 && g.order_of(g.mul(r.e(a), g.pow(w, n))) != 2)
        ++n;
      if (n > 2)
        r.fail("x w and x w^2 both have order 3");
      r.right_mul(static_cast<std::uint32_t>(a), power_word(0, 1, n));
    }
    r.note("entries 2.." + std::to_string(k) + " made involutions by x <- x w^i");
    std::optional<std::pair<std::size_t, std::size_t>> pick, three;
    for (std::size_t a = 1; a < k && !pick; ++a) {
      for (std::size_t b = 1; b < k && !pick; ++b) {
        if (a == b)
          continue;
        auto const o = g.order_of(g.mul(r.e(a), r.e(b)));
        if (r.good(g.mul(r.e(a), r.e(b))))
          pick = {a, b};
        else if (o == 3 && !three)
          three = {a, b};
      }
    }
    if (pick) {
      r.move(NielsenMove::r(static_cast<std::uint32_t>(pick->first), static_cast<std::uint32_t>(pick->second)));
      continue;
    }
    if (three) {
      r.search("order-fix search", "two involutions have a product of order 3", goal);
      continue;
    }
    r.fail("involutions generate an elementary abelian group of order 8");
  }
}

void certify_destructuralized(Run &r)
{
  auto const &g = r.g;
  auto const w = r.e(0);
  for (std::size_t u = 1; u < r.k(); ++u) {
    ElemIndex const gens[2] = {w, g.conj(w, r.e(u))};
    auto const h = closure(g.shared_from_this(), gens);
    if (h.is_proper() && is_structural(h))
      r.fail("<w, w^u> structural for " + entry_name(u));
    r.note("<w, w^u> non-structural for " + entry_name(u) + ": " +
           (h.is_proper() ? to_string(classify_subgroup(h)) : std::string("full group")));
  }
}

void destructuralize_impl(Run &r)
{
  auto const &g = r.g;
  auto const w = r.e(0);
  if (!r.good(w))
    r.fail("pivot order in {1, 2, p}");
  clear_normalizer_impl(r, 0);
  if (r.done())
    return;

  if (g.type_of(w) == ElementType::non_split) {
    certify_destructuralized(r);
    return;
  }

  auto const fp = fixed_points(g, w);
  if (fp.size() != 2)
    r.fail("split pivot without two fixed points");
  auto const n = cyclic_normalizer(g, w);
  auto is_structural_pair = [&](ElemIndex x) {
    ElemIndex const gens[2] = {w, x};
    return structural_span(g, gens);
  };
  auto contains = [](std::vector<Point> const &v, Point z) { return std::find(v.begin(), v.end(), z) != v.end(); };

  // <w, y> non-structural for every entry
  for (std::uint32_t y = 1; y < r.k(); ++y) {
    if (r.done())
      return;
    if (!is_structural_pair(r.e(y)))
      continue;
    auto fy = fixed_points(g, r.e(y));
    Point a, b;
    if (contains(fy, fp[0]))
      a = fp[0], b = fp[1];
    else if (contains(fy, fp[1]))
      a = fp[1], b = fp[0];
    else
      r.fail("structural <w, y> with y fixing neither fixed point of w");

    if (fy.size() == 1) {
      r.note(entry_name(y) + " unipotent at a fixed point of w: y <- y w");
      r.move(NielsenMove::r(y, 0));
      if (r.order(y) == 2) {
        r.note("y w is an involution: y <- y w^2");
        r.move(NielsenMove::r(y, 0));
      }
      fy = fixed_points(g, r.e(y));
    }
    if (fy.size() != 2 || !contains(fy, a))
      r.fail("y does not fix a second point");
    Point const d = fy[0] == a ? fy[1] : fy[0];
    if (d == b)
      r.fail("y lies in the torus fixing both points of w");

    auto helper = r.find_word(r.positions_except(y), [&](ElemIndex x) {
      auto const z = g.act(x, a);
      return z != a && z != b;
    });
    if (!helper) {
      r.search("destructuralize search", "no word in the other entries moves a off {a, b}",
               [&](std::span<ElemIndex const> e) {
                 if (r.redundant(e))
                   return true;
                 ElemIndex const gens[2] = {e[0], e[y]};
                 return e[0] == w && !structural_span(g, gens);
               });
      continue;
    }
    bool done = false;
    for (std::uint32_t i = 0; i <= 2 && !done; ++i) {
      Word gk = *helper;
      gk.insert(gk.end(), i, {0u, 1});
      auto const image = g.act(r.value(gk), d);
      if (image == a || image == b)
        continue;
      r.note(entry_name(y) + " <- g y g^-1 with g = z' w^" + std::to_string(i) + ", word length " +
             std::to_string(gk.size()));
      r.conjugate(y, gk);
      done = true;
    }
    if (!done)
      r.fail("no g_k moves the fixed points off {a, b}");
    if (is_structural_pair(r.e(y)) || r.order(y) == 2 || n[r.e(y)])
      r.fail("<w, y> still structural after conjugation");
  }

  // <w, w^y> non-structural for every entry
  for (std::uint32_t y = 1; y < r.k(); ++y) {
    if (r.done())
      return;
    auto const wy = g.conj(w, r.e(y));
    if (!is_structural_pair(wy))
      continue;
    auto const fwy = fixed_points(g, wy);
    Point a, b;
    if (contains(fwy, fp[0]))
      a = fp[0], b = fp[1];
    else if (contains(fwy, fp[1]))
      a = fp[1], b = fp[0];
    else
      r.fail("structural <w, w^y> with w^y fixing neither fixed point of w");

    auto helper = r.find_word(r.positions_except(y), [&](ElemIndex x) {
      auto const z = g.act(x, a);
      return z != a && z != b;
    });
    if (!helper) {
      r.search("destructuralize search", "no word in the other entries moves a off {a, b}",
               [&](std::span<ElemIndex const> e) {
                 if (r.redundant(e))
                   return true;
                 ElemIndex const gens[2] = {e[0], g.conj(e[0], e[y])};
                 return e[0] == w && !structural_span(g, gens);
               });
      continue;
    }
    auto const yinv = g.inv(r.e(y));
    bool done = false;
    for (std::uint32_t i = 0; i <= 2 && !done; ++i) {
      Word zw = *helper;
      zw.insert(zw.end(), i, {0u, 1});
      auto const image = g.act(g.mul(r.value(zw), yinv), a);
      if (image == a || image == b)
        continue;
      r.note(entry_name(y) + " <- (z' w^" + std::to_string(i) + " y^-1)^-1");
      Word tail = power_word(0, -1, i);
      auto const zinv = inverse(*helper);
      tail.insert(tail.end(), zinv.begin(), zinv.end());
      r.right_mul(y, tail);
      done = true;
    }
    if (!done)
      r.fail("no g_k moves a off {a, b}");
    if (is_structural_pair(g.conj(w, r.e(y))))
      r.fail("<w, w^y> still structural");
  }
  certify_destructuralized(r);
}

/// BFS inside the extended graph of the triple at `pos` until two of its
/// entries generate the same subgroup as all three.
void finish_small(Run &r, std::array<std::uint32_t, 3> const &pos, Subgroup const &h)
{
  auto const &g = r.g;
  auto const gp = g.shared_from_this();
  auto const target = h.order();
  auto goal = [&](std::array<ElemIndex, 3> const &e) {
    for (int drop = 0; drop < 3; ++drop) {
      ElemIndex const pair[2] = {e[(drop + 1) % 3], e[(drop + 2) % 3]};
      if (closure(gp, pair).order() == target)
        return true;
    }
    return false;
  };
  auto const moves = move_labels(3, true);
  std::uint64_t const n = g.size();
  auto encode = [&](std::array<ElemIndex, 3> const &e) { return (std::uint64_t(e[0]) * n + e[1]) * n + e[2]; };
  auto decode = [&](std::uint64_t s) {
    std::array<ElemIndex, 3> e;
    e[2] = static_cast<ElemIndex>(s % n);
    e[1] = static_cast<ElemIndex>(s / n % n);
    e[0] = static_cast<ElemIndex>(s / n / n);
    return e;
  };
  std::array<ElemIndex, 3> start{r.e(pos[0]), r.e(pos[1]), r.e(pos[2])};
  std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint16_t>> seen;
  seen[encode(start)] = {encode(start), UINT16_MAX};
  std::deque<std::uint64_t> queue{encode(start)};
  std::optional<std::uint64_t> hit;
  if (goal(start))
    hit = encode(start);
  while (!hit && !queue.empty()) {
    auto const s = queue.front();
    queue.pop_front();
    for (std::uint16_t mi = 0; mi < moves.size() && !hit; ++mi) {
      auto e = decode(s);
      apply_move(g, e, moves[mi]);
      auto const u = encode(e);
      if (!seen.try_emplace(u, std::pair{s, mi}).second)
        continue;
      if (goal(e))
        hit = u;
      queue.push_back(u);
    }
  }
  if (!hit)
    r.fail("no redundant triple in the extended graph of the small subgroup");
  std::vector<NielsenMove> path;
  for (auto s = *hit; seen[s].second != UINT16_MAX; s = seen[s].first)
    path.push_back(moves[seen[s].second]);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    auto m = *it;
    m.i = pos[m.i];
    if (m.kind != NielsenMove::Kind::I)
      m.j = pos[m.j];
    r.move(m);
  }
  r.note("triple at entries " + std::to_string(pos[0] + 1) + "," + std::to_string(pos[1] + 1) + "," +
         std::to_string(pos[2] + 1) + " generates " + to_string(classify_subgroup(h)) + "; " +
         std::to_string(path.size()) + " moves inside it reach a redundant triple (" + std::to_string(seen.size()) +
         " triples searched)");
}

void subfield_resolve_impl(Run &r)
{
  auto const &g = r.g;
  auto const gp = g.shared_from_this();
  auto const &pgl = g.pgl();
  if (r.k() != 4) {
    r.search("subfield-resolve search", "triple analysis needs k = 4",
             [&](std::span<ElemIndex const> e) { return r.redundant(e); });
    return;
  }

  // H1 = <w,x,y>, H2 = <w,x,z>, H3 = <w,y,z>; Hi omits entry 4 - i
  std::uint64_t previous = 0;
  for (std::size_t iter = 0;; ++iter) {
    if (r.done())
      return;
    if (iter > g.size())
      r.fail("subfield-resolve iteration cap reached");

    std::array<std::array<std::uint32_t, 3>, 3> const triples{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}}};
    std::vector<Subgroup> h;
    std::vector<SubgroupClass> cls;
    for (auto const &tr : triples) {
      ElemIndex const gens[3] = {r.e(tr[0]), r.e(tr[1]), r.e(tr[2])};
      h.push_back(closure(gp, gens));
      cls.push_back(classify_subgroup(h.back()));
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (cls[i].is_small()) {
        finish_small(r, triples[i], h[i]);
        if (!is_redundant(g, r.t.entries()))
          r.fail("tuple not redundant after finishing the small triple");
        return;
      }
    }
    // a full triple leaves the fourth entry redundant
    if (std::any_of(h.begin(), h.end(), [](Subgroup const &s) { return !s.is_proper(); }))
      return;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!cls[i].is_subfield())
        r.fail("H" + std::to_string(i + 1) + " is " + to_string(cls[i]) + ", neither small nor subfield");
    }

    // order x, y, z so that q1 <= q2 <= q3, where the q of the triple
    // omitting entry j is the subfield order of that triple
    std::array<std::uint32_t, 4> q_omit{};
    std::array<std::uint64_t, 4> n_omit{};
    for (std::size_t i = 0; i < 3; ++i) {
      q_omit[3 - i] = cls[i].q1;
      n_omit[3 - i] = normalizer(h[i]).order();
    }
    std::array<std::uint32_t, 3> perm{1, 2, 3};
    std::stable_sort(perm.begin(), perm.end(), [&](auto a, auto b) { return n_omit[a] > n_omit[b]; });
    if (perm != std::array<std::uint32_t, 3>{1, 2, 3}) {
      // apply the permutation with swaps: position s receives entry perm[s-1]
      std::array<std::uint32_t, 4> at{0, 1, 2, 3}; // at[pos] = original entry now there
      for (std::uint32_t s = 1; s <= 3; ++s) {
        std::uint32_t cur = s;
        while (at[cur] != perm[s - 1])
          ++cur;
        if (cur != s) {
          r.move(NielsenMove::swap(s, cur));
          std::swap(at[s], at[cur]);
        }
      }
      continue; // recompute with the new order
    }

    std::uint64_t const sum = n_omit[1] + n_omit[2] + n_omit[3];
    r.note("q1 = " + std::to_string(q_omit[3]) + ", q2 = " + std::to_string(q_omit[2]) +
           ", q3 = " + std::to_string(q_omit[1]) + ", normalizer-order sum " + std::to_string(sum));
    if (previous && sum <= previous)
      r.fail("normalizer-order sum did not increase (" + std::to_string(previous) + " -> " + std::to_string(sum) + ")");
    previous = sum;

    if (n_omit[3] == n_omit[1]) {
      if (r.redundant())
        return;
      // equal normalizer orders: two triple subgroups of equal order are
      // conjugate, and the argument forces them equal, so the tuple would
      // already be redundant
      std::size_t a = 0, b = 1;
      if (h[0].order() != h[1].order())
        a = h[0].order() == h[2].order() ? 0 : 1, b = 2;
      auto const c = find_conjugator(h[a], h[b]);
      r.fail("equal-order case reached with H" + std::to_string(a + 1) + " and H" + std::to_string(b + 1) +
             " conjugate by " + pgl.format(c) + (h[a] == h[b] ? " and equal" : " but distinct") +
             " while the tuple is not redundant");
    }

    // x <- c^n x with <c> = C_{H3}(w) and <c^n u> = <c, u>
    auto const w = r.e(0);
    auto const x = r.e(1);
    ElemIndex const lg[2] = {w, g.conj(w, x)};
    auto const l1 = normalizer(closure(gp, lg));
    auto const wp = g.to_pgl(w);
    auto const wxp = g.to_pgl(g.conj(w, x));
    std::optional<ElemIndex> dt;
    for (auto d : l1.elements()) {
      if (pgl.conj(wp, d) == wxp) {
        dt = d;
        break;
      }
    }
    if (!dt)
      r.fail("no element of N(L1) conjugates w to w^x");
    auto const u = pgl.mul(g.to_pgl(x), pgl.inv(*dt));
    auto const cent = centralizer(h[2], w);
    if (!cent.generator)
      r.fail("C_{H3}(w) is not cyclic");
    auto const c = *cent.generator;
    auto const cp = g.to_pgl(c);
    ElemIndex const cu[2] = {cp, u};
    auto const joint = closure(g.pgl_ptr(), cu).order();
    std::optional<std::uint32_t> n;
    for (std::uint32_t m = 0; m < g.order_of(c) && !n; ++m) {
      ElemIndex const one[1] = {pgl.mul(pgl.pow(cp, m), u)};
      if (closure(g.pgl_ptr(), one).order() == joint)
        n = m;
    }
    if (!n)
      r.fail("no n with <c^n u> = <c, u>");
    auto const cn = g.pow(c, *n);
    auto word = r.find_word({0, 2, 3}, [&](ElemIndex v) { return v == cn; });
    if (!word)
      r.fail("c^n is not a word in w, y, z");
    r.note("x <- c^n x with |c| = " + std::to_string(g.order_of(c)) + ", n = " + std::to_string(*n) +
           ", word length " + std::to_string(word->size()));
    r.left_mul(1, *word);
  }
}

void require_generating(GenTuple const &t)
{
  if (!t.generates())
    throw GraphError("tuple " + t.to_string() + " does not generate " + t.group()->name());
}

MovePath stage_path(Run const &r)
{
  MovePath p{r.input, {}};
  for (auto const &s : r.stages)
    p.moves.insert(p.moves.end(), s.moves.begin(), s.moves.end());
  return p;
}

} // namespace

MovePath clear_normalizer(GenTuple const &t, std::size_t pivot, ConnectorOptions const &options)
{
  require_generating(t);
  if (pivot >= t.k())
    throw GraphError("pivot out of range");
  Run r(t, options);
  r.begin("clear-normalizer");
  clear_normalizer_impl(r, pivot);
  return stage_path(r);
}

MovePath order_fix(GenTuple const &t, ConnectorOptions const &options)
{
  require_generating(t);
  Run r(t, options);
  r.begin("order-fix");
  order_fix_impl(r);
  return stage_path(r);
}

MovePath destructuralize(GenTuple const &t, ConnectorOptions const &options)
{
  require_generating(t);
  Run r(t, options);
  r.begin("destructuralize");
  destructuralize_impl(r);
  return stage_path(r);
}

MovePath subfield_resolve(GenTuple const &t, ConnectorOptions const &options)
{
  require_generating(t);
  Run r(t, options);
  r.begin("subfield-resolve");
  subfield_resolve_impl(r);
  return stage_path(r);
}

ConnectorTrace connect_to_redundant(GenTuple const &t, ConnectorOptions const &options)
{
  require_generating(t);
  if (t.k() < 4 || (t.k() > 4 && !options.experimental_k))
    throw GraphError("the connector takes generating 4-tuples (k > 4 needs the experimental flag)");
  ConnectorOptions opt = options;
  opt.short_circuit = true;
  Run r(t, opt);
  auto const &g = r.g;

  if (!r.redundant()) {
    if (g.q() == 3) {
      r.begin("small-group");
      r.search("small-group search", "q = 3: the group itself is small",
               [&](std::span<ElemIndex const> e) { return r.redundant(e); });
    } else {
      r.begin("clear-normalizer");
      clear_normalizer_impl(r, 0);
      if (!r.done()) {
        r.begin("order-fix");
        order_fix_impl(r);
      }
      if (!r.done()) {
        r.begin("destructuralize");
        destructuralize_impl(r);
      }
      if (!r.done()) {
        r.begin("subfield-resolve");
        subfield_resolve_impl(r);
      }
    }
  }

  ConnectorTrace trace{t, {}, r.t, std::nullopt, r.fallbacks};
  for (auto &s : r.stages) {
    if (!s.moves.empty() || !s.certificates.empty())
      trace.stages.push_back(std::move(s));
  }
  MovePath const path = trace.path();
  GenTuple end = path.verify();
  if (!(end == r.t))
    throw ConnectorError("replayed path ends elsewhere", trace.to_json());
  trace.redundant_index = redundant_index(g, end.entries());
  if (!trace.redundant_index)
    throw ConnectorError("endpoint is not redundant", trace.to_json());
  return trace;
}

LemmaOracleReport not_2_p_oracle(GroupPtr const &group)
{
  auto const &g = *group;
  auto const p = g.p();
  LemmaOracleReport out{"not_2_p", g.kind(), g.q()};
  std::vector<ElemIndex> unip;
  for (ElemIndex x = 0; x < g.size(); ++x) {
    if (g.order_of(x) == p)
      unip.push_back(x);
  }
  for (auto x : unip) {
    for (auto y : unip) {
      if (g.mul(x, y) == g.mul(y, x))
        continue;
      ++out.cases;
      bool found = false;
      auto yi = y;
      for (std::uint32_t i = 1; i < p && !found; ++i, yi = g.mul(yi, y)) {
        auto const o = g.order_of(g.mul(x, yi));
        found = o != 2 && o != p;
      }
      if (found)
        continue;
      ElemIndex const gens[2] = {x, y};
      if (p == 3 && classify_subgroup(closure(group, gens)).label == SubgroupLabel::a4)
        ++out.alternatives;
      else
        ++out.violations;
    }
  }
  return out;
}

LemmaOracleReport normalizer_oracle(GroupPtr const &group)
{
  auto const &g = *group;
  LemmaOracleReport out{"normalizer", g.kind(), g.q()};
  std::vector<ElemIndex> involutions;
  for (ElemIndex y = 0; y < g.size(); ++y) {
    if (g.order_of(y) == 2)
      involutions.push_back(y);
  }
  for (ElemIndex w = 0; w < g.size(); ++w) {
    if (w == g.identity())
      continue;
    auto const n = cyclic_normalizer(g, w);
    for (auto y : involutions) {
      if (n.test(y))
        continue;
      ++out.cases;
      if (g.order_of(g.mul(w, y)) == 2)
        ++out.violations;
    }
  }
  return out;
}

} // namespace pralab
