#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <queue>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "pralab/pra_graph.hpp"
#include "pralab/subgroup.hpp"

using namespace pralab;

namespace
{

GroupPtr psl5() { return Group::make(GroupKind::psl, 5); }

std::vector<ElemIndex> elems(GroupPtr const &g, std::initializer_list<Mat2> ms)
{
  std::vector<ElemIndex> out;
  for (auto const &m : ms)
    out.push_back(g->index_of(g->canonical_checked(m)));
  return out;
}

// Component count by plain BFS over neighbors(), independent of the
// union-find path.
std::size_t bfs_component_count(GroupPtr const &g, std::size_t k, bool extended)
{
  std::set<std::vector<ElemIndex>> seen;
  std::size_t count = 0;
  std::vector<ElemIndex> e(k, 0);
  for (;;) {
    if (!seen.contains(e) && generates(*g, e)) {
      ++count;
      std::queue<GenTuple> todo;
      todo.push(GenTuple(g, e));
      seen.insert(e);
      while (!todo.empty()) {
        auto t = todo.front();
        todo.pop();
        for (auto const &u : neighbors(t, extended)) {
          if (seen.insert(u.entries()).second)
            todo.push(u);
        }
      }
    }
    std::size_t i = k;
    while (i > 0 && ++e[i - 1] == g->size())
      e[--i] = 0;
    if (i == 0)
      break;
  }
  return count;
}

} // namespace

TEST_CASE("move examples")
{
  auto g = psl5();
  Rng rng(11);
  for (int n = 0; n < 50; ++n) {
    ElemIndex a = rng.below(g->size()), b = rng.below(g->size()), c = rng.below(g->size());
    GenTuple t(g, {a, b, c});
    CHECK(apply_move(t, NielsenMove::r(0, 1)).entries() == std::vector{g->mul(a, b), b, c});
    CHECK(apply_move(t, NielsenMove::l(1, 0, -1)).entries() == std::vector{a, g->mul(g->inv(a), b), c});
    CHECK(apply_move(apply_move(t, NielsenMove::invert(0)), NielsenMove::invert(0)) == t);
    CHECK(apply_move(t, NielsenMove::swap(0, 2)).entries() == std::vector{c, b, a});
    for (auto const &m : move_labels(3, true))
      CHECK(apply_move(apply_move(t, m), m.inverse()) == t);
  }
  GenTuple t(g, {0, 1, 2});
  CHECK_THROWS_AS(apply_move(t, NielsenMove::r(0, 3)), GraphError);
  CHECK_THROWS_AS(apply_move(t, NielsenMove::r(1, 1)), GraphError);
  CHECK_THROWS_AS(apply_move(t, NielsenMove::invert(3)), GraphError);
}

TEST_CASE("move text format")
{
  for (auto const &m : move_labels(4, true))
    CHECK(parse_move(to_string(m)) == m);
  CHECK(to_string(NielsenMove::l(2, 0, -1)) == "L- 3 1");
  CHECK(to_string(NielsenMove::swap(0, 1)) == "P 1 2");
  CHECK(to_string(NielsenMove::invert(1)) == "I 2");
  CHECK_THROWS_AS(parse_move("X 1 2"), GraphError);
  CHECK_THROWS_AS(parse_move("R+ 0 2"), GraphError);
  CHECK_THROWS_AS(parse_move("R+ 1 2 3"), GraphError);

  auto g = psl5();
  MovePath path{GenTuple(g, {1, 2}), {NielsenMove::r(0, 1), NielsenMove::invert(1)}};
  CHECK(MovePath::parse_moves(path.to_text()) == path.moves);
}

TEST_CASE("tuple text format")
{
  auto g = Group::make(GroupKind::pgl, 9);
  GenTuple t(g, {3, 100, 700});
  CHECK(parse_tuple(g, t.to_string()) == t);
  CHECK_THROWS(parse_tuple(g, "1,0,0"));
}

TEST_CASE("neighbors")
{
  auto g = psl5();
  auto t = GenTuple(g, elems(g, {{1, 1, 0, 1}, {1, 0, 1, 1}}));
  CHECK(move_labels(2, false).size() == 8);
  CHECK(move_labels(2, true).size() == 11);
  CHECK(neighbors(t, false).size() <= 8);

  Rng rng(5);
  for (int n = 0; n < 1000; ++n) {
    auto s = random_generating_tuple(g, 3, rng);
    for (auto const &u : neighbors(s, n % 2 == 0)) {
      CHECK(u.generates());
      auto back = neighbors(u, n % 2 == 0);
      CHECK(std::find(back.begin(), back.end(), s) != back.end());
    }
  }
}

TEST_CASE("walk")
{
  auto g = psl5();
  Rng rng(9);
  auto t0 = random_generating_tuple(g, 4, rng);
  auto still = pra_walk(t0, 0, 1);
  CHECK(still.tuple == t0);
  CHECK(std::find(t0.entries().begin(), t0.entries().end(), still.sample) != t0.entries().end());

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto r = pra_walk(t0, 100, seed);
    CHECK(r.tuple.generates());
    auto again = pra_walk(t0, 100, seed);
    CHECK(again.tuple == r.tuple);
    CHECK(again.sample == r.sample);
  }
  CHECK_THROWS_AS(pra_walk(GenTuple(g, {g->identity(), g->identity()}), 10, 1), GraphError);
}

TEST_CASE("components of small graphs match plain BFS")
{
  auto pgl3 = Group::make(GroupKind::pgl, 3);
  for (std::size_t k : {2u, 3u}) {
    for (bool ext : {false, true})
      CHECK(components(pgl3, k, ext).component_count() == bfs_component_count(pgl3, k, ext));
  }
  auto g = psl5();
  for (bool ext : {false, true})
    CHECK(components(g, 2, ext).component_count() == bfs_component_count(g, 2, ext));
}

TEST_CASE("vertex counts match direct generation tests")
{
  auto g = psl5();
  std::uint64_t pairs = 0;
  for (ElemIndex a = 0; a < g->size(); ++a) {
    for (ElemIndex b = 0; b < g->size(); ++b) {
      ElemIndex const t[2] = {a, b};
      pairs += closure(g, t).order() == g->size();
    }
  }
  auto r = components(g, 2, true);
  CHECK(r.vertex_count == pairs);
  std::uint64_t sum = 0;
  for (auto s : r.sizes())
    sum += s;
  CHECK(sum == r.vertex_count);
}

TEST_CASE("connectivity at k = 3")
{
  CHECK(components(psl5(), 3, true).component_count() == 1);
  CHECK(components(Group::make(GroupKind::psl, 7), 3, true).component_count() == 1);
}

TEST_CASE("sandwich inequality and the connected-iff instance")
{
  auto g = psl5();
  for (std::size_t k : {2u, 3u}) {
    auto plain = components(g, k, false).component_count();
    auto ext = components(g, k, true).component_count();
    CHECK(ext <= plain);
    CHECK(plain <= 2 * ext);
    if (k == 3)
      CHECK((plain == 1) == (ext == 1));
  }
}

TEST_CASE("reports are independent of worker count")
{
  auto g = Group::make(GroupKind::pgl, 5);
  auto one = components(g, 2, false, {.workers = 1});
  auto three = components(g, 2, false, {.workers = 3});
  CHECK(one.to_json(true).dump() == three.to_json(true).dump());
  auto again = components(g, 2, false, {.workers = 1});
  CHECK(one.to_json(true).dump() == again.to_json(true).dump());
}

TEST_CASE("component labels are least packed codes")
{
  auto g = psl5();
  auto map = component_map(g, 2, false);
  for (auto const &c : map.report().components) {
    std::uint64_t least = UINT64_MAX;
    for (std::uint64_t s = 0; s < map.state_count(); ++s) {
      if (map.generates(s) && packed_code(*g, map.tuple_of(map.root(s))) == c.label)
        least = std::min(least, packed_code(*g, map.tuple_of(s)));
    }
    CHECK(least == c.label);
  }
}

TEST_CASE("state budget")
{
  auto g = Group::make(GroupKind::psl, 7);
  CHECK_THROWS_AS(components(g, 4, true), BudgetError);
  try {
    components(g, 4, true);
  } catch (BudgetError const &e) {
    CHECK(e.required() == 168ull * 168 * 168 * 168);
  }
}

TEST_CASE("generation cache round trip")
{
  auto dir = std::filesystem::temp_directory_path() / "pralab-test-cache";
  std::filesystem::remove_all(dir);
  auto g = Group::make(GroupKind::pgl, 5);
  ComponentOptions opt{.cache_dir = dir};
  auto first = components(g, 2, true, opt);
  CHECK(!first.cache_hit);
  auto second = components(g, 2, true, opt);
  CHECK(second.cache_hit);
  CHECK(first.to_json(true) == second.to_json(true));
  std::filesystem::remove_all(dir);
}

TEST_CASE("find_path")
{
  auto g = psl5();
  Rng rng(21);
  auto t = random_generating_tuple(g, 3, rng);
  CHECK(find_path(t, t, true).size() == 0);
  auto m = NielsenMove::l(2, 0, -1);
  CHECK(find_path(t, apply_move(t, m), true).size() == 1);

  for (int n = 0; n < 20; ++n) {
    auto a = random_generating_tuple(g, 3, rng);
    auto b = random_generating_tuple(g, 3, rng);
    auto path = find_path(a, b, true);
    CHECK(path.verify() == b);
  }

  auto map = component_map(g, 2, false);
  auto const &cs = map.report().components;
  REQUIRE(cs.size() >= 2);
  std::optional<std::uint64_t> s0, s1;
  for (std::uint64_t s = 0; s < map.state_count() && !(s0 && s1); ++s) {
    if (!map.generates(s))
      continue;
    auto const lbl = packed_code(*g, map.tuple_of(map.root(s)));
    if (lbl == cs[0].label && !s0)
      s0 = s;
    if (lbl == cs[1].label && !s1)
      s1 = s;
  }
  CHECK_THROWS_AS(find_path(GenTuple(g, map.tuple_of(*s0)), GenTuple(g, map.tuple_of(*s1)), false),
                  NotConnectedError);
}

TEST_CASE("walk converges to its limit law")
{
  auto g = psl5();
  auto map = component_map(g, 3, false);
  REQUIRE(map.report().component_count() == 1);
  Rng rng(17);
  auto t0 = random_generating_tuple(g, 3, rng);
  auto law = stationary_entry_law(map, t0.entries());

  // limit law from direct closure counts: weight of x is the number of
  // generating triples with x in front (all positions are alike)
  std::vector<double> direct(g->size(), 0);
  double total = 0;
  for (ElemIndex x = 0; x < g->size(); ++x) {
    for (ElemIndex y = 0; y < g->size(); ++y) {
      for (ElemIndex z = 0; z < g->size(); ++z) {
        ElemIndex const t[3] = {x, y, z};
        if (closure_order(*g, t) == g->size()) {
          direct[x] += 1;
          total += 1;
        }
      }
    }
  }
  for (ElemIndex x = 0; x < g->size(); ++x)
    CHECK(law[x] == doctest::Approx(direct[x] / total).epsilon(1e-12));
  // not uniform: the identity sits in fewer generating tuples
  CHECK(law[g->identity()] < 1.0 / 60);

  constexpr std::uint64_t samples = 200'000;
  std::vector<double> observed(g->size(), 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    auto e = t0.entries();
    observed[pra_walk_in_place(*g, e, 60, rng)] += 1;
  }
  double stat = 0;
  for (ElemIndex x = 0; x < g->size(); ++x) {
    double const expect = samples * law[x];
    stat += (observed[x] - expect) * (observed[x] - expect) / expect;
  }
  boost::math::chi_squared_distribution<double> dist(59);
  CHECK(cdf(complement(dist, stat)) > 0.001);
}
