#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "pralab/spread.hpp"
#include "pralab/subgroup.hpp"

using namespace pralab;

namespace
{

using Perm = std::vector<int>;

Perm compose(Perm const &a, Perm const &b)
{
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    c[i] = a[b[i]];
  return c;
}

std::size_t perm_closure(Perm const &a, Perm const &b)
{
  Perm id(a.size());
  std::iota(id.begin(), id.end(), 0);
  std::set<Perm> seen{id};
  std::vector<Perm> todo{id};
  while (!todo.empty()) {
    auto x = todo.back();
    todo.pop_back();
    for (auto const &g : {a, b}) {
      auto y = compose(x, g);
      if (seen.insert(y).second)
        todo.push_back(y);
    }
  }
  return seen.size();
}

// Exact spread of S_n straight from the definition, on permutations.
std::size_t symmetric_exact_spread(int n, std::size_t max_m)
{
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Perm> all;
  do
    all.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  auto const order = all.size();
  std::vector<Perm> nt(all.begin() + 1, all.end()); // all[0] is the identity
  std::vector<std::vector<bool>> mates(nt.size(), std::vector<bool>(order));
  for (std::size_t i = 0; i < nt.size(); ++i) {
    for (std::size_t h = 0; h < order; ++h)
      mates[i][h] = perm_closure(nt[i], all[h]) == order;
  }
  for (std::size_t m = 1; m <= max_m; ++m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      bool common = false;
      for (std::size_t h = 0; h < order && !common; ++h) {
        common = true;
        for (auto i : idx)
          common = common && mates[i][h];
      }
      if (!common)
        return m - 1;
      std::size_t k = m;
      while (k > 0 && idx[k - 1] == nt.size() - m + k - 1)
        --k;
      if (k == 0)
        break;
      ++idx[k - 1];
      for (auto j = k; j < m; ++j)
        idx[j] = idx[j - 1] + 1;
    }
  }
  return max_m;
}

} // namespace

TEST_CASE("conjugacy classes")
{
  auto g = Group::make(GroupKind::psl, 5);
  auto c = conjugacy_classes(*g);
  CHECK(c.reps.size() == 5); // A5
  std::multiset<std::size_t> sizes(c.sizes.begin(), c.sizes.end());
  CHECK(sizes == std::multiset<std::size_t>{1, 12, 12, 15, 20});
  for (ElemIndex x = 0; x < g->size(); ++x)
    CHECK(g->conj(c.reps[c.class_of[x]], c.conjugator[x]) == x);
}

TEST_CASE("mate sets")
{
  for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
    auto g = Group::make(kind, 5);
    MateTable table(g);
    auto const c = conjugacy_classes(*g);
    for (ElemIndex x = 0; x < g->size(); ++x) {
      if (x == g->identity())
        continue;
      // transported sets equal direct closure tests
      CHECK(table.mates(x) == mate_set(g, x));
      CHECK(table.mates(x).count() == table.mates(c.reps[c.class_of[x]]).count());
      if (g->type_of(x) == ElementType::unipotent)
        CHECK(table.mates(x).any());
    }
    // M(g^x) = M(g)^x
    for (ElemIndex x = 0; x < g->size(); x += 7) {
      for (ElemIndex y = 1; y < g->size(); y += 13) {
        if (y == g->identity())
          continue;
        auto const &base = table.mates(y);
        auto const &moved = table.mates(g->conj(y, x));
        for (ElemIndex h = 0; h < g->size(); ++h)
          CHECK(base.test(h) == moved.test(g->conj(h, x)));
      }
    }
    CHECK_THROWS_AS(table.mates(g->identity()), SpreadError);
    CHECK_THROWS_AS(mate_set(g, g->identity()), SpreadError);
  }
}

TEST_CASE("spread_at_least examples")
{
  auto psl5 = Group::make(GroupKind::psl, 5);
  CHECK(spread_at_least(psl5, 2).verdict == SpreadVerdict::holds);
  auto three = spread_at_least(psl5, 3);
  CHECK(three.verdict == SpreadVerdict::fails);
  CHECK(three.witness.size() == 3);
  CHECK(verify_blocking(*psl5, three.witness));

  auto pgl3 = Group::make(GroupKind::pgl, 3);
  CHECK(spread_at_least(pgl3, 2).verdict == SpreadVerdict::fails);
  // S4: a double transposition lies in the normal Klein group
  auto one = spread_at_least(pgl3, 1);
  CHECK(one.verdict == SpreadVerdict::fails);
  REQUIRE(one.witness.size() == 1);
  CHECK(pgl3->order_of(one.witness[0]) == 2);

  CHECK_THROWS_AS(spread_at_least(psl5, 0), SpreadError);
  SpreadOptions tight;
  tight.set_budget = 10;
  CHECK_THROWS_AS(spread_at_least(psl5, 3, tight), SpreadError);
}

TEST_CASE("class reduction agrees with the full scan")
{
  SpreadOptions full;
  full.class_reduction = false;
  auto psl5 = Group::make(GroupKind::psl, 5);
  for (std::size_t m : {2u, 3u})
    CHECK(spread_at_least(psl5, m).verdict == spread_at_least(psl5, m, full).verdict);
  auto pgl5 = Group::make(GroupKind::pgl, 5);
  for (std::size_t m : {3u, 4u})
    CHECK(spread_at_least(pgl5, m).verdict == spread_at_least(pgl5, m, full).verdict);
}

TEST_CASE("exact spread against permutation groups")
{
  // PGL(2,3) = S4 and PGL(2,5) = S5
  CHECK(symmetric_exact_spread(4, 3) == 0);
  CHECK(exact_spread(Group::make(GroupKind::pgl, 3)).m == 0);
  auto s5 = symmetric_exact_spread(5, 4);
  CHECK(s5 == 3);
  auto r = exact_spread(Group::make(GroupKind::pgl, 5));
  CHECK(r.m == s5);
  CHECK(r.verdict == SpreadVerdict::holds);
  CHECK(r.witness.size() == s5 + 1);
}

TEST_CASE("exact spread of PSL(2,q)")
{
  for (std::uint32_t q : {5u, 9u}) {
    auto r = exact_spread(Group::make(GroupKind::psl, q));
    CHECK(r.m == 2);
    CHECK(r.verdict == SpreadVerdict::holds);
    CHECK(r.witness.size() == 3);
  }
  auto r7 = exact_spread(Group::make(GroupKind::psl, 7));
  CHECK(r7.m >= 3);
}

TEST_CASE("blocking search")
{
  auto psl9 = Group::make(GroupKind::psl, 9);
  auto r = blocking_search(psl9, 3);
  CHECK(r.verdict == SpreadVerdict::fails);
  CHECK(verify_blocking(*psl9, r.witness));

  auto pgl7 = Group::make(GroupKind::pgl, 7);
  auto six = blocking_search(pgl7, 6);
  CHECK(six.verdict == SpreadVerdict::fails);
  CHECK(six.witness.size() == 6);
  CHECK(verify_blocking(*pgl7, six.witness));

  // PGL(2,5) has spread 3, so there is nothing to find
  SpreadOptions small;
  small.search_budget = 200;
  auto none = blocking_search(Group::make(GroupKind::pgl, 5), 3, small);
  CHECK(none.verdict == SpreadVerdict::inconclusive);
  CHECK(none.witness.empty());
  CHECK(none.stats.restarts == 200);

  // same seed, same witness
  CHECK(blocking_search(psl9, 3).to_json(true) == r.to_json(true));
}

TEST_CASE("witness verification")
{
  auto g = Group::make(GroupKind::psl, 5);
  auto r = spread_at_least(g, 3);
  auto w = r.witness;
  CHECK(verify_blocking(*g, w));
  CHECK(!verify_blocking(*g, {w[0], w[0], w[1]}));
  CHECK(!verify_blocking(*g, {g->identity(), w[1], w[2]}));
  CHECK(!verify_blocking(*g, {w[0]})); // a single element has mates
}

TEST_CASE("worker count does not change results")
{
  SpreadOptions one, three;
  three.workers = 3;
  auto pgl7 = Group::make(GroupKind::pgl, 7);
  CHECK(spread_at_least(pgl7, 3, one).to_json(true) == spread_at_least(pgl7, 3, three).to_json(true));
  auto psl9 = Group::make(GroupKind::psl, 9);
  CHECK(spread_at_least(psl9, 3, one).to_json(true) == spread_at_least(psl9, 3, three).to_json(true));
}

TEST_CASE("redundant tuples share a component")
{
  for (auto [kind, q] : {std::pair{GroupKind::psl, 5u}, {GroupKind::pgl, 5u}, {GroupKind::psl, 7u}}) {
    auto r = redundant_component_check(Group::make(kind, q), 3);
    CHECK(r.shared());
    CHECK(r.redundant_tuples > 0);
  }
  CHECK_THROWS_AS(redundant_component_check(Group::make(GroupKind::pgl, 3), 3), SpreadError);
}

TEST_CASE("report formats")
{
  auto r = spread_at_least(Group::make(GroupKind::psl, 5), 3);
  auto j = r.to_json(true);
  CHECK(j["verdict"] == "fails");
  CHECK(j["witness"].size() == 3);
  CHECK(j["witness"][0].contains("matrix"));
  CHECK(!j["stats"].contains("seconds"));
  CHECK(SpreadReport::csv_header() == "group,q,m,mode,verdict\n");
  CHECK(r.csv_row() == "psl,5,3,lower,fails\n");
  CHECK(parse_spread_mode("exact") == SpreadMode::exact);
  CHECK_THROWS_AS(parse_spread_mode("both"), SpreadError);
}
