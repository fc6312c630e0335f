#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "pralab/projective.hpp"

using namespace pralab;

TEST_CASE("canonicalize")
{
  auto pgl5 = Group::make(GroupKind::pgl, 5);
  auto psl5 = Group::make(GroupKind::psl, 5);

  CHECK(canonicalize(2, 0, 0, 2, pgl5).matrix() == Mat2{1, 0, 0, 1});
  CHECK(canonicalize(0, 2, 1, 0, pgl5).matrix() == Mat2{0, 1, 3, 0});
  CHECK_THROWS_AS(canonicalize(2, 0, 0, 1, psl5), GroupError);
  CHECK_THROWS_AS(canonicalize(1, 2, 2, 4, pgl5), GroupError); // singular
  CHECK_NOTHROW(canonicalize(2, 0, 0, 1, pgl5));
}

TEST_CASE("canonicalize is invariant under scalars")
{
  std::mt19937_64 rng(7);
  for (std::uint32_t q : {5u, 7u, 9u, 25u}) {
    auto g = Group::make(GroupKind::pgl, q);
    auto const &f = g->field();
    std::uniform_int_distribution<Fq> pick(0, q - 1);
    for (int n = 0; n < 200; ++n) {
      Mat2 m{pick(rng), pick(rng), pick(rng), pick(rng)};
      auto base = g->canonical(m);
      if (!base)
        continue;
      for (Fq s = 1; s < q; ++s) {
        Mat2 scaled{f.mul(s, m[0]), f.mul(s, m[1]), f.mul(s, m[2]), f.mul(s, m[3])};
        CHECK(g->canonical(scaled) == base);
      }
    }
  }
}

TEST_CASE("multiply and invert")
{
  auto pgl5 = Group::make(GroupKind::pgl, 5);
  auto x = canonicalize(1, 1, 0, 1, pgl5);
  auto y = canonicalize(1, 0, 1, 1, pgl5);
  // [[1,1],[0,1]] [[1,0],[1,1]] = [[2,1],[1,1]] computed by hand
  CHECK(multiply(x, y) == canonicalize(2, 1, 1, 1, pgl5));
  CHECK(multiply(x, identity_of(pgl5)) == x);

  auto pgl9 = Group::make(GroupKind::pgl, 9);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<ElemIndex> pick(0, static_cast<ElemIndex>(pgl9->size() - 1));
  for (int n = 0; n < 1000; ++n) {
    GroupElem a(pgl9, pick(rng));
    CHECK(multiply(a, invert(a)) == identity_of(pgl9));
  }

  auto psl7 = Group::make(GroupKind::psl, 7);
  CHECK_THROWS_AS(multiply(x, identity_of(psl7)), GroupError);
}

TEST_CASE("dense layer agrees with matrix arithmetic")
{
  for (std::uint32_t q : {5u, 9u}) {
    for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
      auto g = Group::make(kind, q);
      for (ElemIndex i = 0; i < g->size(); i += 7) {
        for (ElemIndex j = 0; j < g->size(); j += 5)
          CHECK(g->matrix(g->mul(i, j)) == g->mat_mul(g->matrix(i), g->matrix(j)));
        CHECK(g->mul(i, g->inv(i)) == g->identity());
        CHECK(g->order_of(i) == element_order(GroupElem(g, i)));
      }
    }
  }
}

TEST_CASE("action on the projective line")
{
  auto pgl5 = Group::make(GroupKind::pgl, 5);
  auto u = canonicalize(1, 1, 0, 1, pgl5);
  CHECK(act(u, pgl5->infinity()) == pgl5->infinity());
  CHECK(act(u, 0) == 1);
  for (Point z = 0; z <= 5; ++z)
    CHECK(act(identity_of(pgl5), z) == z);

  std::mt19937_64 rng(3);
  for (std::uint32_t q : {5u, 9u}) {
    auto g = Group::make(GroupKind::pgl, q);
    std::uniform_int_distribution<ElemIndex> pick(0, static_cast<ElemIndex>(g->size() - 1));
    for (int n = 0; n < 100; ++n) {
      ElemIndex x = pick(rng);
      std::set<Point> image;
      for (Point z = 0; z < g->point_count(); ++z)
        image.insert(g->act(x, z));
      CHECK(image.size() == q + 1);
    }
  }
}

TEST_CASE("element orders")
{
  auto pgl5 = Group::make(GroupKind::pgl, 5);
  CHECK(element_order(identity_of(pgl5)) == 1);
  CHECK(element_order(canonicalize(1, 1, 0, 1, pgl5)) == 5);
  CHECK(element_order(canonicalize(2, 0, 0, 1, pgl5)) == 4);
}

TEST_CASE("classify")
{
  auto pgl5 = Group::make(GroupKind::pgl, 5);
  CHECK(classify(canonicalize(1, 1, 0, 1, pgl5)) == ElementType::unipotent);
  CHECK(classify(canonicalize(2, 0, 0, 1, pgl5)) == ElementType::split);
  CHECK(classify(canonicalize(0, 1, 2, 0, pgl5)) == ElementType::non_split);
  CHECK(classify(identity_of(pgl5)) == ElementType::identity);
  CHECK(fixed_point_count(*pgl5, canonicalize(2, 0, 0, 1, pgl5).index()) == 2);
  CHECK(fixed_point_count(*pgl5, canonicalize(0, 1, 2, 0, pgl5).index()) == 0);
}

TEST_CASE("group orders")
{
  CHECK(enumerate_group(Group::make(GroupKind::psl, 5)).size() == 60);
  CHECK(enumerate_group(Group::make(GroupKind::pgl, 5)).size() == 120);
  CHECK(enumerate_group(Group::make(GroupKind::psl, 9)).size() == 360);
  CHECK(Group::make(GroupKind::pgl, 13)->size() == 2184);
  CHECK_THROWS_AS(Group::make(GroupKind::pgl, 12), GroupError);

  auto g = Group::make(GroupKind::psl, 7);
  auto const &codes = g->codes();
  CHECK(std::is_sorted(codes.begin(), codes.end()));
  CHECK(std::adjacent_find(codes.begin(), codes.end()) == codes.end());
}

TEST_CASE("fixed points match the element type")
{
  for (std::uint32_t q : {5u, 7u, 9u}) {
    for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
      auto g = Group::make(kind, q);
      for (ElemIndex x = 0; x < g->size(); ++x) {
        auto const fp = fixed_point_count(*g, x);
        switch (g->type_of(x)) {
        case ElementType::identity:
          CHECK(fp == q + 1);
          break;
        case ElementType::unipotent:
          CHECK(fp == 1);
          break;
        case ElementType::split:
          CHECK(fp == 2);
          break;
        case ElementType::non_split:
          CHECK(fp == 0);
          break;
        }
      }
    }
  }
}

TEST_CASE("orders divide p, q - 1 or q + 1")
{
  for (std::uint32_t q : {5u, 7u, 9u, 13u}) {
    auto pgl = Group::make(GroupKind::pgl, q);
    auto psl = Group::make(GroupKind::psl, q);
    std::uint32_t const p = pgl->p();
    for (ElemIndex x = 0; x < pgl->size(); ++x) {
      auto o = pgl->order_of(x);
      CHECK((o == 1 || o == p || (q - 1) % o == 0 || (q + 1) % o == 0));
    }
    for (ElemIndex x = 0; x < psl->size(); ++x) {
      auto o = psl->order_of(x);
      if (psl->type_of(x) == ElementType::unipotent)
        CHECK(o == p);
      else
        CHECK(((q - 1) / 2 % o == 0 || (q + 1) / 2 % o == 0));
    }
  }
}

TEST_CASE("PSL is an index-2 subgroup of PGL")
{
  for (std::uint32_t q : {5u, 7u, 9u}) {
    auto pgl = Group::make(GroupKind::pgl, q);
    auto psl = Group::make(GroupKind::psl, q);
    CHECK(2 * psl->size() == pgl->size());
    for (ElemIndex i = 0; i < psl->size(); ++i) {
      for (ElemIndex j = 0; j < psl->size(); j += 3)
        CHECK(pgl->contains(psl->mat_mul(psl->matrix(i), psl->matrix(j))));
    }
    // the complement is a single coset: t * PSL for any t outside
    std::optional<ElemIndex> t;
    for (ElemIndex x = 0; x < pgl->size() && !t; ++x) {
      if (!psl->from_pgl(x))
        t = x;
    }
    REQUIRE(t);
    std::set<ElemIndex> coset;
    for (ElemIndex i = 0; i < psl->size(); ++i) {
      auto y = pgl->mul(*t, psl->to_pgl(i));
      CHECK(!psl->from_pgl(y));
      coset.insert(y);
    }
    CHECK(coset.size() == psl->size());
  }
}

TEST_CASE("transitivity for q = 5")
{
  auto pgl = Group::make(GroupKind::pgl, 5);
  auto psl = Group::make(GroupKind::psl, 5);
  std::set<std::array<Point, 3>> triples;
  for (ElemIndex x = 0; x < pgl->size(); ++x)
    triples.insert({pgl->act(x, 0), pgl->act(x, 1), pgl->act(x, pgl->infinity())});
  CHECK(triples.size() == 6 * 5 * 4);

  std::set<std::pair<Point, Point>> pairs;
  for (ElemIndex x = 0; x < psl->size(); ++x)
    pairs.insert({psl->act(x, 0), psl->act(x, psl->infinity())});
  CHECK(pairs.size() == 6 * 5);
}

TEST_CASE("text format round trip")
{
  auto g = Group::make(GroupKind::pgl, 9);
  for (ElemIndex x = 0; x < g->size(); x += 11)
    CHECK(g->canonical_checked(g->parse_matrix(g->format(x))) == g->matrix(x));
  CHECK_THROWS_AS(g->parse_matrix("10,20,01"), GroupError);
}
