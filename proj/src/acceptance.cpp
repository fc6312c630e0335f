#include "pralab/acceptance.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "pralab/connector.hpp"
#include "pralab/spread.hpp"
#include "pralab/subgroup.hpp"

namespace pralab
{

namespace
{

using Clock = std::chrono::steady_clock;

std::string fmt(char const *f, double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

CriterionResult criterion(int id, std::string name)
{
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

std::string gname(GroupKind kind, std::uint32_t q) { return Group::make(kind, q)->name(); }

ComponentOptions component_options(AcceptanceOptions const &o)
{
  ComponentOptions c;
  c.workers = o.workers;
  if (o.cache_dir)
    c.cache_dir = *o.cache_dir;
  return c;
}

CriterionResult connectivity(AcceptanceOptions const &o)
{
  auto r = criterion(1, "connectivity of extended graph at k=3");
  r.pass = true;
  for (std::uint32_t q : {5u, 7u}) {
    auto rep = components(Group::make(GroupKind::psl, q), 3, true, component_options(o));
    r.pass = r.pass && rep.component_count() == 1;
    r.detail += "PSL(2," + std::to_string(q) + "): " + std::to_string(rep.component_count()) + " component(s), " +
                std::to_string(rep.vertex_count) + " vertices; ";
    r.data.push_back(rep.to_json(true));
  }
  return r;
}

CriterionResult main_theorem(AcceptanceOptions const &o)
{
  auto r = criterion(2, "extended graph at k=4");
  r.pass = true;
  struct Case
  {
    GroupKind kind;
    std::uint32_t q;
    bool required;
  };
  for (auto c : {Case{GroupKind::psl, 5, true}, Case{GroupKind::pgl, 3, true}, Case{GroupKind::psl, 7, false},
                 Case{GroupKind::pgl, 5, false}}) {
    auto const name = gname(c.kind, c.q);
    try {
      auto rep = components(Group::make(c.kind, c.q), 4, true, component_options(o));
      r.pass = r.pass && rep.component_count() == 1;
      r.detail += name + ": " + std::to_string(rep.component_count()) + " component(s); ";
      r.data.push_back(rep.to_json(true));
    } catch (BudgetError const &e) {
      r.pass = r.pass && !c.required;
      r.detail += name + ": over budget (" + std::to_string(e.required()) + " states); ";
      r.data.push_back({{"group", name}, {"budget_exceeded", true}, {"required_states", e.required()}});
    }
  }
  return r;
}

CriterionResult sandwich(AcceptanceOptions const &o)
{
  auto r = criterion(3, "sandwich inequality for PSL(2,5)");
  r.pass = true;
  auto g = Group::make(GroupKind::psl, 5);
  for (std::size_t k : {2u, 3u}) {
    auto const plain = components(g, k, false, component_options(o)).component_count();
    auto const ext = components(g, k, true, component_options(o)).component_count();
    r.pass = r.pass && ext <= plain && plain <= 2 * ext;
    r.detail += "k=" + std::to_string(k) + ": " + std::to_string(ext) + " <= " + std::to_string(plain) +
                " <= " + std::to_string(2 * ext) + "; ";
    r.data.push_back({{"k", k}, {"extended", ext}, {"plain", plain}});
  }
  return r;
}

CriterionResult connected_iff(AcceptanceOptions const &o)
{
  auto r = criterion(4, "plain and extended graphs connected together at k=3");
  auto g = Group::make(GroupKind::psl, 5);
  auto const plain = components(g, 3, false, component_options(o)).component_count();
  auto const ext = components(g, 3, true, component_options(o)).component_count();
  r.pass = (plain == 1) == (ext == 1);
  r.detail = "PSL(2,5): plain " + std::to_string(plain) + ", extended " + std::to_string(ext);
  r.data = {{"plain", plain}, {"extended", ext}};
  return r;
}

CriterionResult spread_tables(AcceptanceOptions const &o)
{
  auto r = criterion(5, "exact spread tables");
  SpreadOptions so;
  so.workers = o.workers;
  so.seed = o.seed;
  struct Row
  {
    GroupKind kind;
    std::uint32_t q;
    std::size_t table;
  };
  std::vector<std::string> mismatched;
  bool expected_only = true;
  for (auto row : {Row{GroupKind::psl, 5, 2}, Row{GroupKind::psl, 9, 2}, Row{GroupKind::pgl, 3, 1},
                   Row{GroupKind::pgl, 5, 2}}) {
    auto g = Group::make(row.kind, row.q);
    auto rep = exact_spread(g, so);
    bool const exact = rep.verdict == SpreadVerdict::holds && verify_blocking(*g, rep.witness);
    bool const ok = exact && rep.m == row.table;
    r.detail += g->name() + ": table " + std::to_string(row.table) + ", computed " +
                (exact ? std::to_string(rep.m) : ">= " + std::to_string(rep.m)) + "; ";
    r.data.push_back(rep.to_json(true));
    if (!ok) {
      mismatched.push_back(g->name());
      // S4 has spread 0 and S5 spread 3 by direct computation
      bool const known = exact && ((row.kind == GroupKind::pgl && row.q == 3 && rep.m == 0) ||
                                   (row.kind == GroupKind::pgl && row.q == 5 && rep.m == 3));
      expected_only = expected_only && known;
    }
  }
  auto pgl7 = Group::make(GroupKind::pgl, 7);
  MateTable table(pgl7);
  auto four = spread_at_least(table, 4, so);
  bool const lower_ok = four.verdict == SpreadVerdict::holds;
  r.detail += "PGL(2,7): spread 4 " + std::string(lower_ok ? "holds" : "fails");
  r.data.push_back(four.to_json(true));
  auto five = spread_at_least(table, 5, so);
  if (five.verdict == SpreadVerdict::fails) {
    r.detail += ", 5-element blocking witness found";
  } else {
    r.detail += ", no 5-element blocking witness exists (spread 5 holds exhaustively)";
  }
  r.data.push_back(five.to_json(true));
  r.pass = lower_ok && mismatched.empty();
  r.known_unattainable = !r.pass && lower_ok && expected_only;
  return r;
}

CriterionResult redundant_component(AcceptanceOptions const &o)
{
  auto r = criterion(6, "redundant tuples share one component at k=3");
  r.pass = true;
  for (auto [kind, q] : {std::pair{GroupKind::psl, 5u}, {GroupKind::pgl, 5u}, {GroupKind::psl, 7u}}) {
    auto rep = redundant_component_check(Group::make(kind, q), 3, component_options(o));
    r.pass = r.pass && rep.shared();
    r.detail += gname(kind, q) + ": " + std::to_string(rep.redundant_tuples) + " redundant tuples in " +
                std::to_string(rep.labels.size()) + " component(s); ";
    r.data.push_back(rep.to_json());
  }
  return r;
}

CriterionResult connector_soundness(AcceptanceOptions const &o)
{
  auto r = criterion(7, "connector reaches a redundant tuple");
  std::uint64_t total = 0, verified = 0, moves = 0, fallbacks = 0, irredundant = 0;
  Rng rng(o.seed);
  for (std::uint32_t q : {5u, 7u, 9u, 11u, 13u}) {
    for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
      auto g = Group::make(kind, q);
      std::uint64_t ok = 0;
      for (int n = 0; n < 100; ++n) {
        ++total;
        auto t = random_generating_tuple(g, 4, rng);
        irredundant += !t.is_redundant();
        try {
          auto tr = connect_to_redundant(t);
          auto const end = tr.path().verify();
          if (end == tr.endpoint && end.generates() && end.is_redundant() && tr.redundant_index) {
            ++ok;
            moves += tr.move_count();
            fallbacks += tr.fallback_count;
          }
        } catch (std::exception const &e) {
          r.data.push_back({{"group", g->name()}, {"input", t.to_string()}, {"error", e.what()}});
        }
      }
      verified += ok;
    }
  }
  r.pass = verified == total;
  r.detail = std::to_string(verified) + "/" + std::to_string(total) + " verified paths (" +
             std::to_string(irredundant) + " inputs irredundant), " + std::to_string(moves) +
             " moves, " + std::to_string(fallbacks) + " search fallbacks";
  return r;
}

CriterionResult element_classes(AcceptanceOptions const &)
{
  auto r = criterion(8, "element types, fixed points and orders");
  std::uint64_t checked = 0, bad = 0;
  for (std::uint32_t q : {5u, 7u, 9u, 13u}) {
    for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
      auto g = Group::make(kind, q);
      auto const d = kind == GroupKind::psl ? 2u : 1u;
      for (ElemIndex x = 0; x < g->size(); ++x) {
        ++checked;
        auto const fp = fixed_point_count(*g, x);
        auto const o = g->order_of(x);
        bool ok = false;
        switch (g->type_of(x)) {
        case ElementType::identity:
          ok = fp == q + 1 && o == 1;
          break;
        case ElementType::unipotent:
          ok = fp == 1 && o == g->p();
          break;
        case ElementType::split:
          ok = fp == 2 && ((q - 1) / d) % o == 0;
          break;
        case ElementType::non_split:
          ok = fp == 0 && ((q + 1) / d) % o == 0;
          break;
        }
        bad += !ok;
      }
    }
  }
  r.pass = bad == 0;
  r.detail = std::to_string(checked) + " elements, " + std::to_string(bad) + " mismatches";
  return r;
}

CriterionResult dickson(AcceptanceOptions const &o)
{
  auto r = criterion(9, "every 2-generated subgroup gets a table label");
  Rng rng(o.seed);
  std::uint64_t errors = 0, total = 0;
  for (std::uint32_t q : {5u, 7u, 9u}) {
    for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
      auto g = Group::make(kind, q);
      for (int n = 0; n < 1000; ++n) {
        ++total;
        ElemIndex const gens[2] = {static_cast<ElemIndex>(rng.below(g->size())),
                                   static_cast<ElemIndex>(rng.below(g->size()))};
        try {
          classify_subgroup(closure(g, gens));
        } catch (SubgroupError const &e) {
          ++errors;
          r.data.push_back({{"group", g->name()}, {"error", e.what()}});
        }
      }
    }
  }
  r.pass = errors == 0;
  r.detail = std::to_string(total) + " subgroups, " + std::to_string(errors) + " unlabelled";
  return r;
}

CriterionResult lemma_oracles(AcceptanceOptions const &)
{
  auto r = criterion(10, "lemma oracles");
  r.pass = true;
  std::uint64_t cases = 0, alternatives = 0;
  for (std::uint32_t q : {5u, 7u, 9u}) {
    for (auto kind : {GroupKind::psl, GroupKind::pgl}) {
      auto g = Group::make(kind, q);
      for (auto rep : {not_2_p_oracle(g), normalizer_oracle(g)}) {
        r.pass = r.pass && rep.holds();
        cases += rep.cases;
        alternatives += rep.alternatives;
        r.data.push_back({{"lemma", rep.lemma},
                          {"group", g->name()},
                          {"cases", rep.cases},
                          {"alternatives", rep.alternatives},
                          {"violations", rep.violations}});
      }
    }
  }
  r.detail = std::to_string(cases) + " cases, " + std::to_string(alternatives) + " resolved by the A4 alternative";
  return r;
}

CriterionResult uniformity(AcceptanceOptions const &o)
{
  auto r = criterion(11, "walk output uniform (chi-square, alpha 0.001)");
  constexpr std::uint64_t samples = 1'000'000, steps = 100;
  constexpr double alpha = 0.001;
  auto g = Group::make(GroupKind::psl, 5);
  Rng rng(o.seed);
  auto const start = random_generating_tuple(g, 4, rng);
  std::vector<double> observed(g->size(), 0);
  std::vector<ElemIndex> e(4);
  for (std::uint64_t s = 0; s < samples; ++s) {
    e = start.entries();
    observed[pra_walk_in_place(*g, e, steps, rng)] += 1;
  }

  auto chi2 = [&](std::vector<double> const &law) {
    double stat = 0;
    for (std::size_t x = 0; x < law.size(); ++x) {
      double const expect = samples * law[x];
      stat += (observed[x] - expect) * (observed[x] - expect) / expect;
    }
    return stat;
  };
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(g->size() - 1));
  double const critical = quantile(complement(dist, alpha));
  std::vector<double> uniform(g->size(), 1.0 / static_cast<double>(g->size()));
  double const stat = chi2(uniform);
  double const p = cdf(complement(dist, stat));
  r.pass = p >= alpha;

  // The walk's limit is uniform on the vertices, which weights elements
  // by how many generating tuples contain them; compare against that too.
  auto const map = component_map(g, 4, false, component_options(o));
  auto const law = stationary_entry_law(map, start.entries());
  double shift = 0;
  for (std::size_t x = 0; x < law.size(); ++x)
    shift += samples * (law[x] - uniform[x]) * (law[x] - uniform[x]) / uniform[x];
  double const stat_limit = chi2(law);
  double const p_limit = cdf(complement(dist, stat_limit));
  r.known_unattainable = !r.pass && p_limit >= alpha && dist.degrees_of_freedom() + shift > critical;

  r.detail = "chi2 " + fmt("%.1f", stat) + " (critical " + fmt("%.1f", critical) + ", p " + fmt("%.3g", p) +
             "); limit law is not uniform: expected chi2 about " + fmt("%.0f", dist.degrees_of_freedom() + shift) +
             " even after perfect mixing; against the limit law chi2 " + fmt("%.1f", stat_limit) + " (p " +
             fmt("%.3g", p_limit) + ")";
  r.data = {{"samples", samples},      {"steps", steps},          {"chi2_uniform", stat},
            {"p_uniform", p},          {"critical", critical},    {"noncentrality", shift},
            {"chi2_limit_law", stat_limit}, {"p_limit_law", p_limit}};
  return r;
}

} // namespace

std::string CriterionResult::line() const
{
  std::string out = pass ? "[PASS] " : "[FAIL] ";
  out += std::to_string(id) + " " + name + ": " + detail;
  if (known_unattainable)
    out += " [known: the claim fails as stated, see README]";
  out += " (" + fmt("%.1f", seconds) + " s)";
  return out;
}

CriterionResult run_criterion(int id, AcceptanceOptions const &options)
{
  static CriterionResult (*const table[])(AcceptanceOptions const &) = {
      connectivity,        main_theorem,    sandwich, connected_iff,  spread_tables, redundant_component,
      connector_soundness, element_classes, dickson,  lemma_oracles, uniformity};
  if (id < 1 || id > acceptance_criteria)
    throw std::out_of_range("no acceptance criterion " + std::to_string(id));
  auto const start = Clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](options);
  } catch (std::exception const &e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(AcceptanceOptions const &options)
{
  std::vector<int> ids = options.only;
  if (ids.empty()) {
    for (int i = 1; i <= acceptance_criteria; ++i)
      ids.push_back(i);
  }
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, options));
    if (options.on_result)
      options.on_result(out.back());
    if (options.fail_fast && !out.back().pass)
      break;
  }
  return out;
}

} // namespace pralab
