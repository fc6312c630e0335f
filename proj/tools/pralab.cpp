// pralab: command-line front end. Exit codes: 0 success, 1 verification
// failure, 2 usage error, 3 budget exceeded.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "pralab/acceptance.hpp"
#include "pralab/connector.hpp"
#include "pralab/run_config.hpp"
#include "pralab/spread.hpp"
#include "pralab/subgroup.hpp"

using namespace pralab;

namespace
{

constexpr int exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_budget = 3;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string timestamp()
{
  auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void emit(nlohmann::json j, RunConfig const &cfg)
{
  if (!cfg.deterministic)
    j["timestamp"] = timestamp();
  std::cout << j.dump() << '\n';
}

GroupPtr make_group(RunConfig const &cfg) { return Group::make(parse_group_kind(cfg.group), cfg.q); }

std::optional<std::filesystem::path> cache_dir()
{
  if (auto const *dir = std::getenv("PRALAB_CACHE_DIR"); dir && *dir)
    return std::filesystem::path(dir);
  return std::nullopt;
}

ComponentOptions component_options(RunConfig const &cfg)
{
  ComponentOptions o;
  o.state_budget = cfg.state_budget;
  o.workers = cfg.workers;
  o.cache_dir = cache_dir();
  return o;
}

// The tuple from --tuple, or a random generating one from --random --seed.
GenTuple input_tuple(GroupPtr const &g, RunConfig const &cfg, Rng &rng)
{
  if (cfg.random == !cfg.tuple.empty())
    throw UsageError("give exactly one of --tuple and --random");
  if (cfg.random)
    return random_generating_tuple(g, cfg.k, rng);
  auto t = parse_tuple(g, cfg.tuple);
  if (!t.generates())
    throw UsageError("tuple " + t.to_string() + " does not generate " + g->name());
  return t;
}

int cmd_classify(RunConfig const &cfg)
{
  auto g = make_group(cfg);
  if (!cfg.element.empty()) {
    auto const x = g->index_of(g->canonical_checked(g->parse_matrix(cfg.element)));
    emit({{"group", cfg.group},
          {"q", cfg.q},
          {"element", g->format(x)},
          {"code", g->code(x)},
          {"type", to_string(g->type_of(x))},
          {"order", g->order_of(x)},
          {"fixed_points", fixed_point_count(*g, x)}},
         cfg);
    return exit_ok;
  }
  std::map<std::string, std::uint64_t> types;
  std::map<std::uint32_t, std::uint64_t> orders;
  for (auto t : {ElementType::identity, ElementType::unipotent, ElementType::split, ElementType::non_split})
    types[to_string(t)] = 0;
  for (ElemIndex x = 0; x < g->size(); ++x) {
    ++types[to_string(g->type_of(x))];
    ++orders[g->order_of(x)];
  }
  if (cfg.format == "csv" || cfg.format == "text") {
    char const sep = cfg.format == "csv" ? ',' : ' ';
    if (cfg.format == "csv")
      std::cout << "type,count\n";
    for (auto const &[t, n] : types)
      std::cout << t << sep << n << '\n';
    return exit_ok;
  }
  nlohmann::json by_order;
  for (auto const &[o, n] : orders)
    by_order[std::to_string(o)] = n;
  emit({{"group", cfg.group}, {"q", cfg.q}, {"order", g->size()}, {"census", types}, {"orders", by_order}}, cfg);
  return exit_ok;
}

int cmd_subgroup(RunConfig const &cfg)
{
  auto g = make_group(cfg);
  if (cfg.tuple.empty())
    throw UsageError("subgroup needs --gens");
  auto const gens = parse_tuple(g, cfg.tuple);
  auto h = closure(g, gens.entries());
  auto const cls = classify_subgroup(h);
  nlohmann::json j{{"group", cfg.group},
                   {"q", cfg.q},
                   {"generators", gens.to_json()},
                   {"order", h.order()},
                   {"label", to_string(cls)},
                   {"orbit_sizes", h.orbit_sizes()}};
  if (h.is_proper())
    j["structural"] = is_structural(h);
  if (cfg.format == "text") {
    std::cout << h.order() << ' ' << to_string(cls) << '\n';
    return exit_ok;
  }
  emit(j, cfg);
  return exit_ok;
}

int cmd_components(RunConfig const &cfg)
{
  auto rep = components(make_group(cfg), cfg.k, cfg.extended, component_options(cfg));
  if (cfg.format == "csv") {
    std::cout << rep.sizes_csv();
    return exit_ok;
  }
  if (cfg.format == "text") {
    std::cout << rep.component_count() << " component(s), " << rep.vertex_count << " vertices\n";
    return exit_ok;
  }
  emit(rep.to_json(cfg.deterministic), cfg);
  return exit_ok;
}

int cmd_walk(RunConfig const &cfg)
{
  auto g = make_group(cfg);
  Rng rng(cfg.seed);
  auto const start = input_tuple(g, cfg, rng);
  auto t = start;
  std::map<ElemIndex, std::uint64_t> counts;
  ElemIndex sample = 0;
  for (std::uint64_t s = 0; s < cfg.samples; ++s) {
    sample = pra_walk_in_place(*g, t.entries(), cfg.steps, rng);
    ++counts[sample];
  }
  if (cfg.format == "csv") {
    std::cout << "code,matrix,count\n";
    for (auto const &[x, n] : counts)
      std::cout << g->code(x) << ",\"" << g->format(x) << "\"," << n << '\n';
    return exit_ok;
  }
  if (cfg.format == "text") {
    std::cout << g->format(sample) << '\n';
    return exit_ok;
  }
  nlohmann::json hist = nlohmann::json::array();
  for (auto const &[x, n] : counts)
    hist.push_back({{"code", g->code(x)}, {"matrix", g->format(x)}, {"count", n}});
  emit({{"group", cfg.group},
        {"q", cfg.q},
        {"k", cfg.k},
        {"seed", cfg.seed},
        {"steps", cfg.steps},
        {"samples", cfg.samples},
        {"start", start.to_json()},
        {"end", t.to_json()},
        {"sample", {{"code", g->code(sample)}, {"matrix", g->format(sample)}}},
        {"counts", hist}},
       cfg);
  return exit_ok;
}

int cmd_connect(RunConfig const &cfg)
{
  auto g = make_group(cfg);
  Rng rng(cfg.seed);
  auto const t = input_tuple(g, cfg, rng);
  ConnectorOptions o;
  o.search_fallback = cfg.search_fallback;
  o.experimental_k = cfg.experimental_k;
  try {
    auto const trace = connect_to_redundant(t, o);
    if (cfg.format == "text") {
      std::cout << trace.path().to_text();
      return exit_ok;
    }
    emit(trace.to_json(), cfg);
    return exit_ok;
  } catch (ConnectorError const &e) {
    std::cerr << "connector failed: " << e.what() << '\n' << e.trace().dump() << '\n';
    return exit_failed;
  }
}

int cmd_spread(RunConfig const &cfg)
{
  auto g = make_group(cfg);
  SpreadOptions o;
  o.class_reduction = cfg.class_reduction;
  o.set_budget = cfg.set_budget;
  o.workers = cfg.workers;
  o.search_budget = cfg.search_budget;
  o.seed = cfg.seed;
  SpreadReport rep;
  switch (parse_spread_mode(cfg.mode)) {
  case SpreadMode::lower:
    rep = spread_at_least(g, cfg.m, o);
    break;
  case SpreadMode::upper:
    rep = blocking_search(g, cfg.m, o);
    break;
  case SpreadMode::exact:
    rep = exact_spread(g, o);
    break;
  }
  if (cfg.format == "csv") {
    std::cout << SpreadReport::csv_header() << rep.csv_row();
    return exit_ok;
  }
  if (cfg.format == "text") {
    std::cout << rep.csv_row();
    return exit_ok;
  }
  emit(rep.to_json(cfg.deterministic), cfg);
  return exit_ok;
}

int cmd_verify(RunConfig const &cfg)
{
  AcceptanceOptions o;
  o.workers = cfg.workers;
  o.seed = cfg.seed;
  o.only = cfg.only;
  o.fail_fast = cfg.fail_fast;
  if (auto dir = cache_dir())
    o.cache_dir = dir->string();
  o.on_result = [&cfg](CriterionResult const &r) {
    if (cfg.format == "json") {
      nlohmann::json j{{"criterion", r.id},  {"name", r.name},
                       {"pass", r.pass},     {"known_unattainable", r.known_unattainable},
                       {"detail", r.detail}, {"data", r.data}};
      if (!cfg.deterministic)
        j["seconds"] = r.seconds;
      std::cout << j.dump() << std::endl;
    } else {
      std::cout << r.line() << std::endl;
    }
    if (!r.pass)
      std::cerr << "criterion " << r.id << " failed: " << r.detail << std::endl;
  };
  auto const results = run_acceptance(o);
  bool unexpected = false, failed = false;
  for (auto const &r : results) {
    failed = failed || !r.pass;
    unexpected = unexpected || (!r.pass && !r.known_unattainable);
  }
  if (unexpected || (failed && !cfg.allow_known))
    return exit_failed;
  return exit_ok;
}

void group_options(CLI::App *sub, RunConfig &cfg)
{
  sub->add_option("--group", cfg.group, "group family")->check(CLI::IsMember({"psl", "pgl"}))->capture_default_str();
  sub->add_option("--q", cfg.q, "field order, an odd prime power")->capture_default_str();
}

void output_options(CLI::App *sub, RunConfig &cfg)
{
  sub->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  sub->add_flag("--deterministic", cfg.deterministic, "omit timestamps and timings");
}

void tuple_options(CLI::App *sub, RunConfig &cfg)
{
  sub->add_option("--k", cfg.k, "tuple length")->capture_default_str();
  sub->add_option("--tuple", cfg.tuple, "comma-separated matrices a,b,c,d,a,b,c,d,...");
  sub->add_flag("--random", cfg.random, "draw a random generating tuple from --seed");
  sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Product replacement graphs, spread and Nielsen paths for PSL(2,q) and PGL(2,q)"};
  app.require_subcommand(1);
  RunConfig cfg;
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "print the parsed configuration as JSON and exit");

  auto *classify = app.add_subcommand("classify", "element types and orders");
  group_options(classify, cfg);
  output_options(classify, cfg);
  classify->add_flag("--census", cfg.census, "count elements by type and order (the default)");
  classify->add_option("--element", cfg.element, "classify one matrix a,b,c,d");

  auto *subgroup = app.add_subcommand("subgroup", "closure of generators and its table label");
  group_options(subgroup, cfg);
  output_options(subgroup, cfg);
  subgroup->add_option("--gens", cfg.tuple, "generators as comma-separated matrices")->required();

  auto *comps = app.add_subcommand("components", "connected components of the product replacement graph");
  group_options(comps, cfg);
  output_options(comps, cfg);
  comps->add_option("--k", cfg.k, "tuple length")->capture_default_str();
  comps->add_flag("--extended,!--plain", cfg.extended, "add swap and inversion edges (default --plain)");
  comps->add_option("--state-budget", cfg.state_budget, "largest state space to enumerate")->capture_default_str();
  comps->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();

  auto *walk = app.add_subcommand("walk", "product replacement walk");
  group_options(walk, cfg);
  output_options(walk, cfg);
  tuple_options(walk, cfg);
  walk->add_option("--steps", cfg.steps, "moves between samples")->capture_default_str();
  walk->add_option("--samples", cfg.samples, "samples drawn along one chain")->capture_default_str();

  auto *connect = app.add_subcommand("connect", "Nielsen path from a generating 4-tuple to a redundant one");
  group_options(connect, cfg);
  output_options(connect, cfg);
  tuple_options(connect, cfg);
  connect->add_flag("!--no-fallback", cfg.search_fallback, "fail instead of searching when a lemma step stalls");
  connect->add_flag("--experimental-k", cfg.experimental_k, "allow k > 4");

  auto *spread = app.add_subcommand("spread", "spread lower bounds, blocking sets, exact spread");
  group_options(spread, cfg);
  output_options(spread, cfg);
  spread->add_option("--mode", cfg.mode, "lower, upper or exact")
      ->check(CLI::IsMember({"lower", "upper", "exact"}))
      ->capture_default_str();
  spread->add_option("--m", cfg.m, "level for lower and upper")->capture_default_str();
  spread->add_option("--seed", cfg.seed, "search seed")->capture_default_str();
  spread->add_option("--search-budget", cfg.search_budget, "blocking-search restarts")->capture_default_str();
  spread->add_option("--set-budget", cfg.set_budget, "largest exhaustive scan")->capture_default_str();
  spread->add_flag("!--no-class-reduction", cfg.class_reduction, "scan every first element");
  spread->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();

  auto *verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--only", cfg.only, "criteria to run")->check(CLI::Range(1, acceptance_criteria));
  verify->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();
  verify->add_option("--seed", cfg.seed, "seed for sampled criteria")->capture_default_str();
  verify->add_flag("--fail-fast", cfg.fail_fast, "stop at the first failing criterion");
  verify->add_flag("--allow-known", cfg.allow_known, "exit 0 if only the documented unattainable criteria fail");
  verify->add_option("--format", cfg.format, "text or json lines")
      ->check(CLI::IsMember({"json", "text"}))
      ->default_str("text");
  verify->add_flag("--deterministic", cfg.deterministic, "omit timings");

  cfg.format.clear();
  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    auto const code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }
  auto *sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (cfg.format.empty())
    cfg.format = cfg.command == "verify" ? "text" : "json";
  if (dump_config) {
    std::cout << nlohmann::json(cfg).dump() << '\n';
    return exit_ok;
  }

  try {
    if (cfg.command == "classify")
      return cmd_classify(cfg);
    if (cfg.command == "subgroup")
      return cmd_subgroup(cfg);
    if (cfg.command == "components")
      return cmd_components(cfg);
    if (cfg.command == "walk")
      return cmd_walk(cfg);
    if (cfg.command == "connect")
      return cmd_connect(cfg);
    if (cfg.command == "spread")
      return cmd_spread(cfg);
    return cmd_verify(cfg);
  } catch (BudgetError const &e) {
    std::cerr << "state budget exceeded: " << e.what() << " (needs " << e.required()
              << " states; raise --state-budget)\n";
    return exit_budget;
  } catch (SpreadBudgetError const &e) {
    std::cerr << "set budget exceeded: " << e.what() << '\n';
    return exit_budget;
  } catch (UsageError const &e) {
    std::cerr << "usage: " << e.what() << '\n';
    return exit_usage;
  } catch (FieldError const &e) {
    std::cerr << "bad field: " << e.what() << '\n';
    return exit_usage;
  } catch (GroupError const &e) {
    std::cerr << "bad group input: " << e.what() << '\n';
    return exit_usage;
  } catch (GraphError const &e) {
    std::cerr << "bad tuple input: " << e.what() << '\n';
    return exit_usage;
  } catch (SpreadError const &e) {
    std::cerr << "bad spread request: " << e.what() << '\n';
    return exit_usage;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failed;
  }
}
