#include "cli.hpp"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "dgs/aspect.hpp"
#include "dgs/hopset.hpp"
#include "dgs/oracle.hpp"
#include "dgs/parallel.hpp"
#include "dgs/paths.hpp"
#include "dgs/spanner.hpp"
#include "dgs/stream.hpp"

namespace dgs::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Global {
  std::size_t threads = 1;
  std::optional<std::uint64_t> permute_seed;
  std::string log_level = "warn";
  double sketch_budget_mb = 0;
};

MultipassStream open_stream(const std::string& path, const Global& g) {
  auto s = MultipassStream::open_file(path);
  if (g.permute_seed) return s.permuted(*g.permute_seed);
  return s;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

json report_base(const std::string& command, const MultipassStream& stream) {
  json r;
  r["schema"] = "1";
  r["command"] = command;
  r["passes"] = stream.passes_taken();
  r["peak_sketch_bytes"] = stream.ledger().peak_bytes();
  json modules = json::object();
  for (const auto& [name, bytes] : stream.ledger().module_peaks()) modules[name] = bytes;
  r["module_peak_bytes"] = modules;
  return r;
}

json spanner_validation_json(const SpannerValidation& v) {
  return {{"ok", v.ok},
          {"subgraph", v.subgraph},
          {"missing_edges", v.missing_edges},
          {"pairs", v.pairs},
          {"violations", v.violations},
          {"worst_ratio", v.worst_ratio},
          {"worst_additive", v.worst_additive},
          {"slack_histogram", v.slack_histogram}};
}

json hopset_validation_json(const HopsetValidation& v) {
  json j = {{"ok", v.ok},
            {"pairs", v.pairs},
            {"lower_violations", v.lower_violations},
            {"upper_violations", v.upper_violations},
            {"worst_stretch", v.worst_stretch},
            {"undercut_edges", v.undercut_edges},
            {"paths_checked", v.paths_checked},
            {"path_violations", v.path_violations}};
  if (v.distances_preserved) j["distances_preserved"] = *v.distances_preserved;
  return j;
}

json hopset_params_json(const HopsetParams& p) {
  return {{"n", p.n},       {"eps_prime", p.eps_prime}, {"kappa", p.kappa},   {"rho", p.rho},
          {"aspect", p.aspect}, {"ell", p.ell},      {"eps2", p.eps2},     {"eps", p.eps},
          {"chi", p.chi},   {"beta", p.beta},         {"k0", p.k0},         {"k_lambda", p.k_lambda},
          {"hops", p.hops}};
}

std::vector<Vertex> parse_sources(const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      throw UsageError("bad source id '" + item + "'");
    }
    if (used != item.size() || v == 0) throw UsageError("bad source id '" + item + "'");
    out.push_back(static_cast<Vertex>(v));
  }
  if (out.empty()) throw UsageError("--sources needs at least one vertex");
  return out;
}

double resolve_aspect(MultipassStream& stream, std::optional<double> aspect, bool derive) {
  if (aspect && derive) throw UsageError("--aspect and --auto-lambda are exclusive");
  if (aspect) return *aspect;
  if (!derive) throw UsageError("weighted commands need --aspect or --auto-lambda");
  return std::max(2.0, auto_lambda(stream).to_double());
}

int cmd_gen(const GeneratorOptions& o, const std::string& out_path, std::ostream& out) {
  const auto stream = generate_stream(o);
  save_stream(stream, out_path);
  out << "wrote " << stream.length() << " updates to " << out_path << '\n';
  return kExitOk;
}

int cmd_stats(const std::string& path, const Global& g, std::ostream& out) {
  auto stream = open_stream(path, g);
  const auto s = stream_stats(stream);
  json j = {{"schema", "1"},
            {"n", s.n},
            {"updates", s.updates},
            {"final_edges", s.final_edges},
            {"max_weight", s.max_weight.to_double()},
            {"lambda_bound", s.lambda_bound.to_double()},
            {"passes", stream.passes_taken()}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct SpannerArgs {
  std::string stream;
  double eps = 0.5;
  double kappa = 4;
  double rho = 0.5;
  std::uint64_t seed = 1;
  double c1 = 3;
  std::string out;
  std::string report;
  std::size_t pairs = 500;
  bool full_parent_bank = false;
};

int cmd_spanner(const SpannerArgs& a, const Global& g, std::ostream& out) {
  auto stream = open_stream(a.stream, g);
  SpannerConfig cfg;
  cfg.seed = a.seed;
  cfg.c1 = a.c1;
  cfg.full_parent_bank = a.full_parent_bank;
  const auto t0 = Clock::now();
  const auto r = build_spanner(stream, a.eps, a.kappa, a.rho, cfg);
  const double build_s = seconds_since(t0);
  if (!a.out.empty()) save_edges(r.edges, stream.vertex_count(), a.out);
  json rep = report_base("spanner", stream);
  rep["output_size"] = r.edges.size();
  rep["params"] = {{"n", r.params.n},     {"eps", a.eps},           {"kappa", a.kappa},
                   {"rho", a.rho},        {"ell", r.params.ell},    {"beta", r.params.beta},
                   {"seed", a.seed},      {"pass_limit", 10 * r.params.beta}};
  json phases = json::array();
  for (const auto& p : r.phases) {
    phases.push_back({{"phase", p.phase},
                      {"clusters", p.clusters},
                      {"sampled", p.sampled},
                      {"unclustered", p.unclustered},
                      {"supercluster_edges", p.supercluster_edges},
                      {"interconnection_edges", p.interconnection_edges},
                      {"passes", p.passes},
                      {"retries", p.retries},
                      {"visitor_overflow", p.visitor_overflow}});
  }
  rep["phases"] = phases;
  const auto t1 = Clock::now();
  if (a.pairs > 0) {
    PairSample ps;
    ps.uniform_pairs = a.pairs;
    ps.seed = a.seed;
    rep["validation"] = spanner_validation_json(
        validate_spanner(final_graph(stream), r.edges, a.eps, r.params.beta, ps));
  }
  rep["timings"] = {{"construction_seconds", build_s}, {"validation_seconds", seconds_since(t1)}};
  if (!a.report.empty()) write_json(a.report, rep);
  out << "spanner: |H| = " << r.edges.size() << ", passes = " << r.passes << '\n';
  return kExitOk;
}

struct HopsetArgs {
  std::string stream;
  double eps = 0.5;
  double kappa = 2;
  double rho = 0.5;
  std::optional<double> aspect;
  bool auto_lambda = false;
  bool reduce_aspect = false;
  bool path_reporting = false;
  std::optional<double> phase_eps;
  std::optional<double> chi;
  std::uint64_t seed = 1;
  std::string out;
  std::string report;
  bool validate = false;
  std::size_t pairs = 500;
};

int cmd_hopset(const HopsetArgs& a, const Global& g, std::ostream& out) {
  auto stream = open_stream(a.stream, g);
  if (!stream.weighted()) throw UsageError("hopset needs a weighted stream");
  const double aspect = resolve_aspect(stream, a.aspect, a.auto_lambda);
  HopsetConfig cfg;
  cfg.seed = a.seed;
  cfg.path_reporting = a.path_reporting;
  HopsetOverrides ov;
  ov.phase_epsilon = a.phase_eps;
  ov.chi = a.chi;
  const auto t0 = Clock::now();
  HopsetResult r;
  json nodes;
  if (a.reduce_aspect) {
    auto red = aspect_ratio_reduce(stream, a.eps, a.kappa, a.rho, aspect, cfg, ov);
    nodes = {{"relevant_scales", red.nodes.relevant},
             {"star_edges", red.nodes.star_edges.size()},
             {"copy_fallbacks", red.nodes.copy_fallbacks},
             {"retries", red.nodes.retries}};
    r = std::move(red.hopset);
  } else {
    r = multi_scale_hopset(stream, a.eps, a.kappa, a.rho, aspect, cfg, ov);
  }
  const double build_s = seconds_since(t0);
  if (!a.out.empty()) save_hopset(r.edges, a.out);
  json rep = report_base("hopset", stream);
  rep["output_size"] = r.edges.size();
  rep["params"] = hopset_params_json(r.params);
  rep["params"]["seed"] = a.seed;
  rep["params"]["reduce_aspect"] = a.reduce_aspect;
  rep["params"]["path_reporting"] = a.path_reporting;
  json scales = json::array();
  for (const auto& s : r.scales) {
    scales.push_back({{"scale", s.scale},
                      {"passes", s.passes},
                      {"retries", s.retries},
                      {"supercluster_edges", s.supercluster_edges},
                      {"interconnection_edges", s.interconnection_edges},
                      {"overflow", s.overflow},
                      {"clusters", s.clusters}});
  }
  rep["scales"] = scales;
  if (a.reduce_aspect) rep["nodes"] = nodes;
  const auto t1 = Clock::now();
  if (a.validate) {
    HopsetCheck hc;
    hc.eps = a.eps;
    hc.hopbound = static_cast<std::size_t>(r.params.hops);
    hc.pairs.uniform_pairs = a.pairs;
    hc.pairs.seed = a.seed;
    hc.check_paths = a.path_reporting;
    rep["validation"] = hopset_validation_json(validate_hopset(final_graph(stream), r.edges, hc));
  }
  rep["timings"] = {{"construction_seconds", build_s}, {"validation_seconds", seconds_since(t1)}};
  if (!a.report.empty()) write_json(a.report, rep);
  out << "hopset: |H| = " << r.edges.size() << ", passes = " << r.passes << '\n';
  return kExitOk;
}

struct AspArgs {
  std::string stream;
  std::string sources;
  double eps = 0.5;
  std::optional<double> kappa;
  double rho = 0.5;
  bool weighted = false;
  std::optional<double> aspect;
  bool auto_lambda = false;
  std::optional<double> phase_eps;
  std::optional<double> chi;
  std::uint64_t seed = 1;
  std::string out;
  std::string report;
};

std::string format_path(const std::vector<Vertex>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(path[i]);
  }
  return s;
}

int cmd_asp(const AspArgs& a, const Global& g, std::ostream& out) {
  auto stream = open_stream(a.stream, g);
  const auto sources = parse_sources(a.sources);
  const double kappa = a.kappa.value_or(1 / a.rho);
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& tsv = a.out.empty() ? out : file;
  const Vertex n = stream.vertex_count();
  json rep;
  const auto t0 = Clock::now();
  if (a.weighted) {
    if (!stream.weighted()) throw UsageError("--weighted needs a weighted stream");
    const double aspect = resolve_aspect(stream, a.aspect, a.auto_lambda);
    HopsetConfig cfg;
    cfg.seed = a.seed;
    HopsetOverrides ov;
    ov.phase_epsilon = a.phase_eps;
    ov.chi = a.chi;
    const auto r = multi_source_asp_weighted(stream, sources, a.eps, kappa, a.rho, aspect, cfg, ov);
    std::size_t rows = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      for (Vertex v = 1; v <= n; ++v) {
        const Distance d = r.distance(i, v);
        if (d.is_infinite()) {
          tsv << sources[i] << '\t' << v << "\tinf\t\n";
        } else {
          tsv << sources[i] << '\t' << v << '\t' << d.to_string() << '\t' << format_path(r.path(i, v)) << '\n';
        }
        ++rows;
      }
    }
    rep = report_base("asp", stream);
    rep["output_size"] = rows;
    rep["params"] = hopset_params_json(r.hopset.params);
    rep["params"]["bellman_ford_hops"] = r.hops;
    rep["params"]["hopset_edges"] = r.hopset.edges.size();
  } else {
    SpannerConfig cfg;
    cfg.seed = a.seed;
    const auto r = multi_source_asp_unweighted(stream, sources, a.eps, kappa, a.rho, cfg);
    std::size_t rows = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      for (Vertex v = 1; v <= n; ++v) {
        const auto d = r.dist[i][v];
        tsv << sources[i] << '\t' << v << '\t' << (d == kUnreached ? std::string("inf") : std::to_string(d)) << '\n';
        ++rows;
      }
    }
    rep = report_base("asp", stream);
    rep["output_size"] = rows;
    rep["params"] = {{"n", n},         {"eps", a.eps},          {"kappa", kappa},
                     {"rho", a.rho},   {"beta", r.spanner.params.beta}, {"exact_depth", r.depth},
                     {"spanner_edges", r.spanner.edges.size()}};
  }
  rep["params"]["seed"] = a.seed;
  rep["params"]["weighted"] = a.weighted;
  rep["timings"] = {{"construction_seconds", seconds_since(t0)}};
  if (!a.report.empty()) write_json(a.report, rep);
  return kExitOk;
}

struct ValidateArgs {
  std::string graph;
  std::string spanner;
  std::string hopset;
  double eps = 0.5;
  double beta = 0;
  std::size_t pairs = 500;
  std::uint64_t seed = 1;
  bool all_pairs = false;
  bool preservation = false;
  bool json_out = false;
};

int cmd_validate(const ValidateArgs& a, const Global& g, std::ostream& out) {
  if (a.spanner.empty() == a.hopset.empty()) throw UsageError("give exactly one of --spanner and --hopset");
  auto stream = open_stream(a.graph, g);
  const Graph graph = materialize(stream);
  json j;
  j["schema"] = "1";
  bool ok = false;
  if (!a.spanner.empty()) {
    const auto [n, edges] = load_edges(a.spanner);
    if (n != 0 && n != graph.n()) throw UsageError("spanner file was built for a different n");
    PairSample ps;
    ps.uniform_pairs = a.pairs;
    ps.seed = a.seed;
    const auto v = validate_spanner(graph, edges, a.eps, a.beta, ps);
    j["kind"] = "spanner";
    j["validation"] = spanner_validation_json(v);
    ok = v.ok;
  } else {
    HopsetCheck hc;
    hc.eps = a.eps;
    hc.hopbound = static_cast<std::size_t>(std::max(0.0, std::ceil(a.beta)));
    hc.pairs.uniform_pairs = a.pairs;
    hc.pairs.seed = a.seed;
    hc.all_pairs = a.all_pairs;
    hc.check_preservation = a.preservation;
    const auto v = validate_hopset(graph, load_hopset(a.hopset), hc);
    j["kind"] = "hopset";
    j["validation"] = hopset_validation_json(v);
    ok = v.ok;
  }
  if (a.json_out) {
    out << j.dump(2) << '\n';
  } else {
    out << (ok ? "valid" : "INVALID") << '\n';
  }
  return kExitOk;
}

spdlog::level::level_enum parse_level(const std::string& s) {
  const auto level = spdlog::level::from_str(s);
  if (level == spdlog::level::off && s != "off") throw UsageError("unknown log level '" + s + "'");
  return level;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multipass dynamic-stream spanners, hopsets and shortest paths", "dgs"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--threads", g.threads, "Worker threads for data-parallel loops")->check(CLI::PositiveNumber);
  app.add_option("--permute-seed", g.permute_seed, "Replay every pass in a shuffled order");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, err or off");
  app.add_option("--sketch-budget-mb", g.sketch_budget_mb, "Resident sampler memory per chunk")
      ->check(CLI::NonNegativeNumber);

  GeneratorOptions gen;
  std::string gen_out;
  std::string distribution = "uniform";
  std::int64_t max_weight = 1;
  auto* c_gen = app.add_subcommand("gen", "Generate a random strict-turnstile stream");
  c_gen->add_option("--n", gen.n, "Vertices")->required()->check(CLI::Range(2u, 1u << 24));
  c_gen->add_option("--m", gen.target_edges, "Edges in the final graph")->required();
  c_gen->add_option("--churn", gen.churn, "Insert/delete pairs per final edge")->check(CLI::NonNegativeNumber);
  c_gen->add_option("--seed", gen.seed, "Generator seed");
  c_gen->add_flag("--weighted", gen.weighted, "Draw integer weights");
  c_gen->add_option("--max-weight", max_weight, "Largest weight")->check(CLI::PositiveNumber);
  c_gen->add_option("--distribution", distribution, "uniform or loguniform")
      ->check(CLI::IsMember({"uniform", "loguniform"}));
  c_gen->add_option("--out", gen_out, "Stream file")->required();

  std::string stats_stream;
  auto* c_stats = app.add_subcommand("stats", "Summarize a stream in one pass");
  c_stats->add_option("--stream", stats_stream, "Stream file")->required();

  SpannerArgs sp;
  auto* c_sp = app.add_subcommand("spanner", "Build a (1+eps, beta)-spanner");
  c_sp->add_option("--stream", sp.stream, "Stream file")->required();
  c_sp->add_option("--eps", sp.eps, "Multiplicative stretch");
  c_sp->add_option("--kappa", sp.kappa, "Size exponent parameter");
  c_sp->add_option("--rho", sp.rho, "Pass exponent parameter");
  c_sp->add_option("--seed", sp.seed, "Construction seed");
  c_sp->add_option("--c1", sp.c1, "Repetition constant")->check(CLI::PositiveNumber);
  c_sp->add_option("--out", sp.out, "Spanner edge file");
  c_sp->add_option("--report", sp.report, "JSON report");
  c_sp->add_option("--pairs", sp.pairs, "Sampled validation pairs, 0 to skip");
  c_sp->add_flag("--full-parent-bank", sp.full_parent_bank, "Full ladder in the parent search");

  HopsetArgs hs;
  auto* c_hs = app.add_subcommand("hopset", "Build a (1+eps, beta)-hopset");
  c_hs->add_option("--stream", hs.stream, "Weighted stream file")->required();
  c_hs->add_option("--eps", hs.eps, "Target stretch eps'");
  c_hs->add_option("--kappa", hs.kappa, "Size exponent parameter");
  c_hs->add_option("--rho", hs.rho, "Pass exponent parameter");
  c_hs->add_option("--aspect", hs.aspect, "Aspect ratio bound Lambda")->check(CLI::Range(2.0, 1e15));
  c_hs->add_flag("--auto-lambda", hs.auto_lambda, "Derive Lambda = (n-1) max w in one pass");
  c_hs->add_flag("--reduce-aspect", hs.reduce_aspect, "Build all scales at once on node graphs");
  c_hs->add_flag("--path-reporting", hs.path_reporting, "Store the G path of every edge");
  c_hs->add_option("--phase-eps", hs.phase_eps, "Override the per-phase eps");
  c_hs->add_option("--chi", hs.chi, "Override the exploration error chi");
  c_hs->add_option("--seed", hs.seed, "Construction seed");
  c_hs->add_option("--out", hs.out, "Hopset file");
  c_hs->add_option("--report", hs.report, "JSON report");
  c_hs->add_flag("--validate", hs.validate, "Validate against the hop-bounded oracle");
  c_hs->add_option("--pairs", hs.pairs, "Sampled validation pairs");

  AspArgs as;
  auto* c_as = app.add_subcommand("asp", "Approximate distances from a source set");
  c_as->add_option("--stream", as.stream, "Stream file")->required();
  c_as->add_option("--sources", as.sources, "Comma-separated source vertices")->required();
  c_as->add_option("--eps", as.eps, "Stretch");
  c_as->add_option("--kappa", as.kappa, "Size exponent parameter, default 1/rho");
  c_as->add_option("--rho", as.rho, "Pass exponent parameter");
  c_as->add_flag("--weighted", as.weighted, "Weighted stream via a path-reporting hopset");
  c_as->add_option("--aspect", as.aspect, "Aspect ratio bound Lambda")->check(CLI::Range(2.0, 1e15));
  c_as->add_flag("--auto-lambda", as.auto_lambda, "Derive Lambda = (n-1) max w in one pass");
  c_as->add_option("--phase-eps", as.phase_eps, "Override the hopset per-phase eps");
  c_as->add_option("--chi", as.chi, "Override the hopset exploration error chi");
  c_as->add_option("--seed", as.seed, "Construction seed");
  c_as->add_option("--out", as.out, "TSV output, stdout when absent");
  c_as->add_option("--report", as.report, "JSON report");

  ValidateArgs va;
  auto* c_va = app.add_subcommand("validate", "Check a spanner or hopset against exact oracles");
  c_va->add_option("--graph", va.graph, "Stream file of G")->required();
  c_va->add_option("--spanner", va.spanner, "Spanner edge file");
  c_va->add_option("--hopset", va.hopset, "Hopset file");
  c_va->add_option("--eps", va.eps, "Multiplicative stretch");
  c_va->add_option("--beta", va.beta, "Additive stretch (spanner) or hopbound (hopset)");
  c_va->add_option("--pairs", va.pairs, "Sampled pairs");
  c_va->add_option("--seed", va.seed, "Pair sampling seed");
  c_va->add_flag("--all-pairs", va.all_pairs, "Check every pair");
  c_va->add_flag("--preservation", va.preservation, "Check d_{G+H} = d_G over all pairs");
  c_va->add_flag("--json", va.json_out, "Print the JSON report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    spdlog::set_level(parse_level(g.log_level));
    set_thread_count(g.threads);
    if (g.sketch_budget_mb > 0) {
      set_sketch_memory_budget(static_cast<std::size_t>(g.sketch_budget_mb * 1024 * 1024));
    }
    if (c_gen->parsed()) {
      gen.max_weight = Weight::from_int(max_weight);
      gen.distribution = distribution == "loguniform" ? WeightDistribution::LogUniform : WeightDistribution::Uniform;
      return cmd_gen(gen, gen_out, out);
    }
    if (c_stats->parsed()) return cmd_stats(stats_stream, g, out);
    if (c_sp->parsed()) return cmd_spanner(sp, g, out);
    if (c_hs->parsed()) return cmd_hopset(hs, g, out);
    if (c_as->parsed()) return cmd_asp(as, g, out);
    if (c_va->parsed()) return cmd_validate(va, g, out);
  } catch (const ConstructionAborted& e) {
    err << "aborted: " << e.what() << '\n';
    return kExitAborted;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAborted;
  }
  return kExitUsage;
}

}  // namespace dgs::cli
