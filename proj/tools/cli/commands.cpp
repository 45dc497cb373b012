#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bmc/cost_global.hpp"
#include "bmc/cost_local.hpp"
#include "bmc/curve.hpp"
#include "bmc/error.hpp"
#include "bmc/learner.hpp"
#include "bmc/oracle.hpp"
#include "bmc/simulator.hpp"
#include "bmc/workload.hpp"

namespace bmc::cli {

namespace {

using nlohmann::json;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Curve arguments: names/strings from --curves, one per line from --curves-file,
// and "@path" entries that read a saved curve.
std::vector<std::string> collect_curve_texts(const std::vector<std::string>& curves,
                                             const std::string& curves_file) {
  std::vector<std::string> out;
  for (const auto& c : curves) {
    if (!c.empty() && c.front() == '@') {
      auto text = read_text(c.substr(1));
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
      out.push_back(text);
    } else {
      out.push_back(c);
    }
  }
  if (!curves_file.empty()) {
    std::istringstream in(read_text(curves_file));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line.front() != '#') out.push_back(line);
    }
  }
  if (out.empty()) throw ValidationError("no curves given (use --curves or --curves-file)");
  return out;
}

BmcSpec curve_from_text(const std::string& text, Grid grid) {
  if (text == "ZC") return standard_curve(StandardCurve::kZOrder, grid);
  if (text == "LC") return standard_curve(StandardCurve::kLexicographic, grid);
  return parse_bmc(text, grid.dims, grid.bits);
}

template <typename Fn>
double median_seconds(int reps, Fn&& fn) {
  std::vector<double> samples;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << content;
  if (!f) throw IoError("write error on " + path);
}

void echo_config(std::ostream& out, const json& config) { out << "config: " << config.dump() << '\n'; }

// ---- gen ----------------------------------------------------------------

struct GenDataArgs {
  std::string kind = "uni";
  std::size_t n = 10000;
  int d = 2;
  int l = 10;
  std::uint64_t seed = 1;
  std::string out = "data.csv";
};

struct GenQueryArgs {
  std::string data;
  int l = 10;
  std::size_t n = 1000;
  std::vector<Coord> edge;
  Coord area = 0;
  std::string aspect;
  std::uint64_t seed = 2;
  std::string out = "queries.json";
};

void run_gen_data(const GenDataArgs& a, std::ostream& out) {
  if (a.n == 0) throw ValidationError("--n must be >= 1");
  echo_config(out, {{"command", "gen data"}, {"kind", a.kind}, {"n", a.n}, {"d", a.d},
                    {"l", a.l}, {"seed", a.seed}, {"out", a.out}});
  const auto data = gen_dataset(parse_data_kind(a.kind), a.n, Grid{a.d, a.l}, a.seed);
  save_points(a.out, data);
  out << "wrote " << data.size() << " points to " << a.out << '\n';
}

void run_gen_queries(const GenQueryArgs& a, std::ostream& out) {
  const auto data = load_grid_points(a.data, a.l);
  QueryExtent extent;
  if (!a.aspect.empty()) {
    if (a.area == 0) throw ValidationError("--aspect needs --area");
    if (data.grid().dims != 2) throw ValidationError("--aspect applies to 2-d data only");
    const auto [w, h] = parse_aspect(a.aspect);
    extent = QueryExtent::aspect(a.area, w, h);
  } else if (a.edge.size() == 1) {
    extent = QueryExtent::cube(data.grid().dims, a.edge.front());
  } else if (static_cast<int>(a.edge.size()) == data.grid().dims) {
    extent = QueryExtent{a.edge};
  } else {
    throw ValidationError("give --edge (one value or one per dimension) or --area with --aspect");
  }
  echo_config(out, {{"command", "gen queries"}, {"data", a.data}, {"l", a.l}, {"n", a.n},
                    {"edges", extent.edges}, {"seed", a.seed}, {"out", a.out}});
  const auto workload = gen_queries(data, a.n, extent, a.seed);
  save_workload(a.out, workload);
  out << "wrote " << workload.size() << " queries (" << extent.edges[0];
  for (std::size_t i = 1; i < extent.edges.size(); ++i) out << "x" << extent.edges[i];
  out << ") to " << a.out << '\n';
}

// ---- estimate -----------------------------------------------------------

struct EstimateArgs {
  std::string workload;
  int l = 0;
  std::vector<std::string> curves;
  std::string curves_file;
  bool global = false;
  bool local = false;
  bool naive = false;
  bool bench = false;
  int reps = 5;
  std::string format = "csv";
  std::string out;
};

void run_estimate(EstimateArgs a, std::ostream& out) {
  if (!a.global && !a.local) a.global = a.local = true;
  if (a.reps < 5) throw ValidationError("--reps must be >= 5");
  const auto workload = load_workload(a.workload, a.l);
  const auto texts = collect_curve_texts(a.curves, a.curves_file);
  std::vector<BmcSpec> curves;
  for (const auto& t : texts) curves.push_back(curve_from_text(t, workload.grid));

  echo_config(out, {{"command", "estimate"}, {"workload", a.workload}, {"l", a.l},
                    {"d", workload.grid.dims}, {"queries", workload.size()}, {"curves", texts},
                    {"global", a.global}, {"local", a.local}, {"naive", a.naive},
                    {"bench", a.bench}, {"reps", a.reps}, {"format", a.format}});

  const auto acc = init_global(workload);
  const auto tables = build_pattern_tables(workload);

  json rows = json::array();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    json row = {{"curve", render_bmc(c)}};
    std::optional<Count> g, l;
    if (a.global) {
      g = global_cost_closed(c, acc);
      row["global"] = to_string(*g);
    }
    if (a.local) {
      l = local_cost_from_tables(c, tables);
      row["local"] = to_string(*l);
    }
    if (g && l) row["cost"] = to_double(*g) * to_double(*l);
    if (a.naive) {
      if (a.global) {
        const Count ng = oracle::naive_global_cost(c, workload);
        row["naive_global"] = to_string(ng);
        if (ng != *g) throw std::logic_error("closed-form and naive global cost disagree");
      }
      if (a.local) {
        const Count nl = oracle::naive_local_cost(c, workload);
        row["naive_local"] = to_string(nl);
        if (nl != *l) throw std::logic_error("table and naive local cost disagree");
      }
    }
    if (a.bench) {
      volatile double sink = 0;
      row["gc_seconds"] = median_seconds(a.reps, [&] { sink = sink + to_double(global_cost_closed(c, acc)); });
      row["lc_seconds"] = median_seconds(a.reps, [&] { sink = sink + to_double(local_cost_from_tables(c, tables)); });
      row["ngc_seconds"] = median_seconds(a.reps, [&] { sink = sink + to_double(oracle::naive_global_cost(c, workload)); });
      row["nlc_seconds"] = median_seconds(a.reps, [&] { sink = sink + to_double(oracle::naive_local_cost(c, workload)); });
    }
    rows.push_back(std::move(row));
  }

  json init;
  if (a.bench) {
    init["igc_seconds"] = median_seconds(a.reps, [&] { (void)init_global(workload); });
    init["ilc_seconds"] = median_seconds(a.reps, [&] { (void)build_pattern_tables(workload); });
  }

  std::ostringstream body;
  if (a.format == "json") {
    json doc = {{"rows", rows}};
    if (a.bench) doc["init"] = init;
    body << doc.dump(2) << '\n';
  } else if (a.format == "csv") {
    std::vector<std::string> cols = {"curve"};
    for (const char* k : {"global", "local", "cost", "naive_global", "naive_local", "gc_seconds",
                          "lc_seconds", "ngc_seconds", "nlc_seconds"}) {
      if (!rows.empty() && rows[0].contains(k)) cols.emplace_back(k);
    }
    for (std::size_t i = 0; i < cols.size(); ++i) body << (i ? "," : "") << cols[i];
    body << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& v = row[cols[i]];
        body << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
      }
      body << '\n';
    }
    if (a.bench) {
      body << "# igc_seconds=" << init["igc_seconds"].dump() << " ilc_seconds=" << init["ilc_seconds"].dump()
           << '\n';
    }
  } else {
    throw ValidationError("--format must be csv or json");
  }
  emit(a.out, body.str(), out);
}

// ---- tables -------------------------------------------------------------

struct TablesArgs {
  std::string workload;
  int l = 0;
  std::string out = "summary.json";
  std::string in;
};

void run_tables_build(const TablesArgs& a, std::ostream& out) {
  echo_config(out, {{"command", "tables build"}, {"workload", a.workload}, {"l", a.l}, {"out", a.out}});
  const auto workload = load_workload(a.workload, a.l);
  const auto summary = summarize_workload(workload);
  save_summary(a.out, summary);
  out << "wrote pattern tables for " << summary.tables.query_count() << " queries ("
      << summary.tables.nonzero_entries() << " non-zero cells) to " << a.out << '\n';
}

void run_tables_info(const TablesArgs& a, std::ostream& out) {
  const auto s = load_summary(a.in);
  json info = {{"d", s.tables.grid().dims},
               {"l", s.tables.grid().bits},
               {"queries", s.tables.query_count()},
               {"total_cells", to_string(s.tables.total_cells())},
               {"nonzero_entries", s.tables.nonzero_entries()}};
  json per_dim = json::array();
  for (int b = 0; b < s.tables.grid().dims; ++b) per_dim.push_back(s.tables.entries(b).size());
  info["entries_per_dimension"] = per_dim;
  out << info.dump(2) << '\n';
}

// ---- learn --------------------------------------------------------------

struct LearnArgs {
  std::string workload;
  std::string tables;
  int l = 0;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> steps;
  std::string init = "ZC";
  std::string out = "learned.bmc";
  std::string trace;
};

void run_learn(const LearnArgs& a, std::ostream& out) {
  LearnerConfig config = a.config.empty() ? LearnerConfig{} : load_learner_config(a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.episodes) config.episodes = *a.episodes;
  if (a.steps) config.steps_per_episode = *a.steps;
  config.validate();

  if (a.workload.empty() == a.tables.empty()) {
    throw ValidationError("give exactly one of --workload or --tables");
  }
  const WorkloadSummary summary =
      a.tables.empty() ? summarize_workload(load_workload(a.workload, a.l)) : load_summary(a.tables);
  const BmcSpec initial = curve_from_text(a.init, summary.tables.grid());

  echo_config(out, {{"command", "learn"}, {"workload", a.workload}, {"tables", a.tables},
                    {"d", summary.tables.grid().dims}, {"l", summary.tables.grid().bits},
                    {"init", render_bmc(initial)}, {"learner", to_json(config)},
                    {"out", a.out}, {"trace", a.trace}});

  const auto result = learn_bmc(initial, summary, config);
  emit(a.out, render_bmc(result.best) + "\n", out);
  if (!a.trace.empty()) write_trace_csv(a.trace, result.trace);
  out << "initial " << render_bmc(initial) << " cost " << result.initial_cost << '\n';
  out << "learned " << render_bmc(result.best) << " cost " << result.best_cost << " ratio "
      << result.best_cost / result.initial_cost << '\n';
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::string data;
  std::string workload;
  int l = 0;
  std::vector<std::string> curves;
  std::string curves_file;
  std::size_t block_size = 128;
  std::string mode = "per-section";
  std::string format = "csv";
  std::string out;
};

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto mode = parse_query_mode(a.mode);
  if (a.block_size < 1) throw ValidationError("--block-size must be >= 1");
  const auto data = load_grid_points(a.data, a.l);
  const auto workload = load_workload(a.workload, a.l, data.grid().dims);
  const auto texts = collect_curve_texts(a.curves, a.curves_file);
  std::vector<CurveOrder> orders;
  for (const auto& t : texts) orders.push_back(parse_curve_order(t, data.grid()));
  echo_config(out, {{"command", "simulate"}, {"data", a.data}, {"workload", a.workload},
                    {"l", a.l}, {"curves", texts}, {"block_size", a.block_size},
                    {"mode", a.mode}, {"format", a.format}});
  const auto reports = compare_curves(data, workload, orders, a.block_size, mode);
  std::ostringstream body;
  if (a.format == "csv") {
    write_report_csv(body, reports);
  } else if (a.format == "json") {
    body << report_summary_json(reports).dump(2) << '\n';
  } else {
    throw ValidationError("--format must be csv or json");
  }
  emit(a.out, body.str(), out);
  for (const auto& r : reports) {
    out << r.curve << ": mean blocks " << r.mean_blocks << ", median " << r.median_blocks
        << ", mean precision " << r.mean_precision << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit-merging curve cost estimation, learning and simulation", "bmc"};
  app.require_subcommand(1);

  GenDataArgs gen_data;
  GenQueryArgs gen_queries_args;
  auto* gen = app.add_subcommand("gen", "Generate datasets or query workloads");
  gen->require_subcommand(1);
  auto* gd = gen->add_subcommand("data", "Synthetic UNI or SKEW points as CSV");
  gd->add_option("--kind", gen_data.kind, "uni or skew")->capture_default_str();
  gd->add_option("--n", gen_data.n, "Number of points")->capture_default_str();
  gd->add_option("--d", gen_data.d, "Dimensions")->capture_default_str();
  gd->add_option("--l", gen_data.l, "Bits per dimension")->capture_default_str();
  gd->add_option("--seed", gen_data.seed)->capture_default_str();
  gd->add_option("--out", gen_data.out)->capture_default_str();
  auto* gq = gen->add_subcommand("queries", "Range queries centred on dataset points, as JSON");
  gq->add_option("--data", gen_queries_args.data, "Grid-coordinate CSV")->required();
  gq->add_option("--l", gen_queries_args.l, "Bits per dimension")->required();
  gq->add_option("--n", gen_queries_args.n, "Number of queries")->capture_default_str();
  gq->add_option("--edge", gen_queries_args.edge, "Side length (one, or one per dimension)")->delimiter(',');
  gq->add_option("--area", gen_queries_args.area, "Cells per query (with --aspect)");
  gq->add_option("--aspect", gen_queries_args.aspect, "Width:height, e.g. 16:1");
  gq->add_option("--seed", gen_queries_args.seed)->capture_default_str();
  gq->add_option("--out", gen_queries_args.out)->capture_default_str();

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Global and local cost of curves over a workload");
  e->add_option("--workload", est.workload)->required();
  e->add_option("--l", est.l, "Bits per dimension")->required();
  e->add_option("--curves", est.curves, "ZC, LC, curve strings or @file")->delimiter(',');
  e->add_option("--curves-file", est.curves_file, "One curve per line");
  e->add_flag("--global", est.global, "Report global cost");
  e->add_flag("--local", est.local, "Report local cost");
  e->add_flag("--naive", est.naive, "Also compute brute-force costs and check agreement");
  e->add_flag("--bench", est.bench, "Report median timings");
  e->add_option("--reps", est.reps, "Timing repetitions (>= 5)")->capture_default_str();
  e->add_option("--format", est.format, "csv or json")->capture_default_str();
  e->add_option("--out", est.out, "Output file (default stdout)");

  LearnArgs learn;
  auto* lr = app.add_subcommand("learn", "Learn a curve by reinforcement-learning bit swaps");
  lr->add_option("--workload", learn.workload);
  lr->add_option("--tables", learn.tables, "Summary written by 'tables build'");
  lr->add_option("--l", learn.l, "Bits per dimension (with --workload)");
  lr->add_option("--config", learn.config, "Learner config JSON");
  lr->add_option("--seed", learn.seed);
  lr->add_option("--episodes", learn.episodes);
  lr->add_option("--steps", learn.steps, "Steps per episode");
  lr->add_option("--init", learn.init, "Initial curve")->capture_default_str();
  lr->add_option("--out", learn.out, "Learned curve file")->capture_default_str();
  lr->add_option("--trace", learn.trace, "Trace CSV (step,cost,ratio,epsilon)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Block-access simulation of curves over a dataset");
  s->add_option("--data", sim.data)->required();
  s->add_option("--workload", sim.workload)->required();
  s->add_option("--l", sim.l, "Bits per dimension")->required();
  s->add_option("--curves", sim.curves, "ZC, LC, HC, curve strings or @file")->delimiter(',');
  s->add_option("--curves-file", sim.curves_file);
  s->add_option("--block-size", sim.block_size)->capture_default_str();
  s->add_option("--mode", sim.mode, "per-section or full-range")->capture_default_str();
  s->add_option("--format", sim.format, "csv or json")->capture_default_str();
  s->add_option("--out", sim.out, "Report file (default stdout)");

  TablesArgs tables;
  auto* t = app.add_subcommand("tables", "Build or inspect workload pattern tables");
  t->require_subcommand(1);
  auto* tb = t->add_subcommand("build", "Analyse a workload once for reuse");
  tb->add_option("--workload", tables.workload)->required();
  tb->add_option("--l", tables.l)->required();
  tb->add_option("--out", tables.out)->capture_default_str();
  auto* ti = t->add_subcommand("info", "Describe a saved summary");
  ti->add_option("--in", tables.in)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return kExitValidation;
  }

  try {
    if (gd->parsed()) run_gen_data(gen_data, out);
    else if (gq->parsed()) run_gen_queries(gen_queries_args, out);
    else if (e->parsed()) run_estimate(est, out);
    else if (lr->parsed()) run_learn(learn, out);
    else if (s->parsed()) run_simulate(sim, out);
    else if (tb->parsed()) run_tables_build(tables, out);
    else if (ti->parsed()) run_tables_info(tables, out);
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const BudgetExceeded& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitIo;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace bmc::cli
