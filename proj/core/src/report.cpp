#include "gcause/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gcause/csv.hpp"
#include "gcause/errors.hpp"
#include "gcause/rng.hpp"
#include "gcause/standardize.hpp"
#include "json_detail.hpp"

namespace gcause {

namespace {

using ojson = nlohmann::ordered_json;  // keeps the config's group order

void check_keys(const ojson& obj, std::initializer_list<const char*> allowed,
                const char* where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw UsageError("unknown key '" + item.key() + "' in " + where +
                       " section of the config");
  }
}

template <typename T>
T field(const ojson& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  }
}

template <typename T>
T require_field(const ojson& obj, const char* key, const char* where) {
  if (!obj.contains(key))
    throw UsageError(std::string("config is missing required field '") + key +
                     "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  }
}

SynthSpec parse_synth(const ojson& s, std::uint64_t seed) {
  check_keys(s,
             {"groups", "density", "length", "burn_in", "noise_std", "max_lag",
              "direction"},
             "synth");
  SynthSpec spec;
  spec.group_sizes = require_field<std::vector<int>>(s, "groups", "synth");
  if (spec.group_sizes.size() < 2)
    throw UsageError("synth.groups needs at least two group sizes");
  for (int sz : spec.group_sizes)
    if (sz < 1) throw UsageError("synth.groups sizes must be >= 1");
  spec.sim.density = field<double>(s, "density", spec.sim.density);
  spec.sim.length = field<Eigen::Index>(s, "length", spec.sim.length);
  spec.sim.burn_in = field<Eigen::Index>(s, "burn_in", spec.sim.burn_in);
  spec.sim.noise_std = field<double>(s, "noise_std", spec.sim.noise_std);
  spec.sim.max_lag = field<int>(s, "max_lag", spec.sim.max_lag);
  spec.sim.seed = seed;
  if (s.contains("direction")) {
    auto d = field<std::vector<int>>(s, "direction", {});
    if (d.size() != 2)
      throw UsageError("synth.direction must be a [cause, effect] pair");
    spec.direction = {d[0], d[1]};
  }
  int g = static_cast<int>(spec.group_sizes.size());
  if (spec.direction.first < 0 || spec.direction.first >= g ||
      spec.direction.second < 0 || spec.direction.second >= g ||
      spec.direction.first == spec.direction.second)
    throw UsageError("synth.direction must name two distinct groups");
  spec.sim.validate();
  return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  check_keys(j,
             {"seed", "out", "data", "synth", "groups", "forecaster", "inference",
              "knockoff", "stride", "emit_plots"},
             "top-level");

  RunConfig cfg;
  cfg.seed = field<std::uint64_t>(j, "seed", 0);
  cfg.out_dir = field<std::string>(j, "out", cfg.out_dir);
  cfg.stride = field<Eigen::Index>(j, "stride", 0);
  if (cfg.stride < 0) throw UsageError("stride must be >= 0 (0 means horizon)");
  cfg.emit_plots = field<bool>(j, "emit_plots", false);

  if (j.contains("data")) {
    const ojson& d = j.at("data");
    check_keys(d, {"csv", "header"}, "data");
    cfg.csv_path = require_field<std::string>(d, "csv", "data");
    cfg.csv_header = field<bool>(d, "header", true);
  }
  if (j.contains("synth")) cfg.synth = parse_synth(j.at("synth"), cfg.seed);
  if (cfg.csv_path && cfg.synth)
    throw UsageError("config provides both data.csv and synth; pick one");

  if (j.contains("groups")) {
    const ojson& g = j.at("groups");
    if (!g.is_object() || g.empty())
      throw UsageError("groups must be an object mapping group names to columns");
    for (const auto& item : g.items()) {
      if (!item.value().is_array() || item.value().empty())
        throw UsageError("group '" + item.key() + "' must be a non-empty array");
      std::vector<ColumnRef> refs;
      for (const auto& e : item.value()) {
        if (e.is_string())
          refs.push_back(ColumnRef{e.get<std::string>(), -1});
        else if (e.is_number_integer())
          refs.push_back(ColumnRef{"", e.get<int>()});
        else
          throw UsageError("group '" + item.key() +
                           "' entries must be column names or indices");
      }
      cfg.group_spec.emplace_back(item.key(), std::move(refs));
    }
  }
  if (cfg.synth && !cfg.group_spec.empty())
    throw UsageError(
        "synthetic runs derive their partition from synth.groups; drop the "
        "groups section");

  if (j.contains("forecaster")) {
    const ojson& f = j.at("forecaster");
    check_keys(f,
               {"context", "horizon", "hidden", "epochs", "learning_rate",
                "clip_norm", "min_sigma", "seed"},
               "forecaster");
    cfg.forecaster.context = field<Eigen::Index>(f, "context", cfg.forecaster.context);
    cfg.forecaster.horizon = field<Eigen::Index>(f, "horizon", cfg.forecaster.horizon);
    cfg.forecaster.hidden = field<Eigen::Index>(f, "hidden", cfg.forecaster.hidden);
    cfg.forecaster.epochs = field<int>(f, "epochs", cfg.forecaster.epochs);
    cfg.forecaster.learning_rate =
        field<double>(f, "learning_rate", cfg.forecaster.learning_rate);
    cfg.forecaster.clip_norm = field<double>(f, "clip_norm", cfg.forecaster.clip_norm);
    cfg.forecaster.min_sigma = field<double>(f, "min_sigma", cfg.forecaster.min_sigma);
    cfg.forecaster.seed = field<std::uint64_t>(f, "seed", cfg.seed);
  } else {
    cfg.forecaster.seed = cfg.seed;
  }
  cfg.forecaster.validate();

  if (j.contains("inference")) {
    const ojson& i = j.at("inference");
    check_keys(i, {"alpha", "eps", "mode", "knockoff_seed_base"}, "inference");
    cfg.inference.alpha = field<double>(i, "alpha", cfg.inference.alpha);
    cfg.inference.eps = field<double>(i, "eps", cfg.inference.eps);
    if (i.contains("mode"))
      cfg.inference.mode =
          testing_mode_from_string(require_field<std::string>(i, "mode", "inference"));
    cfg.inference.knockoff_seed_base =
        field<std::uint64_t>(i, "knockoff_seed_base", cfg.seed);
  } else {
    cfg.inference.knockoff_seed_base = cfg.seed;
  }
  cfg.inference.validate();

  if (j.contains("knockoff")) {
    const ojson& k = j.at("knockoff");
    check_keys(k, {"shrinkage", "method"}, "knockoff");
    if (k.contains("shrinkage")) {
      const auto& s = k.at("shrinkage");
      if (s.is_string()) {
        if (s.get<std::string>() != "auto")
          throw UsageError("knockoff.shrinkage must be a number in [0,1] or \"auto\"");
      } else if (s.is_number()) {
        double lam = s.get<double>();
        if (lam < 0.0 || lam > 1.0)
          throw UsageError("knockoff.shrinkage must lie in [0, 1]");
        cfg.knockoff_shrinkage = lam;
      } else {
        throw UsageError("knockoff.shrinkage must be a number in [0,1] or \"auto\"");
      }
    }
    if (k.contains("method"))
      cfg.knockoff_method = solve_method_from_string(
          require_field<std::string>(k, "method", "knockoff"));
  }
  return cfg;
}

GroupPartition partition_from_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw UsageError("a partition needs at least two groups");
  GroupPartition p;
  int next = 0;
  for (size_t g = 0; g < sizes.size(); ++g) {
    if (sizes[g] < 1) throw UsageError("group sizes must be >= 1");
    Group group;
    group.name = "G" + std::to_string(g + 1);
    for (int k = 0; k < sizes[g]; ++k) group.vars.push_back(next++);
    p.groups.push_back(std::move(group));
  }
  return p;
}

GroupPartition resolve_partition(
    const std::vector<std::pair<std::string, std::vector<ColumnRef>>>& spec,
    const MultivariateSeries& series) {
  if (spec.empty())
    throw UsageError("config needs a groups section naming the variable partition");
  GroupPartition p;
  for (const auto& [name, refs] : spec) {
    Group group;
    group.name = name;
    for (const ColumnRef& ref : refs) {
      if (ref.name.empty()) {
        if (ref.index < 0 || ref.index >= series.n_vars())
          throw UsageError("group '" + name + "' references column index " +
                           std::to_string(ref.index) + " outside the series");
        group.vars.push_back(ref.index);
      } else {
        group.vars.push_back(static_cast<int>(series.index_of(ref.name)));
      }
    }
    p.groups.push_back(std::move(group));
  }
  require_valid_partition(p, static_cast<int>(series.n_vars()));
  return p;
}

SynthArtifacts run_synth(const RunConfig& config) {
  if (!config.synth)
    throw UsageError("config has no synth section to generate data from");
  const SynthSpec& spec = *config.synth;
  SynthArtifacts art;
  art.partition = partition_from_sizes(spec.group_sizes);
  art.graph = sample_graph(art.partition, spec.sim.density, spec.direction,
                           spec.sim.max_lag, spec.sim.seed);
  art.series = simulate(art.graph, spec.sim);
  return art;
}

namespace {

nlohmann::json partition_json(const GroupPartition& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const Group& g : p.groups)
    out.push_back({{"name", g.name}, {"vars", g.vars}});
  return out;
}

nlohmann::json config_echo_json(const RunConfig& config,
                                const GroupPartition& partition,
                                const DiscoveryResult& result) {
  nlohmann::json echo;
  echo["seed"] = config.seed;
  echo["out"] = config.out_dir;
  if (config.csv_path)
    echo["data"] = {{"csv", *config.csv_path}, {"header", config.csv_header}};
  if (config.synth) {
    const SynthSpec& s = *config.synth;
    echo["synth"] = {{"groups", s.group_sizes},
                     {"density", s.sim.density},
                     {"length", s.sim.length},
                     {"burn_in", s.sim.burn_in},
                     {"noise_std", s.sim.noise_std},
                     {"max_lag", s.sim.max_lag},
                     {"direction", {s.direction.first, s.direction.second}}};
  }
  echo["groups"] = partition_json(partition);
  const ForecasterConfig& f = result.forecaster.config;
  echo["forecaster"] = {{"context", f.context},
                        {"horizon", f.horizon},
                        {"hidden", f.hidden},
                        {"epochs", f.epochs},
                        {"learning_rate", f.learning_rate},
                        {"clip_norm", f.clip_norm},
                        {"min_sigma", f.min_sigma},
                        {"seed", f.seed}};
  echo["inference"] = detail::inference_config_json(config.inference);
  nlohmann::json ko;
  if (config.knockoff_shrinkage)
    ko["shrinkage"] = *config.knockoff_shrinkage;
  else
    ko["shrinkage"] = "auto";
  ko["method"] = to_string(config.knockoff_method);
  echo["knockoff"] = ko;
  echo["stride"] = result.windows.stride;
  echo["emit_plots"] = config.emit_plots;
  return echo;
}

std::string sanitize_name(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  return out.empty() ? std::string("g") : out;
}

}  // namespace

DiscoveryRun run_discovery(const RunConfig& config) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  auto ms_since = [](clock::time_point from) {
    return std::chrono::duration<double, std::milli>(clock::now() - from).count();
  };

  std::optional<CausalGraph> truth;
  GroupPartition partition;
  std::optional<MultivariateSeries> raw;
  if (config.synth) {
    SynthArtifacts art = run_synth(config);
    truth = std::move(art.graph);
    partition = std::move(art.partition);
    raw = std::move(art.series);
  } else if (config.csv_path) {
    raw = load_csv(*config.csv_path, config.csv_header);
    partition = resolve_partition(config.group_spec, *raw);
  } else {
    throw UsageError("config needs either data.csv or a synth section");
  }
  MultivariateSeries series = standardize(*raw, IndexRange{0, raw->length()}).first;
  double load_ms = ms_since(start);

  DiscoveryRun run;
  run.result = discover(series, partition, config.forecaster, config.inference,
                        config.stride, config.knockoff_shrinkage,
                        config.knockoff_method);
  run.result.timings.load_ms = load_ms;

  MultivariateSeries knockoffs = sample_knockoffs(
      run.result.knockoff, series, mix_seed(config.seed, 0x64696167));  // "diag"
  run.diag = diagnostics(series, knockoffs);
  if (truth) run.scores = score_decisions(run.result.decisions, *truth);

  nlohmann::json report;
  report["schema"] = kReportSchemaTag;
  report["version"] = kToolVersion;
  report["config_echo"] = config_echo_json(config, partition, run.result);
  report["decisions"] =
      detail::decision_matrix_json(run.result.decisions, config.inference);
  report["diagnostics"] = detail::diagnostics_json(run.diag);
  report["knockoff"] = {
      {"method", to_string(config.knockoff_method)},
      {"shrinkage", run.result.knockoff.shrinkage},
      {"s", std::vector<double>(run.result.knockoff.s.begin(),
                                run.result.knockoff.s.end())}};
  report["training"] = {{"epochs", run.result.forecaster.config.epochs},
                        {"first_loss", run.result.forecaster.loss_trace.front()},
                        {"final_loss", run.result.forecaster.loss_trace.back()}};
  report["windows"] = {{"count", run.result.windows.count()},
                       {"context", run.result.windows.context},
                       {"horizon", run.result.windows.horizon},
                       {"stride", run.result.windows.stride}};
  report["warnings"] = run.result.warnings;
  if (run.scores)
    report["scoring"] = {{"correct", run.scores->correct},
                         {"wrong", run.scores->wrong},
                         {"no_inference", run.scores->no_inference}};
  run.report_json = report.dump(2) + "\n";

  run.result.timings.total_ms = ms_since(start);
  nlohmann::json timing;
  timing["load_ms"] = run.result.timings.load_ms;
  timing["train_ms"] = run.result.timings.train_ms;
  timing["knockoff_ms"] = run.result.timings.knockoff_ms;
  timing["inference_ms"] = run.result.timings.inference_ms;
  timing["total_ms"] = run.result.timings.total_ms;
  run.timing_json = timing.dump(2) + "\n";

  run.loss_csv = loss_trace_csv(run.result.forecaster);

  if (config.emit_plots) {
    for (const PairResiduals& pr : run.result.residuals) {
      std::string fname =
          "pair_" +
          sanitize_name(partition.groups[static_cast<size_t>(pr.src_group)].name) +
          "_to_" +
          sanitize_name(partition.groups[static_cast<size_t>(pr.dst_group)].name) +
          ".svg";
      run.plots.emplace_back(fname,
                             residual_histogram_svg(pr, partition, series.names));
    }
  }
  return run;
}

DecisionMatrix decision_matrix_from_report(const std::string& report_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(report_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != kReportSchemaTag)
      throw UsageError("unsupported report schema tag");
    DecisionMatrix m;
    for (const auto& g : j.at("config_echo").at("groups")) {
      Group group;
      group.name = g.at("name").get<std::string>();
      group.vars = g.at("vars").get<std::vector<int>>();
      m.partition.groups.push_back(std::move(group));
    }
    const auto& d = j.at("decisions");
    m.alpha = d.at("alpha").get<double>();
    for (const auto& p : d.at("pairs")) {
      PairDecision dec;
      dec.src_group = p.at("src").get<int>();
      dec.dst_group = p.at("dst").get<int>();
      auto raw = p.at("node_pvalues").get<std::vector<double>>();
      auto stat = p.at("statistic").get<std::vector<double>>();
      if (raw.size() != stat.size())
        throw UsageError("report pair has mismatched p-value/statistic lengths");
      for (size_t k = 0; k < raw.size(); ++k) {
        KSResult ks;
        ks.statistic = stat[k];
        ks.p_value = raw[k];
        dec.node_tests.push_back(ks);
      }
      dec.adjusted_p = p.at("adjusted").get<std::vector<double>>();
      dec.causes = p.at("verdict").get<std::string>() == "causes";
      m.pairs.push_back(std::move(dec));
    }
    for (const auto& l : d.at("links"))
      m.links.push_back(PairLink{
          l.at("a").get<int>(), l.at("b").get<int>(),
          link_label_from_string(l.at("label").get<std::string>())});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("report is missing or mistypes a field: ") +
                     e.what());
  }
}

Scores score_report(const std::string& report_json, const std::string& graph_json) {
  DecisionMatrix m = decision_matrix_from_report(report_json);
  CausalGraph truth = graph_from_json(graph_json);
  return score_decisions(m, truth);
}

Scores aggregate_scores(const std::vector<Scores>& runs) {
  if (runs.empty()) throw UsageError("no runs to aggregate");
  Scores sum{0, 0, 0};
  for (const Scores& s : runs) {
    sum.correct += s.correct;
    sum.wrong += s.wrong;
    sum.no_inference += s.no_inference;
  }
  auto mean2 = [&](double v) {
    return std::round(v / static_cast<double>(runs.size()) * 100.0) / 100.0;
  };
  return Scores{mean2(sum.correct), mean2(sum.wrong), mean2(sum.no_inference)};
}

std::string scores_to_json(const Scores& scores, int n_runs) {
  nlohmann::json j;
  j["correct"] = scores.correct;
  j["wrong"] = scores.wrong;
  j["no_inference"] = scores.no_inference;
  j["runs"] = n_runs;
  return j.dump(2) + "\n";
}

BenchmarkSpec parse_benchmark_spec(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("benchmark spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("benchmark spec must be a JSON object");
  check_keys(j, {"densities", "seeds", "run"}, "benchmark");
  BenchmarkSpec spec;
  spec.densities = require_field<std::vector<double>>(j, "densities", "benchmark");
  if (spec.densities.empty())
    throw UsageError("benchmark needs at least one density");
  for (double d : spec.densities)
    if (!(d > 0.0) || d > 1.0)
      throw UsageError("benchmark densities must lie in (0, 1]");
  spec.seeds_per_density = field<int>(j, "seeds", 3);
  if (spec.seeds_per_density < 1)
    throw UsageError("benchmark needs seeds >= 1 per density");
  if (!j.contains("run"))
    throw UsageError("benchmark spec needs a run section with a synth block");
  spec.base = parse_run_config(j.at("run").dump());
  if (!spec.base.synth)
    throw UsageError("the benchmark run section must use synth data");
  return spec;
}

namespace {

std::string cell_name(double density, int seed_idx) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "d%.2f_s%d", density, seed_idx);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ComputeError("cannot write " + path.string());
  out << content;
  if (!out.good()) throw ComputeError("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ComputeError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec,
                                        const std::string& out_dir,
                                        std::ostream* log) {
  namespace fs = std::filesystem;
  fs::path cells = fs::path(out_dir) / "cells";
  fs::create_directories(cells);

  std::vector<BenchmarkRow> rows;
  for (double density : spec.densities) {
    std::vector<Scores> cell_scores;
    for (int s = 0; s < spec.seeds_per_density; ++s) {
      std::string name = cell_name(density, s);
      fs::path dir = cells / name;
      fs::create_directories(dir);
      fs::path scoring_path = dir / "scoring.json";

      if (fs::exists(scoring_path)) {
        // Resume: this cell already finished in an earlier invocation.
        nlohmann::json sj = nlohmann::json::parse(read_file(scoring_path));
        cell_scores.push_back(Scores{sj.at("correct").get<double>(),
                                     sj.at("wrong").get<double>(),
                                     sj.at("no_inference").get<double>()});
        if (log) *log << "cell " << name << ": reused existing result\n";
        continue;
      }

      RunConfig cfg = spec.base;
      cfg.synth->sim.density = density;
      cfg.seed = spec.base.seed + static_cast<std::uint64_t>(s);
      cfg.synth->sim.seed = cfg.seed;
      cfg.forecaster.seed = spec.base.forecaster.seed + static_cast<std::uint64_t>(s);
      cfg.inference.knockoff_seed_base =
          spec.base.inference.knockoff_seed_base + static_cast<std::uint64_t>(s);
      cfg.out_dir = dir.string();
      cfg.emit_plots = false;

      try {
        SynthArtifacts art = run_synth(cfg);
        write_file(dir / "graph.json", graph_to_json(art.graph));
        save_csv(art.series, (dir / "series.csv").string());
        DiscoveryRun run = run_discovery(cfg);
        write_file(dir / "report.json", run.report_json);
        write_file(dir / "timing.json", run.timing_json);
        Scores sc = score_report(run.report_json, graph_to_json(art.graph));
        write_file(scoring_path, scores_to_json(sc, 1));
        cell_scores.push_back(sc);
        if (log)
          *log << "cell " << name << ": correct=" << sc.correct
               << " wrong=" << sc.wrong << " none=" << sc.no_inference << "\n";
      } catch (const std::exception& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        throw;
      }
    }
    rows.push_back(BenchmarkRow{density, aggregate_scores(cell_scores),
                                spec.seeds_per_density});
  }
  return rows;
}

std::string benchmark_table(const std::vector<BenchmarkRow>& rows) {
  std::string out = "density  correct  wrong  no_inference  runs\n";
  char buf[96];
  for (const BenchmarkRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-7.2f  %-7.2f  %-5.2f  %-12.2f  %d\n",
                  r.density, r.scores.correct, r.scores.wrong,
                  r.scores.no_inference, r.n_runs);
    out += buf;
  }
  return out;
}

std::string benchmark_to_json(const std::vector<BenchmarkRow>& rows) {
  nlohmann::json j;
  j["schema"] = "gcause-benchmark/1";
  j["rows"] = nlohmann::json::array();
  for (const BenchmarkRow& r : rows)
    j["rows"].push_back({{"density", r.density},
                         {"correct", r.scores.correct},
                         {"wrong", r.scores.wrong},
                         {"no_inference", r.scores.no_inference},
                         {"runs", r.n_runs}});
  return j.dump(2) + "\n";
}

std::string residual_histogram_svg(const PairResiduals& residuals,
                                   const GroupPartition& partition,
                                   const std::vector<std::string>& var_names) {
  const Eigen::MatrixXd& clean = residuals.clean.residuals;
  const Eigen::MatrixXd& interv = residuals.interventional.residuals;
  const std::vector<int>& targets = residuals.clean.targets;
  constexpr int kBins = 24;
  constexpr double kWidth = 600.0, kPanelH = 150.0, kHeader = 34.0, kPad = 20.0;

  Eigen::Index n_nodes = clean.cols();
  double total_h = kPad + static_cast<double>(n_nodes) * (kHeader + kPanelH + kPad);
  char buf[256];
  std::string svg;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\">\n",
                kWidth + 2 * kPad, total_h);
  svg += buf;

  const std::string& src = partition.groups[static_cast<size_t>(residuals.src_group)].name;
  const std::string& dst = partition.groups[static_cast<size_t>(residuals.dst_group)].name;

  for (Eigen::Index k = 0; k < n_nodes; ++k) {
    double y0 = kPad + static_cast<double>(k) * (kHeader + kPanelH + kPad);
    double lo = std::min(clean.col(k).minCoeff(), interv.col(k).minCoeff());
    double hi = std::max(clean.col(k).maxCoeff(), interv.col(k).maxCoeff());
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    std::vector<int> hc(kBins, 0), hi_counts(kBins, 0);
    auto bucket = [&](double v) {
      int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * kBins));
      return std::clamp(b, 0, kBins - 1);
    };
    for (Eigen::Index w = 0; w < clean.rows(); ++w) {
      ++hc[static_cast<size_t>(bucket(clean(w, k)))];
      ++hi_counts[static_cast<size_t>(bucket(interv(w, k)))];
    }
    int peak = 1;
    for (int b = 0; b < kBins; ++b)
      peak = std::max({peak, hc[static_cast<size_t>(b)],
                       hi_counts[static_cast<size_t>(b)]});

    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.0f\" y=\"%.1f\">%s -&gt; %s, node %s: clean (blue) "
                  "vs intervened (orange) residuals</text>\n",
                  kPad, y0 + 14.0, src.c_str(), dst.c_str(),
                  var_names[static_cast<size_t>(targets[static_cast<size_t>(k)])].c_str());
    svg += buf;

    double base = y0 + kHeader + kPanelH;
    double bw = kWidth / kBins;
    for (int b = 0; b < kBins; ++b) {
      double x = kPad + b * bw;
      double h1 = kPanelH * hc[static_cast<size_t>(b)] / peak;
      double h2 = kPanelH * hi_counts[static_cast<size_t>(b)] / peak;
      if (hc[static_cast<size_t>(b)] > 0) {
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                      "fill=\"#4878a8\" fill-opacity=\"0.55\"/>\n",
                      x, base - h1, bw, h1);
        svg += buf;
      }
      if (hi_counts[static_cast<size_t>(b)] > 0) {
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                      "fill=\"#d97b29\" fill-opacity=\"0.55\"/>\n",
                      x, base - h2, bw, h2);
        svg += buf;
      }
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#333\"/>\n<text x=\"%.1f\" y=\"%.1f\">%.4g</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.4g</text>\n",
                  kPad, base, kPad + kWidth, base, kPad, base + 14.0, lo,
                  kPad + kWidth, base + 14.0, hi);
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gcause
