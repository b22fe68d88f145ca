#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcause/csv.hpp"
#include "gcause/errors.hpp"
#include "gcause/forecaster.hpp"
#include "gcause/knockoff.hpp"
#include "gcause/report.hpp"
#include "gcause/rng.hpp"
#include "gcause/series.hpp"
#include "gcause/standardize.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gcause::UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gcause::ComputeError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out.good()) throw gcause::ComputeError("write failed for " + path.string());
}

// Folds --seed/--out/--emit-plots into the config document before the
// strict parse, so the report echo matches what actually ran. Explicit
// per-section seeds in the config still win over the top-level one.
std::string patch_config(const std::string& text,
                         const std::optional<std::uint64_t>& seed,
                         const std::string& out, bool emit_plots,
                         bool benchmark_spec) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw gcause::UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw gcause::UsageError("config must be a JSON object");
  nlohmann::ordered_json* run = &j;
  if (benchmark_spec) {
    if (!j.contains("run") || !j.at("run").is_object())
      throw gcause::UsageError("benchmark spec needs a run section");
    run = &j.at("run");
  }
  if (seed) (*run)["seed"] = *seed;
  if (!out.empty()) (*run)["out"] = out;
  if (emit_plots) (*run)["emit_plots"] = true;
  return j.dump();
}

gcause::MultivariateSeries load_input(const gcause::RunConfig& cfg) {
  if (cfg.synth) return gcause::run_synth(cfg).series;
  if (cfg.csv_path) return gcause::load_csv(*cfg.csv_path, cfg.csv_header);
  throw gcause::UsageError("config needs either data.csv or a synth section");
}

int cmd_synth(const std::string& config_text) {
  gcause::RunConfig cfg = gcause::parse_run_config(config_text);
  gcause::SynthArtifacts art = gcause::run_synth(cfg);
  fs::path out = cfg.out_dir;
  fs::create_directories(out);
  write_file(out / "graph.json", gcause::graph_to_json(art.graph));
  gcause::save_csv(art.series, (out / "series.csv").string());
  const auto& dir = cfg.synth->direction;
  std::printf("wrote graph.json and series.csv to %s (N=%lld, T=%lld, density=%.2f, %s->%s)\n",
              out.string().c_str(), static_cast<long long>(art.series.n_vars()),
              static_cast<long long>(art.series.length()), cfg.synth->sim.density,
              art.partition.groups[static_cast<size_t>(dir.first)].name.c_str(),
              art.partition.groups[static_cast<size_t>(dir.second)].name.c_str());
  return 0;
}

int cmd_discover(const std::string& config_text) {
  gcause::RunConfig cfg = gcause::parse_run_config(config_text);
  gcause::DiscoveryRun run = gcause::run_discovery(cfg);
  for (const std::string& w : run.result.warnings)
    std::cerr << "warning: " << w << "\n";

  fs::path out = cfg.out_dir;
  write_file(out / "report.json", run.report_json);
  write_file(out / "timing.json", run.timing_json);
  write_file(out / "loss_trace.csv", run.loss_csv);
  for (const auto& [name, svg] : run.plots) write_file(out / "plots" / name, svg);

  const gcause::GroupPartition& p = run.result.decisions.partition;
  for (const gcause::PairLink& link : run.result.decisions.links)
    std::printf("%s %s %s\n",
                p.groups[static_cast<size_t>(link.group_a)].name.c_str(),
                gcause::to_string(link.label).c_str(),
                p.groups[static_cast<size_t>(link.group_b)].name.c_str());
  std::printf("report written to %s\n", (out / "report.json").string().c_str());
  return 0;
}

int cmd_eval(const std::vector<std::string>& reports,
             const std::vector<std::string>& graphs, const std::string& out) {
  if (reports.empty()) throw gcause::UsageError("eval needs at least one report");
  if (reports.size() != graphs.size())
    throw gcause::UsageError("eval needs one --graph per --report");
  std::vector<gcause::Scores> all;
  for (size_t i = 0; i < reports.size(); ++i)
    all.push_back(gcause::score_report(read_file(reports[i]), read_file(graphs[i])));
  std::string json =
      gcause::scores_to_json(gcause::aggregate_scores(all), static_cast<int>(all.size()));
  std::fputs(json.c_str(), stdout);
  if (!out.empty()) write_file(fs::path(out) / "scoring.json", json);
  return 0;
}

int cmd_benchmark(const std::string& config_text, const std::string& out) {
  gcause::BenchmarkSpec spec = gcause::parse_benchmark_spec(config_text);
  std::string root = !out.empty() ? out : spec.base.out_dir;
  std::vector<gcause::BenchmarkRow> rows = gcause::run_benchmark(spec, root, &std::cerr);
  std::string table = gcause::benchmark_table(rows);
  write_file(fs::path(root) / "benchmark.json", gcause::benchmark_to_json(rows));
  write_file(fs::path(root) / "table.txt", table);
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_knockoff_diag(const std::string& config_text) {
  gcause::RunConfig cfg = gcause::parse_run_config(config_text);
  gcause::MultivariateSeries raw = load_input(cfg);
  gcause::MultivariateSeries series =
      gcause::standardize(raw, gcause::IndexRange{0, raw.length()}).first;
  gcause::KnockoffModel model =
      gcause::fit_gaussian(series, cfg.knockoff_shrinkage, cfg.knockoff_method);
  gcause::MultivariateSeries knockoffs =
      gcause::sample_knockoffs(model, series, gcause::mix_seed(cfg.seed, 0x64696167));
  std::string json = gcause::diagnostics_to_json(gcause::diagnostics(series, knockoffs));
  std::fputs(json.c_str(), stdout);
  std::printf("shrinkage=%.4g, method=%s\n", model.shrinkage,
              gcause::to_string(cfg.knockoff_method).c_str());
  write_file(fs::path(cfg.out_dir) / "diagnostics.json", json);
  return 0;
}

int cmd_grad_check(const std::string& config_text, std::uint64_t seed, double step) {
  gcause::ForecasterConfig fc;
  fc.context = 5;
  fc.horizon = 3;
  fc.hidden = 4;
  if (!config_text.empty()) {
    gcause::RunConfig cfg = gcause::parse_run_config(config_text);
    fc = cfg.forecaster;
    seed = cfg.seed;
  }
  fc.seed = seed;

  Eigen::MatrixXd m(fc.context + fc.horizon, 3);
  gcause::Rng rng(gcause::mix_seed(seed, 0x70726f62));  // "prob" substream
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(t, j) = rng.normal();
  auto probe = gcause::MultivariateSeries::make(std::move(m), gcause::default_names(3));

  double err = gcause::gradient_check(fc, probe, step);
  std::printf("max relative gradient error: %.3e (fd step %.1e)\n", err, step);
  if (err >= 1e-4) {
    std::cerr << "gradient check failed: error exceeds 1e-4\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-level causal discovery: knockoff interventions on a "
               "probabilistic forecaster, KS residual-invariance tests"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool emit_plots = false;
  double step = 1e-5;
  std::vector<std::string> report_paths, graph_paths;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "JSON run config");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config's top-level seed");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
  };

  CLI::App* synth = app.add_subcommand(
      "synth", "generate a ground-truth graph and a simulated series");
  add_common(synth, true);

  CLI::App* discover = app.add_subcommand(
      "discover", "train, intervene and test; writes report.json");
  add_common(discover, true);
  discover->add_flag("--emit-plots", emit_plots,
                     "write per-pair residual histograms as SVG");

  CLI::App* eval = app.add_subcommand(
      "eval", "score one or more reports against ground-truth graphs");
  eval->add_option("--report", report_paths, "report.json (repeatable)")->required();
  eval->add_option("--graph", graph_paths, "graph.json (repeatable)")->required();
  eval->add_option("--out", out_dir, "directory to write scoring.json into");

  CLI::App* bench = app.add_subcommand(
      "benchmark", "density sweep of synth + discover + eval cells");
  add_common(bench, true);

  CLI::App* kdiag = app.add_subcommand(
      "knockoff-diag", "fit a knockoff model and print exchangeability diagnostics");
  add_common(kdiag, true);

  CLI::App* gcheck = app.add_subcommand(
      "grad-check", "compare analytic forecaster gradients with finite differences");
  add_common(gcheck, false);
  gcheck->add_option("--step", step, "central finite-difference step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    std::optional<std::uint64_t> seed_override;
    auto seed_given = [&](CLI::App* sub) {
      if (sub->count("--seed") > 0) seed_override = seed;
    };

    if (synth->parsed()) {
      seed_given(synth);
      return cmd_synth(
          patch_config(read_file(config_path), seed_override, out_dir, false, false));
    }
    if (discover->parsed()) {
      seed_given(discover);
      return cmd_discover(patch_config(read_file(config_path), seed_override, out_dir,
                                       emit_plots, false));
    }
    if (eval->parsed()) return cmd_eval(report_paths, graph_paths, out_dir);
    if (bench->parsed()) {
      seed_given(bench);
      return cmd_benchmark(
          patch_config(read_file(config_path), seed_override, "", false, true),
          out_dir);
    }
    if (kdiag->parsed()) {
      seed_given(kdiag);
      return cmd_knockoff_diag(
          patch_config(read_file(config_path), seed_override, out_dir, false, false));
    }
    if (gcheck->parsed())
      return cmd_grad_check(
          config_path.empty() ? std::string() : read_file(config_path), seed, step);
    return 1;  // unreachable: a subcommand is required
  } catch (const gcause::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const gcause::ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
