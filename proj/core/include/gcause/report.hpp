#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcause/forecaster.hpp"
#include "gcause/invariance.hpp"
#include "gcause/knockoff.hpp"
#include "gcause/partition.hpp"
#include "gcause/series.hpp"
#include "gcause/synth.hpp"

namespace gcause {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchemaTag = "gcause-report/1";

/// One column reference from a config partition entry: a header name, or
/// a zero-based column index when the config gave a number.
struct ColumnRef {
  std::string name;
  int index = -1;
};

struct SynthSpec {
  std::vector<int> group_sizes;
  std::pair<int, int> direction{0, 1};
  SimConfig sim;
};

/// Declarative run description, parsed from a single JSON document and
/// echoed (with every default resolved) into the report for provenance.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "gcause-out";
  std::optional<std::string> csv_path;
  bool csv_header = true;
  std::optional<SynthSpec> synth;
  std::vector<std::pair<std::string, std::vector<ColumnRef>>> group_spec;
  ForecasterConfig forecaster;
  InferenceConfig inference;
  std::optional<double> knockoff_shrinkage;  // nullopt = auto grid
  SolveMethod knockoff_method = SolveMethod::SdpCoordinate;
  Eigen::Index stride = 0;  // 0 = horizon
  bool emit_plots = false;
};

/// Strictly validated parse: unknown keys, bad types and violated
/// invariants are all UsageErrors naming the offending field.
RunConfig parse_run_config(const std::string& json_text);

GroupPartition partition_from_sizes(const std::vector<int>& sizes);

/// Maps a config partition onto the columns of a concrete series.
GroupPartition resolve_partition(
    const std::vector<std::pair<std::string, std::vector<ColumnRef>>>& spec,
    const MultivariateSeries& series);

struct SynthArtifacts {
  CausalGraph graph;
  MultivariateSeries series;
  GroupPartition partition;
};

SynthArtifacts run_synth(const RunConfig& config);

struct DiscoveryRun {
  DiscoveryResult result;
  KnockoffDiagnostics diag;
  std::optional<Scores> scores;  // present when the series came from synth
  std::string report_json;       // deterministic: same config, same bytes
  std::string timing_json;       // wall clock; kept out of report_json on purpose
  std::string loss_csv;
  std::vector<std::pair<std::string, std::string>> plots;  // filename -> svg
};

/// standardize -> window -> train -> knockoff fit -> discover -> report.
DiscoveryRun run_discovery(const RunConfig& config);

DecisionMatrix decision_matrix_from_report(const std::string& report_json);

Scores score_report(const std::string& report_json, const std::string& graph_json);

/// Mean fractions over runs, rounded to 2 decimals (the granularity the
/// benchmark table is read at). Errors on an empty list.
Scores aggregate_scores(const std::vector<Scores>& runs);

std::string scores_to_json(const Scores& scores, int n_runs);

struct BenchmarkSpec {
  std::vector<double> densities;
  int seeds_per_density = 3;
  RunConfig base;  // must carry a synth block; per-cell density/seed are set on it
};

BenchmarkSpec parse_benchmark_spec(const std::string& json_text);

struct BenchmarkRow {
  double density;
  Scores scores;
  int n_runs;
};

/// Runs synth + discover + eval per (density, seed) cell, writing each
/// cell's artifacts under out_dir/cells/<cell>/ so an interrupted sweep
/// resumes by skipping cells whose scoring.json already exists. A failed
/// cell leaves a FAILED marker behind before the error propagates.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec,
                                        const std::string& out_dir,
                                        std::ostream* log);

std::string benchmark_table(const std::vector<BenchmarkRow>& rows);
std::string benchmark_to_json(const std::vector<BenchmarkRow>& rows);

/// Overlaid clean/interventional residual histograms for one ordered
/// group pair, one panel per target node.
std::string residual_histogram_svg(const PairResiduals& residuals,
                                   const GroupPartition& partition,
                                   const std::vector<std::string>& var_names);

}  // namespace gcause
