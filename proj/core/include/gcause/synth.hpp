#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcause/decision.hpp"
#include "gcause/partition.hpp"
#include "gcause/series.hpp"

namespace gcause {

/// Lagged link shape applied to the source value. Nonlinear links clamp
/// their argument to [-3, 3] to keep the recursion bounded.
enum class LinkKind { Linear, Polynomial, Exponential };

std::string to_string(LinkKind kind);
LinkKind link_kind_from_string(const std::string& s);

double apply_link(LinkKind kind, double coef, double x);

struct Edge {
  int src;
  int dst;
  int lag;  // >= 1, contemporaneous effects excluded
  LinkKind f;
  double coef;
};

/// Ground-truth lagged causal graph over grouped variables. direction
/// lists the ordered group pairs with at least one crossing variable edge.
struct CausalGraph {
  int n_vars;
  std::vector<Edge> edges;
  GroupPartition partition;
  std::vector<std::pair<int, int>> direction;

  int max_lag() const;
};

struct SimConfig {
  Eigen::Index length = 1000;
  Eigen::Index burn_in = 100;
  // Unit-scale noise keeps the tanh/poly/exp links active (at small noise
  // they are indistinguishable from affine maps) and the argument clamps
  // engaged, which stops dense intra-group feedback from amplifying into
  // near-unit-root drift that drowns the cross-group signal.
  double noise_std = 1.5;
  int max_lag = 2;
  double density = 0.5;  // interaction density rho, recorded for provenance
  std::uint64_t seed = 0;

  void validate() const;  // throws UsageError on a violated invariant
};

/// Draws a graph in which every admissible cross-group pair (source in
/// the cause group, target in the effect group) gets an edge with
/// probability `density`, at least one cross edge is forced, intra-group
/// and self-lag edges are drawn at the same density, lags are uniform on
/// {1..max_lag}, link kinds uniform over the three tags and coefficients
/// uniform on +-[0.2, 0.8]. No edge ever points from the effect group
/// back to the cause group.
CausalGraph sample_graph(const GroupPartition& partition, double density,
                         std::pair<int, int> direction, int max_lag,
                         std::uint64_t seed);

/// Runs the lagged recursion Z_t[j] = sum_edges coef * f(Z_{t-lag}[src]) + eta
/// with i.i.d. N(0, noise_std^2) noise, drops burn_in rows, and rescales
/// any column whose sample std exceeds 10 back to unit variance. Throws
/// ComputeError naming the variable and step if the recursion diverges.
MultivariateSeries simulate(const CausalGraph& graph, const SimConfig& config);

/// Table-style scoring fractions over the ordered group pairs that carry
/// a true directed link; the three fractions sum to 1.
struct Scores {
  double correct;
  double wrong;
  double no_inference;
};

Scores score_decisions(const DecisionMatrix& predicted, const CausalGraph& truth);

std::string graph_to_json(const CausalGraph& graph);
CausalGraph graph_from_json(const std::string& text);

}  // namespace gcause
