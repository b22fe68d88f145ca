#include "gcause/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gcause/errors.hpp"
#include "gcause/rng.hpp"
#include "json_detail.hpp"

namespace gcause {

std::string to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Linear: return "linear";
    case LinkKind::Polynomial: return "polynomial";
    case LinkKind::Exponential: return "exponential";
  }
  throw ComputeError("invalid LinkKind value");
}

LinkKind link_kind_from_string(const std::string& s) {
  if (s == "linear") return LinkKind::Linear;
  if (s == "polynomial") return LinkKind::Polynomial;
  if (s == "exponential") return LinkKind::Exponential;
  throw UsageError("unknown link kind '" + s +
                   "' (expected linear, polynomial or exponential)");
}

double apply_link(LinkKind kind, double coef, double x) {
  switch (kind) {
    case LinkKind::Linear:
      return coef * x;
    case LinkKind::Polynomial: {
      double c = std::clamp(x, -3.0, 3.0);
      return coef * c * c;
    }
    case LinkKind::Exponential:
      return coef * std::exp(std::clamp(x, -3.0, 3.0));
  }
  throw ComputeError("invalid LinkKind value");
}

int CausalGraph::max_lag() const {
  int m = 0;
  for (const Edge& e : edges) m = std::max(m, e.lag);
  return m;
}

void SimConfig::validate() const {
  if (length < 1) throw UsageError("simulation length must be >= 1");
  if (burn_in < 0) throw UsageError("burn_in must be >= 0");
  if (max_lag < 1) throw UsageError("max_lag must be >= 1");
  if (burn_in < max_lag)
    throw UsageError("burn_in must be >= max_lag so early rows are discarded");
  if (!(noise_std > 0.0)) throw UsageError("noise_std must be > 0");
  if (!(density > 0.0) || density > 1.0)
    throw UsageError("density must lie in (0, 1]");
}

namespace {

// One full edge attribute draw; the order (lag, kind, magnitude, sign) is
// part of the generator contract and must not change.
Edge draw_edge(int src, int dst, int max_lag, Rng& rng) {
  Edge e;
  e.src = src;
  e.dst = dst;
  e.lag = static_cast<int>(rng.uniform_int(1, max_lag));
  e.f = static_cast<LinkKind>(rng.uniform_int(0, 2));
  double mag = rng.uniform(0.2, 0.8);
  e.coef = rng.uniform() < 0.5 ? -mag : mag;
  return e;
}

void validate_graph(const CausalGraph& graph) {
  require_valid_partition(graph.partition, graph.n_vars);
  for (const Edge& e : graph.edges) {
    if (e.src < 0 || e.src >= graph.n_vars || e.dst < 0 || e.dst >= graph.n_vars)
      throw UsageError("graph edge references a variable outside [0, n_vars)");
    if (e.lag < 1) throw UsageError("graph edge lag must be >= 1");
    if (!std::isfinite(e.coef)) throw UsageError("graph edge coefficient is not finite");
  }
  int g = graph.partition.n_groups();
  for (auto [a, b] : graph.direction) {
    if (a < 0 || a >= g || b < 0 || b >= g || a == b)
      throw UsageError("graph direction references an invalid group pair");
  }
}

}  // namespace

CausalGraph sample_graph(const GroupPartition& partition, double density,
                         std::pair<int, int> direction, int max_lag,
                         std::uint64_t seed) {
  require_valid_partition(partition, partition.n_vars());
  if (!(density > 0.0) || density > 1.0)
    throw UsageError("density must lie in (0, 1]");
  if (max_lag < 1) throw UsageError("max_lag must be >= 1");
  auto [cause, effect] = direction;
  if (cause < 0 || cause >= partition.n_groups() || effect < 0 ||
      effect >= partition.n_groups() || cause == effect)
    throw UsageError("direction must name two distinct groups of the partition");

  Rng rng(mix_seed(seed, 0x67726170));  // "grap" substream

  CausalGraph graph;
  graph.n_vars = partition.n_vars();
  graph.partition = partition;

  const auto& cause_vars = partition.groups[static_cast<size_t>(cause)].vars;
  const auto& effect_vars = partition.groups[static_cast<size_t>(effect)].vars;

  // Cross edges: every (source in cause, target in effect) pair is a
  // candidate; the reverse orientation is never drawn.
  int n_cross = 0;
  for (int src : cause_vars)
    for (int dst : effect_vars)
      if (rng.uniform() < density) {
        graph.edges.push_back(draw_edge(src, dst, max_lag, rng));
        ++n_cross;
      }
  if (n_cross == 0) {
    // Guarantee the declared direction actually exists in the data.
    int src = cause_vars[static_cast<size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(cause_vars.size()) - 1))];
    int dst = effect_vars[static_cast<size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(effect_vars.size()) - 1))];
    graph.edges.push_back(draw_edge(src, dst, max_lag, rng));
  }

  // Intra-group edges, self-lags included, at the same density.
  for (const Group& group : partition.groups)
    for (int src : group.vars)
      for (int dst : group.vars)
        if (rng.uniform() < density)
          graph.edges.push_back(draw_edge(src, dst, max_lag, rng));

  graph.direction.emplace_back(cause, effect);
  return graph;
}

MultivariateSeries simulate(const CausalGraph& graph, const SimConfig& config) {
  config.validate();
  validate_graph(graph);
  int lag = graph.max_lag();
  if (config.burn_in < lag)
    throw UsageError("burn_in must be >= the largest lag in the graph");

  Eigen::Index total = config.burn_in + config.length;
  Eigen::Index n = graph.n_vars;

  // The full noise matrix is drawn up front, row-major, so a trajectory
  // can be reproduced from the seed without replaying the recursion's
  // control flow.
  Rng rng(mix_seed(config.seed, 0x73696d75));  // "simu" substream
  Eigen::MatrixXd noise(total, n);
  for (Eigen::Index t = 0; t < total; ++t)
    for (Eigen::Index j = 0; j < n; ++j)
      noise(t, j) = config.noise_std * rng.normal();

  Eigen::MatrixXd z(total, n);
  for (Eigen::Index t = 0; t < total; ++t) {
    z.row(t) = noise.row(t);
    if (t >= lag)
      for (const Edge& e : graph.edges)
        z(t, e.dst) += apply_link(e.f, e.coef, z(t - e.lag, e.src));
    for (Eigen::Index j = 0; j < n; ++j)
      if (!std::isfinite(z(t, j))) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "simulation diverged: Z%lld is not finite at step %lld "
                      "(burn-in included)",
                      static_cast<long long>(j + 1), static_cast<long long>(t));
        throw ComputeError(buf);
      }
  }

  Eigen::MatrixXd kept = z.bottomRows(config.length);
  // Stability guard: a column that wandered to large scale is brought
  // back to unit variance so downstream standardization stays sane.
  for (Eigen::Index j = 0; j < n; ++j) {
    double mean = kept.col(j).mean();
    double sd = std::sqrt((kept.col(j).array() - mean).square().mean());
    if (sd > 10.0) kept.col(j) /= sd;
  }

  return MultivariateSeries::make(std::move(kept),
                                  default_names(static_cast<int>(n)), "synthetic");
}

Scores score_decisions(const DecisionMatrix& predicted, const CausalGraph& truth) {
  if (!(predicted.partition == truth.partition))
    throw UsageError("decision matrix and truth graph use different partitions");
  if (truth.direction.empty())
    throw UsageError("truth graph declares no directed group links to score");

  int correct = 0, wrong = 0, none = 0;
  for (auto [i, j] : truth.direction) {
    int a = std::min(i, j), b = std::max(i, j);
    switch (predicted.link(a, b)) {
      case LinkLabel::Forward:
        (i < j ? correct : wrong)++;
        break;
      case LinkLabel::Backward:
        (i > j ? correct : wrong)++;
        break;
      case LinkLabel::Bidirectional:
        // A two-way claim on a one-way truth asserts a spurious reverse
        // link, so it does not count as a correct inference.
        ++wrong;
        break;
      case LinkLabel::None:
        ++none;
        break;
    }
  }
  double m = static_cast<double>(truth.direction.size());
  return Scores{correct / m, wrong / m, none / m};
}

namespace detail {

nlohmann::json graph_json(const CausalGraph& graph) {
  nlohmann::json j;
  j["n_vars"] = graph.n_vars;
  j["groups"] = nlohmann::json::array();
  for (const Group& g : graph.partition.groups)
    j["groups"].push_back({{"name", g.name}, {"vars", g.vars}});
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : graph.edges)
    j["edges"].push_back({{"src", e.src},
                          {"dst", e.dst},
                          {"lag", e.lag},
                          {"f", to_string(e.f)},
                          {"coef", e.coef}});
  j["direction"] = nlohmann::json::array();
  for (auto [a, b] : graph.direction) j["direction"].push_back({a, b});
  return j;
}

}  // namespace detail

std::string graph_to_json(const CausalGraph& graph) {
  return detail::graph_json(graph).dump(2) + "\n";
}

CausalGraph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("graph JSON is not valid JSON: ") + e.what());
  }
  try {
    CausalGraph graph;
    graph.n_vars = j.at("n_vars").get<int>();
    for (const auto& g : j.at("groups")) {
      Group group;
      group.name = g.at("name").get<std::string>();
      group.vars = g.at("vars").get<std::vector<int>>();
      graph.partition.groups.push_back(std::move(group));
    }
    for (const auto& e : j.at("edges")) {
      Edge edge;
      edge.src = e.at("src").get<int>();
      edge.dst = e.at("dst").get<int>();
      edge.lag = e.at("lag").get<int>();
      edge.f = link_kind_from_string(e.at("f").get<std::string>());
      edge.coef = e.at("coef").get<double>();
      graph.edges.push_back(edge);
    }
    for (const auto& d : j.at("direction")) {
      if (!d.is_array() || d.size() != 2)
        throw UsageError("graph direction entries must be [cause, effect] pairs");
      graph.direction.emplace_back(d.at(0).get<int>(), d.at(1).get<int>());
    }
    validate_graph(graph);
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("graph JSON is missing or mistypes a field: ") +
                     e.what());
  }
}

}  // namespace gcause
