#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "gcause/errors.hpp"
#include "gcause/rng.hpp"
#include "gcause/synth.hpp"

using namespace gcause;

namespace {

GroupPartition two_by_two() {
  return GroupPartition{{{"G1", {0, 1}}, {"G2", {2, 3}}}};
}

bool same_edges(const CausalGraph& a, const CausalGraph& b) {
  if (a.edges.size() != b.edges.size()) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& x = a.edges[i];
    const Edge& y = b.edges[i];
    if (x.src != y.src || x.dst != y.dst || x.lag != y.lag || x.f != y.f ||
        x.coef != y.coef)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("link kinds evaluate and round-trip") {
  CHECK(apply_link(LinkKind::Linear, 0.5, 2.0) == 1.0);
  CHECK(apply_link(LinkKind::Polynomial, 0.5, 2.0) == 2.0);
  CHECK(apply_link(LinkKind::Polynomial, 0.5, -5.0) == 4.5);  // clamped at -3
  CHECK(apply_link(LinkKind::Exponential, 1.0, 0.0) == 1.0);
  CHECK(apply_link(LinkKind::Exponential, 1.0, 10.0) ==
        doctest::Approx(std::exp(3.0)));  // clamped at 3

  for (auto k : {LinkKind::Linear, LinkKind::Polynomial, LinkKind::Exponential})
    CHECK(link_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(link_kind_from_string("quadratic"), UsageError);
}

TEST_CASE("graph sampling is deterministic in the seed") {
  auto p = two_by_two();
  auto g1 = sample_graph(p, 0.5, {0, 1}, 2, 99);
  auto g2 = sample_graph(p, 0.5, {0, 1}, 2, 99);
  auto g3 = sample_graph(p, 0.5, {0, 1}, 2, 100);
  CHECK(same_edges(g1, g2));
  CHECK(!same_edges(g1, g3));
  REQUIRE(g1.direction.size() == 1);
  CHECK(g1.direction[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("graph sampling saturates at density one") {
  auto g = sample_graph(two_by_two(), 1.0, {0, 1}, 2, 5);
  // 2x2 cross pairs + 4 intra pairs per group (self-lags included).
  CHECK(g.edges.size() == 4 + 4 + 4);
  for (const Edge& e : g.edges) {
    CHECK(e.lag >= 1);
    CHECK(e.lag <= 2);
    CHECK(std::abs(e.coef) >= 0.2);
    CHECK(std::abs(e.coef) <= 0.8);
  }
}

TEST_CASE("at least one cross edge survives a near-zero density") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = sample_graph(two_by_two(), 1e-12, {1, 0}, 2, seed);
    int cross = 0;
    for (const Edge& e : g.edges) {
      bool src_in_cause = e.src == 2 || e.src == 3;
      bool dst_in_effect = e.dst == 0 || e.dst == 1;
      bool src_in_effect = e.src == 0 || e.src == 1;
      bool dst_in_cause = e.dst == 2 || e.dst == 3;
      if (src_in_cause && dst_in_effect) ++cross;
      // The reverse orientation must never be drawn.
      CHECK(!(src_in_effect && dst_in_cause));
    }
    CHECK(cross == 1);
  }
}

TEST_CASE("no edge ever points against the declared direction") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = sample_graph(two_by_two(), 0.7, {0, 1}, 3, seed);
    for (const Edge& e : g.edges) {
      bool src_in_effect = e.src == 2 || e.src == 3;
      bool dst_in_cause = e.dst == 0 || e.dst == 1;
      CHECK(!(src_in_effect && dst_in_cause));
    }
  }
}

TEST_CASE("simulation reproduces an independently replayed trajectory") {
  CausalGraph g;
  g.n_vars = 3;
  g.partition = GroupPartition{{{"A", {0, 1}}, {"B", {2}}}};
  g.edges = {{0, 2, 1, LinkKind::Linear, 0.6},
             {1, 2, 2, LinkKind::Polynomial, -0.4},
             {0, 0, 1, LinkKind::Linear, 0.5},
             {1, 1, 2, LinkKind::Exponential, 0.3}};
  g.direction = {{0, 1}};

  SimConfig cfg;
  cfg.length = 50;
  cfg.burn_in = 10;
  cfg.noise_std = 0.2;
  cfg.max_lag = 2;
  cfg.seed = 31;

  auto series = simulate(g, cfg);
  REQUIRE(series.length() == 50);
  REQUIRE(series.n_vars() == 3);

  // Replay: the noise block is drawn first, row-major, from the "simu"
  // sub-stream; rows before the largest lag are pure noise; burn-in rows
  // are dropped afterwards.
  const Eigen::Index total = cfg.burn_in + cfg.length;
  Rng rng(mix_seed(cfg.seed, 0x73696d75));
  std::vector<std::vector<double>> noise(static_cast<std::size_t>(total),
                                         std::vector<double>(3));
  for (auto& row : noise)
    for (auto& x : row) x = cfg.noise_std * rng.normal();

  std::vector<std::vector<double>> z = noise;
  const int lag = g.max_lag();
  for (Eigen::Index t = 0; t < total; ++t) {
    if (t < lag) continue;
    for (const Edge& e : g.edges)
      z[static_cast<std::size_t>(t)][static_cast<std::size_t>(e.dst)] +=
          apply_link(e.f, e.coef,
                     z[static_cast<std::size_t>(t - e.lag)][static_cast<std::size_t>(e.src)]);
  }
  // This trajectory stays small, so the scale guard must not have fired.
  for (Eigen::Index t = 0; t < 50; ++t)
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK(series.values(t, j) ==
            z[static_cast<std::size_t>(cfg.burn_in + t)][static_cast<std::size_t>(j)]);
}

TEST_CASE("simulation rescales a column that wanders to large scale") {
  CausalGraph g;
  g.n_vars = 2;
  g.partition = GroupPartition{{{"A", {0}}, {"B", {1}}}};
  // Near-unit-root AR(1) with loud noise: stationary std ~ 35 >> 10.
  g.edges = {{0, 0, 1, LinkKind::Linear, 0.99}};
  g.direction = {{0, 1}};

  SimConfig cfg;
  cfg.length = 2000;
  cfg.burn_in = 200;
  cfg.noise_std = 5.0;
  cfg.seed = 8;

  auto series = simulate(g, cfg);
  double mean = series.values.col(0).mean();
  double sd = std::sqrt((series.values.col(0).array() - mean).square().mean());
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));  // divided by its own std

  // The quiet column keeps its natural scale.
  double sd1 = std::sqrt(
      (series.values.col(1).array() - series.values.col(1).mean()).square().mean());
  CHECK(sd1 == doctest::Approx(5.0).epsilon(0.15));
}

TEST_CASE("simulation divergence raises a compute error naming the step") {
  CausalGraph g;
  g.n_vars = 2;
  g.partition = GroupPartition{{{"A", {0}}, {"B", {1}}}};
  g.edges = {{0, 0, 1, LinkKind::Linear, 5.0}};  // explosive
  g.direction = {{0, 1}};

  SimConfig cfg;
  cfg.length = 1000;
  cfg.burn_in = 100;
  cfg.seed = 3;

  try {
    (void)simulate(g, cfg);
    FAIL("expected ComputeError");
  } catch (const ComputeError& e) {
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    CHECK(std::string(e.what()).find("Z1") != std::string::npos);
  }
}

TEST_CASE("sim config invariants") {
  SimConfig cfg;
  cfg.burn_in = 1;
  cfg.max_lag = 2;
  CHECK_THROWS_AS(cfg.validate(), UsageError);  // burn-in shorter than lag
  cfg.burn_in = 100;
  cfg.max_lag = 2;
  cfg.density = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.density = 1.5;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.density = 0.5;
  cfg.noise_std = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("scoring maps link labels onto the truth direction") {
  GroupPartition p = two_by_two();
  CausalGraph truth;
  truth.n_vars = 4;
  truth.partition = p;
  truth.direction = {{0, 1}};

  auto matrix_with = [&](LinkLabel label) {
    DecisionMatrix m;
    m.partition = p;
    m.alpha = 0.05;
    m.links = {{0, 1, label}};
    return m;
  };

  auto sc = score_decisions(matrix_with(LinkLabel::Forward), truth);
  CHECK(sc.correct == 1.0);
  sc = score_decisions(matrix_with(LinkLabel::Backward), truth);
  CHECK(sc.wrong == 1.0);
  sc = score_decisions(matrix_with(LinkLabel::Bidirectional), truth);
  CHECK(sc.wrong == 1.0);  // a two-way claim asserts a spurious reverse link
  sc = score_decisions(matrix_with(LinkLabel::None), truth);
  CHECK(sc.no_inference == 1.0);

  // Reversed truth flips forward/backward.
  truth.direction = {{1, 0}};
  sc = score_decisions(matrix_with(LinkLabel::Forward), truth);
  CHECK(sc.wrong == 1.0);
  sc = score_decisions(matrix_with(LinkLabel::Backward), truth);
  CHECK(sc.correct == 1.0);

  truth.direction = {};
  CHECK_THROWS_AS(score_decisions(matrix_with(LinkLabel::None), truth), UsageError);

  truth.direction = {{0, 1}};
  DecisionMatrix other = matrix_with(LinkLabel::None);
  other.partition.groups[0].name = "different";
  CHECK_THROWS_AS(score_decisions(other, truth), UsageError);
}

TEST_CASE("graph json round-trips") {
  auto g = sample_graph(two_by_two(), 0.6, {0, 1}, 2, 17);
  auto back = graph_from_json(graph_to_json(g));
  CHECK(back.n_vars == g.n_vars);
  CHECK(back.partition == g.partition);
  CHECK(back.direction == g.direction);
  CHECK(same_edges(back, g));

  CHECK_THROWS_AS(graph_from_json("not json"), UsageError);
  CHECK_THROWS_AS(graph_from_json("{\"n_vars\": 2}"), UsageError);
}
