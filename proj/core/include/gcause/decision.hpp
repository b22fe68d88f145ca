#pragma once

#include <string>
#include <vector>

#include "gcause/partition.hpp"
#include "gcause/stats.hpp"

namespace gcause {

/// Combined link label for an unordered group pair {a, b} with a < b.
enum class LinkLabel { Forward, Backward, Bidirectional, None };

std::string to_string(LinkLabel label);
LinkLabel link_label_from_string(const std::string& s);

/// Directed test i -> j: one KS result per node of the target group,
/// multiplicity-adjusted p-values, and the causes/not-causes verdict.
struct PairDecision {
  int src_group;
  int dst_group;
  std::vector<int> target_nodes;     // variable indices of the target group
  std::vector<KSResult> node_tests;  // one per target node
  std::vector<double> adjusted_p;    // Holm-adjusted (or raw in any-raw mode)
  bool causes;
};

struct PairLink {
  int group_a;  // a < b
  int group_b;
  LinkLabel label;
};

/// All directed verdicts plus the combined per-unordered-pair labels.
struct DecisionMatrix {
  GroupPartition partition;
  double alpha;
  std::vector<PairDecision> pairs;  // every ordered pair (i, j), i != j
  std::vector<PairLink> links;      // every unordered pair, a < b

  const PairDecision& pair(int src_group, int dst_group) const;
  LinkLabel link(int group_a, int group_b) const;
};

}  // namespace gcause
