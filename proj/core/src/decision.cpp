#include "gcause/decision.hpp"

#include "gcause/errors.hpp"

namespace gcause {

std::string to_string(LinkLabel label) {
  switch (label) {
    case LinkLabel::Forward: return "->";
    case LinkLabel::Backward: return "<-";
    case LinkLabel::Bidirectional: return "<->";
    case LinkLabel::None: return "none";
  }
  throw ComputeError("unreachable link label");
}

LinkLabel link_label_from_string(const std::string& s) {
  if (s == "->") return LinkLabel::Forward;
  if (s == "<-") return LinkLabel::Backward;
  if (s == "<->") return LinkLabel::Bidirectional;
  if (s == "none") return LinkLabel::None;
  throw UsageError("unknown link label: " + s);
}

const PairDecision& DecisionMatrix::pair(int src_group, int dst_group) const {
  for (const auto& p : pairs) {
    if (p.src_group == src_group && p.dst_group == dst_group) return p;
  }
  throw UsageError("no decision for group pair (" + std::to_string(src_group) + ", " +
                   std::to_string(dst_group) + ")");
}

LinkLabel DecisionMatrix::link(int group_a, int group_b) const {
  for (const auto& l : links) {
    if (l.group_a == group_a && l.group_b == group_b) return l.label;
  }
  throw UsageError("no link entry for groups (" + std::to_string(group_a) + ", " +
                   std::to_string(group_b) + ")");
}

}  // namespace gcause
