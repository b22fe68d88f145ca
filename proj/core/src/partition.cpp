#include "gcause/partition.hpp"

#include <vector>

#include "gcause/errors.hpp"

namespace gcause {

int GroupPartition::n_vars() const {
  int total = 0;
  for (const auto& g : groups) total += static_cast<int>(g.vars.size());
  return total;
}

bool GroupPartition::operator==(const GroupPartition& other) const {
  if (groups.size() != other.groups.size()) return false;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].name != other.groups[i].name) return false;
    if (groups[i].vars != other.groups[i].vars) return false;
  }
  return true;
}

std::optional<PartitionViolation> validate_partition(const GroupPartition& partition,
                                                     int n_vars) {
  using Kind = PartitionViolation::Kind;

  if (partition.n_groups() < 2) {
    return PartitionViolation{Kind::TooFewGroups, partition.n_groups(),
                              "partition needs at least two groups, got " +
                                  std::to_string(partition.n_groups())};
  }
  for (int g = 0; g < partition.n_groups(); ++g) {
    if (partition.groups[g].vars.empty()) {
      return PartitionViolation{Kind::EmptyGroup, g,
                                "group '" + partition.groups[g].name + "' is empty"};
    }
  }

  std::vector<int> owner(static_cast<std::size_t>(n_vars), -1);
  for (int g = 0; g < partition.n_groups(); ++g) {
    for (int v : partition.groups[g].vars) {
      if (v < 0 || v >= n_vars) {
        return PartitionViolation{Kind::OutOfRange, v,
                                  "variable index " + std::to_string(v) +
                                      " outside 0.." + std::to_string(n_vars - 1)};
      }
      if (owner[static_cast<std::size_t>(v)] >= 0) {
        return PartitionViolation{Kind::Overlap, v,
                                  "variable index " + std::to_string(v) +
                                      " assigned to both group '" +
                                      partition.groups[owner[static_cast<std::size_t>(v)]].name +
                                      "' and group '" + partition.groups[g].name + "'"};
      }
      owner[static_cast<std::size_t>(v)] = g;
    }
  }
  for (int v = 0; v < n_vars; ++v) {
    if (owner[static_cast<std::size_t>(v)] < 0) {
      return PartitionViolation{Kind::Gap, v,
                                "variable index " + std::to_string(v) +
                                    " belongs to no group"};
    }
  }
  return std::nullopt;
}

void require_valid_partition(const GroupPartition& partition, int n_vars) {
  if (const auto violation = validate_partition(partition, n_vars)) {
    throw UsageError("invalid partition: " + violation->message);
  }
}

}  // namespace gcause
