#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gcause {

/// Disjoint, covering assignment of the N variables into G >= 2 named
/// groups. Group order is meaningful: group indices in decisions and
/// reports refer to positions in `groups`.
struct GroupPartition {
  struct Group {
    std::string name;
    std::vector<int> vars;  // column indices into the series
  };

  std::vector<Group> groups;

  int n_groups() const { return static_cast<int>(groups.size()); }
  int n_vars() const;

  bool operator==(const GroupPartition& other) const;
};

using Group = GroupPartition::Group;

/// First violated partition invariant, if any.
struct PartitionViolation {
  enum class Kind { TooFewGroups, EmptyGroup, OutOfRange, Overlap, Gap };

  Kind kind;
  int index;  // variable or group index the violation points at
  std::string message;
};

/// Checks disjointness, coverage of 0..n_vars-1, non-empty groups and
/// G >= 2. Violations are return values, not exceptions.
std::optional<PartitionViolation> validate_partition(const GroupPartition& partition,
                                                     int n_vars);

/// validate_partition or throw UsageError with the violation message.
void require_valid_partition(const GroupPartition& partition, int n_vars);

}  // namespace gcause
