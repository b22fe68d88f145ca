#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "gcause/csv.hpp"
#include "gcause/errors.hpp"
#include "gcause/partition.hpp"
#include "gcause/series.hpp"
#include "gcause/standardize.hpp"
#include "gcause/window.hpp"

using namespace gcause;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Substring-matching variant of CHECK_THROWS for error-location checks.
template <typename Fn>
std::string usage_error_message(Fn&& fn) {
  try {
    fn();
  } catch (const UsageError& e) {
    return e.what();
  }
  FAIL("expected UsageError");
  return {};
}

}  // namespace

TEST_CASE("series construction enforces the type invariants") {
  Eigen::MatrixXd m(3, 2);
  m << 1, 2, 3, 4, 5, 6;
  auto s = MultivariateSeries::make(m, {"a", "b"});
  CHECK(s.length() == 3);
  CHECK(s.n_vars() == 2);
  CHECK(s.index_of("b") == 1);
  CHECK_THROWS_AS((void)s.index_of("c"), UsageError);

  CHECK_THROWS_AS(MultivariateSeries::make(m, {"a"}), UsageError);
  CHECK_THROWS_AS(MultivariateSeries::make(m, {"a", "a"}), UsageError);

  Eigen::MatrixXd bad = m;
  bad(1, 0) = std::nan("");
  CHECK_THROWS_AS(MultivariateSeries::make(bad, {"a", "b"}), UsageError);

  Eigen::MatrixXd narrow(3, 1);
  narrow << 1, 2, 3;
  CHECK_THROWS_AS(MultivariateSeries::make(narrow, {"a"}), UsageError);

  Eigen::MatrixXd empty(0, 2);
  CHECK_THROWS_AS(MultivariateSeries::make(empty, {"a", "b"}), UsageError);
}

TEST_CASE("default names run Z1..ZN") {
  auto names = default_names(3);
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "Z1");
  CHECK(names[2] == "Z3");
}

TEST_CASE("csv save/load round-trips bit-exactly") {
  Eigen::MatrixXd m(2, 2);
  m << 0.1, -1.0 / 3.0, 1e-17, 12345.678901234567;
  auto s = MultivariateSeries::make(m, {"x", "y"});
  auto p = temp_file("gcause_csv_rt.csv");
  save_csv(s, p.string());

  auto back = load_csv(p.string(), true);
  CHECK(back.names == s.names);
  REQUIRE(back.values.rows() == 2);
  CHECK((back.values.array() == s.values.array()).all());
}

TEST_CASE("headerless csv gets default names") {
  auto p = temp_file("gcause_csv_nh.csv");
  write_text(p, "1,2\n3,4\n");
  auto s = load_csv(p.string(), false);
  CHECK(s.names == default_names(2));
  CHECK(s.values(1, 1) == 4.0);
}

TEST_CASE("csv errors carry the offending location") {
  auto p = temp_file("gcause_csv_bad.csv");

  write_text(p, "a,b\n1,2\n3\n");
  auto msg = usage_error_message([&] { (void)load_csv(p.string(), true); });
  CHECK(msg.find("3") != std::string::npos);  // the short row is line 3

  write_text(p, "a,b\n1,zap\n");
  CHECK_THROWS_AS((void)load_csv(p.string(), true), UsageError);

  write_text(p, "");
  CHECK_THROWS_AS((void)load_csv(p.string(), true), UsageError);

  CHECK_THROWS_AS((void)load_csv("/nonexistent/not-here.csv", true), UsageError);
}

TEST_CASE("standardize centers and scales on the fit range only") {
  Eigen::MatrixXd m(4, 2);
  m << 0, 10, 2, 10, 4, 30, 6, 30;
  auto s = MultivariateSeries::make(m, {"a", "b"});

  // Fit on the first two rows: mean (1, 10), population std (1, 0) -- the
  // constant second column must be rejected.
  CHECK_THROWS_AS(standardize(s, IndexRange{0, 2}), UsageError);

  auto [z, st] = standardize(s, IndexRange{0, 4});
  CHECK(st.mean(0) == doctest::Approx(3.0));
  CHECK(st.mean(1) == doctest::Approx(20.0));
  // population std over {0,2,4,6} is sqrt(5)
  CHECK(st.stddev(0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(z.values.col(0).mean() == doctest::Approx(0.0));
  CHECK(z.values.col(1).maxCoeff() == doctest::Approx(1.0));

  // inverse(transform(x)) == x
  Eigen::MatrixXd back = st.inverse(st.transform(m));
  CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("window enumeration matches the count formula") {
  auto ws = make_windows(100, 24, 8, 8);
  CHECK(ws.count() == 9);
  CHECK(ws.windows.front().context_begin == 0);
  CHECK(ws.windows.front().forecast_start == 24);
  CHECK(ws.windows.front().target_end == 32);
  CHECK(ws.windows.back().target_end == 96);  // 104 would overrun, dropped

  auto tight = make_windows(32, 24, 8, 8);
  CHECK(tight.count() == 1);

  CHECK_THROWS_AS(make_windows(31, 24, 8, 8), UsageError);
  CHECK_THROWS_AS(make_windows(100, 0, 8, 8), UsageError);
  CHECK_THROWS_AS(make_windows(100, 24, 0, 8), UsageError);
  CHECK_THROWS_AS(make_windows(100, 24, 8, 0), UsageError);
}

TEST_CASE("partition validation reports the first violation") {
  GroupPartition p{{{"A", {0, 1}}, {"B", {2}}}};
  CHECK(!validate_partition(p, 3).has_value());
  CHECK(p.n_vars() == 3);

  auto gap = validate_partition(p, 4);
  REQUIRE(gap.has_value());
  CHECK(gap->kind == PartitionViolation::Kind::Gap);
  CHECK(gap->index == 3);

  GroupPartition overlap{{{"A", {0, 1}}, {"B", {1}}}};
  auto v = validate_partition(overlap, 2);
  REQUIRE(v.has_value());
  CHECK(v->kind == PartitionViolation::Kind::Overlap);

  GroupPartition single{{{"A", {0, 1}}}};
  CHECK(validate_partition(single, 2)->kind == PartitionViolation::Kind::TooFewGroups);

  GroupPartition empty_grp{{{"A", {0}}, {"B", {}}}};
  CHECK(validate_partition(empty_grp, 1)->kind == PartitionViolation::Kind::EmptyGroup);

  GroupPartition oob{{{"A", {0}}, {"B", {7}}}};
  CHECK(validate_partition(oob, 2)->kind == PartitionViolation::Kind::OutOfRange);

  CHECK_THROWS_AS(require_valid_partition(oob, 2), UsageError);
}
