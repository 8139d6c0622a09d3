#include <catch2/catch_amalgamated.hpp>

#include "renewalctl/simplex.hpp"

using namespace renewalctl;

TEST_CASE("simplex solves a basic bounded program") {
  // min -x1 - 2 x2  s.t.  x1 + x2 <= 4, x2 <= 2
  std::vector<LpRow> rows = {{{1.0, 1.0}, RowOp::le, 4.0}, {{0.0, 1.0}, RowOp::le, 2.0}};
  const LpResult res = solve_lp(rows, {-1.0, -2.0});
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.objective == Catch::Approx(-6.0));
  CHECK(res.x[0] == Catch::Approx(2.0));
  CHECK(res.x[1] == Catch::Approx(2.0));
}

TEST_CASE("simplex handles equalities and ge rows") {
  // min x1 + x2  s.t.  x1 + x2 = 1, x1 >= 0.25
  std::vector<LpRow> rows = {{{1.0, 1.0}, RowOp::eq, 1.0}, {{1.0, 0.0}, RowOp::ge, 0.25}};
  const LpResult res = solve_lp(rows, {1.0, 1.0});
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.objective == Catch::Approx(1.0));
  CHECK(res.x[0] >= 0.25 - 1e-12);
}

TEST_CASE("simplex accepts negative right-hand sides") {
  // min x  s.t. -x <= -3  (x >= 3)
  std::vector<LpRow> rows = {{{-1.0}, RowOp::le, -3.0}};
  const LpResult res = solve_lp(rows, {1.0});
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.x[0] == Catch::Approx(3.0));
}

TEST_CASE("simplex reports infeasible programs") {
  std::vector<LpRow> rows = {{{1.0}, RowOp::le, 1.0}, {{1.0}, RowOp::ge, 2.0}};
  CHECK(solve_lp(rows, {1.0}).status == LpStatus::infeasible);
}

TEST_CASE("simplex reports unbounded programs") {
  std::vector<LpRow> rows = {{{-1.0, 1.0}, RowOp::le, 1.0}};
  CHECK(solve_lp(rows, {-1.0, 0.0}).status == LpStatus::unbounded);
}

TEST_CASE("simplex survives degenerate vertices") {
  // classic degeneracy: three planes through one vertex
  std::vector<LpRow> rows = {{{1.0, 1.0}, RowOp::le, 1.0},
                             {{1.0, 0.0}, RowOp::le, 1.0},
                             {{0.0, 1.0}, RowOp::le, 1.0},
                             {{1.0, 1.0}, RowOp::ge, 1.0}};
  const LpResult res = solve_lp(rows, {-1.0, -1.0});
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.objective == Catch::Approx(-1.0));
}

TEST_CASE("simplex drops redundant equality rows") {
  // duplicated equality: x1 + x2 = 1 listed twice
  std::vector<LpRow> rows = {{{1.0, 1.0}, RowOp::eq, 1.0}, {{1.0, 1.0}, RowOp::eq, 1.0}};
  const LpResult res = solve_lp(rows, {2.0, 1.0});
  REQUIRE(res.status == LpStatus::optimal);
  CHECK(res.objective == Catch::Approx(1.0));
  CHECK(res.x[1] == Catch::Approx(1.0));
}
