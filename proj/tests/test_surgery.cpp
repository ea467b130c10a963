#include <doctest.h>

#include <algorithm>
#include <random>

#include "qplane/surgery.hpp"

using namespace qplane;

namespace {
DefectPattern pattern(std::initializer_list<std::pair<int, int>> cells) {
  DefectPattern p;
  p.cells.assign(cells.begin(), cells.end());
  p.normalize();
  return p;
}
}  // namespace

TEST_CASE("activation is the union of the crossbar products") {
  const CrossbarGrid grid{4, 4};
  CHECK(crossbar_activation(CrossbarAssignment{}, grid).empty());

  CrossbarAssignment singleton;
  singleton.crossbars.push_back({{3}, {2}});
  CHECK(crossbar_activation(singleton, grid) == pattern({{3, 2}}));

  CrossbarAssignment square;
  square.crossbars.push_back({{0, 1}, {0, 1}});
  CHECK(crossbar_activation(square, grid) ==
        pattern({{0, 0}, {0, 1}, {1, 0}, {1, 1}}));

  CrossbarAssignment merged;  // overlapping products union without duplicates
  merged.crossbars.push_back({{0}, {0, 1}});
  merged.crossbars.push_back({{0, 1}, {1}});
  CHECK(crossbar_activation(merged, grid) ==
        pattern({{0, 0}, {0, 1}, {1, 1}}));

  CrossbarAssignment oob;
  oob.crossbars.push_back({{7}, {0}});
  CHECK_THROWS_AS((void)crossbar_activation(oob, grid), ValidationError);
}

TEST_CASE("single cells and diagonals") {
  const CrossbarGrid grid{2, 2};
  const auto one = realizable(pattern({{0, 0}}), 1, grid);
  REQUIRE(one.has_value());
  CHECK(crossbar_activation(*one, grid) == pattern({{0, 0}}));

  // two diagonal cells cannot come from one product: it would activate the
  // off-diagonal corners too
  CHECK(!realizable(pattern({{0, 0}, {1, 1}}), 1, grid).has_value());
  CHECK(!realizable_oracle(pattern({{0, 0}, {1, 1}}), 1, grid).has_value());

  const auto two = realizable(pattern({{0, 0}, {1, 1}}), 2, grid);
  REQUIRE(two.has_value());
  CHECK(crossbar_activation(*two, grid) == pattern({{0, 0}, {1, 1}}));
}

TEST_CASE("full grid needs a single crossbar") {
  const CrossbarGrid grid{3, 3};
  DefectPattern full;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) full.cells.push_back({r, c});
  full.normalize();
  const auto a = realizable(full, 1, grid);
  REQUIRE(a.has_value());
  CHECK(a->crossbars.size() == 1);
  CHECK(a->crossbars[0].rows == std::vector<int>{0, 1, 2});
  CHECK(a->crossbars[0].cols == std::vector<int>{0, 1, 2});
  CHECK(realizable_oracle(full, 1, grid).has_value());
}

TEST_CASE("the 3x3 diagonal defeats two crossbars") {
  const CrossbarGrid grid{3, 3};
  const auto diag = pattern({{0, 0}, {1, 1}, {2, 2}});
  CHECK(!realizable_oracle(diag, 2, grid).has_value());
  CHECK(!realizable(diag, 2, grid).has_value());
  const auto three = realizable(diag, 3, grid);
  REQUIRE(three.has_value());
  CHECK(crossbar_activation(*three, grid) == diag);
}

TEST_CASE("search agrees with the exhaustive oracle on all small patterns") {
  const CrossbarGrid grid{3, 3};
  // every pattern of at most 4 cells on a 3x3 grid
  for (std::uint32_t mask = 0; mask < (1u << 9); ++mask) {
    if (__builtin_popcount(mask) > 4) continue;
    DefectPattern p;
    for (int b = 0; b < 9; ++b)
      if ((mask >> b) & 1) p.cells.push_back({b / 3, b % 3});
    p.normalize();
    for (int x : {1, 2}) {
      const auto fast = realizable(p, x, grid);
      const auto truth = realizable_oracle(p, x, grid);
      CHECK(fast.has_value() == truth.has_value());
      if (fast) CHECK(crossbar_activation(*fast, grid) == p);
      if (truth) CHECK(crossbar_activation(*truth, grid) == p);
    }
  }
}

TEST_CASE("any pattern of k <= x cells is realizable with singletons") {
  std::mt19937 rng(7);
  const CrossbarGrid grid{6, 5};
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 3);
    DefectPattern p;
    while (static_cast<int>(p.cells.size()) < k) {
      p.cells.push_back({static_cast<int>(rng() % 6),
                         static_cast<int>(rng() % 5)});
      p.normalize();
    }
    const auto a = realizable(p, k, grid);
    REQUIRE(a.has_value());
    CHECK(crossbar_activation(*a, grid) == p);
  }
}

TEST_CASE("feasibility is monotone in the crossbar budget") {
  std::mt19937 rng(11);
  const CrossbarGrid grid{4, 4};
  for (int trial = 0; trial < 300; ++trial) {
    DefectPattern p;
    const int k = static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i)
      p.cells.push_back({static_cast<int>(rng() % 4),
                         static_cast<int>(rng() % 4)});
    p.normalize();
    bool prev = false;
    for (int x = 1; x <= 3; ++x) {
      const bool now = realizable(p, x, grid).has_value();
      if (prev) CHECK(now);
      prev = now;
    }
  }
}

TEST_CASE("deterministic first solution") {
  const CrossbarGrid grid{3, 3};
  const auto p = pattern({{0, 0}, {0, 2}, {2, 0}, {2, 2}});
  const auto a = realizable(p, 2, grid);
  const auto b = realizable(p, 2, grid);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->to_json().dump() == b->to_json().dump());
  // the four corners are one product: rows {0,2} x cols {0,2}
  CHECK(a->crossbars.size() == 1);
}

TEST_CASE("relaxed mode tolerates spillover away from protected cells") {
  const CrossbarGrid grid{2, 2};
  const auto diag = pattern({{0, 0}, {1, 1}});
  RealizeOptions relaxed;
  relaxed.allow_spillover = true;

  // exact cover needs two crossbars, spillover makes one enough
  CHECK(!realizable(diag, 1, grid).has_value());
  const auto loose = realizable(diag, 1, grid, relaxed);
  REQUIRE(loose.has_value());
  const auto act = crossbar_activation(*loose, grid);
  for (auto cell : diag.cells)
    CHECK(std::find(act.cells.begin(), act.cells.end(), cell) !=
          act.cells.end());

  // protecting one off-diagonal corner forbids the full product again
  RealizeOptions guarded = relaxed;
  guarded.protected_cells = {{0, 1}};
  CHECK(!realizable(diag, 1, grid, guarded).has_value());
  const auto two = realizable(diag, 2, grid, guarded);
  REQUIRE(two.has_value());
  const auto act2 = crossbar_activation(*two, grid);
  CHECK(std::find(act2.cells.begin(), act2.cells.end(),
                  std::pair{0, 1}) == act2.cells.end());

  // a pattern cell cannot be protected
  RealizeOptions bad = relaxed;
  bad.protected_cells = {{0, 0}};
  CHECK_THROWS_AS((void)realizable(diag, 1, grid, bad), ValidationError);
  CHECK_THROWS_AS((void)realizable_oracle(diag, 1, grid, bad),
                  ValidationError);
}

TEST_CASE("relaxed search agrees with the oracle under random protections") {
  std::mt19937 rng(23);
  const CrossbarGrid grid{3, 3};
  for (int trial = 0; trial < 400; ++trial) {
    DefectPattern p;
    const int k = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < k; ++i)
      p.cells.push_back({static_cast<int>(rng() % 3),
                         static_cast<int>(rng() % 3)});
    p.normalize();
    RealizeOptions opt;
    opt.allow_spillover = true;
    for (int i = 0; i < 2; ++i) {
      const std::pair<int, int> cell{static_cast<int>(rng() % 3),
                                     static_cast<int>(rng() % 3)};
      if (std::find(p.cells.begin(), p.cells.end(), cell) == p.cells.end())
        opt.protected_cells.push_back(cell);
    }
    for (int x : {1, 2}) {
      const auto fast = realizable(p, x, grid, opt);
      const auto truth = realizable_oracle(p, x, grid, opt);
      CHECK(fast.has_value() == truth.has_value());
      if (fast) {
        const auto act = crossbar_activation(*fast, grid);
        for (auto cell : p.cells)
          CHECK(std::find(act.cells.begin(), act.cells.end(), cell) !=
                act.cells.end());
        for (auto cell : opt.protected_cells)
          CHECK(std::find(act.cells.begin(), act.cells.end(), cell) ==
                act.cells.end());
      }
    }
  }
}

TEST_CASE("grid and size guards") {
  const CrossbarGrid grid{4, 4};
  CHECK_THROWS_AS((void)realizable(pattern({{9, 0}}), 1, grid),
                  ValidationError);
  CHECK_THROWS_AS((void)realizable(pattern({{0, 0}}), 0, grid),
                  ValidationError);
  CHECK_THROWS_AS(
      (void)realizable_oracle(pattern({{0, 0}}), 1, CrossbarGrid{5, 4}),
      SizeError);
  CHECK_THROWS_AS((void)realizable_oracle(pattern({{0, 0}}), 4, grid),
                  SizeError);

  DefectPattern big;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 8; ++c) big.cells.push_back({r, c});
  big.normalize();
  CHECK_THROWS_AS((void)realizable(big, 2, CrossbarGrid{16, 8}), SizeError);
}

TEST_CASE("pattern json round trip") {
  const auto p = pattern({{2, 1}, {0, 3}});
  const auto parsed = DefectPattern::from_json(
      nlohmann::json::parse(p.to_json().dump()));
  CHECK(parsed == p);
  CHECK_THROWS_AS((void)DefectPattern::from_json(nlohmann::json::parse(
                      "[[1, 2, 3]]")),
                  ConfigError);
}

TEST_CASE("crossbar grid follows the plane dimensions") {
  ArchParams p;
  p.modules_per_side = 2;
  p.cells_per_module_side = 3;
  const auto grid = CrossbarGrid::for_plane(p);
  CHECK(grid.rows == 12);  // 2MN
  CHECK(grid.cols == 6);   // MN
}
