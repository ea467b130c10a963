#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/arch.hpp"
#include "qplane/errors.hpp"

namespace qplane {

/// Data-qubit grid the defect crossbars span: 2MN rows by MN columns.
struct CrossbarGrid {
  int rows = 0;
  int cols = 0;

  static CrossbarGrid for_plane(const ArchParams& p) {
    const int s = 2 * p.modules_per_side * p.cells_per_module_side;
    return CrossbarGrid{s, s / 2};
  }
  void validate() const {
    if (rows < 1 || cols < 1)
      throw ValidationError("crossbar grid must be at least 1x1");
  }
  [[nodiscard]] bool contains(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
};

/// Set of data qubits to deactivate, as (row, col) grid coordinates.
/// Set semantics: sorted, duplicate-free.
struct DefectPattern {
  std::vector<std::pair<int, int>> cells;

  void normalize() {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  }
  void validate(const CrossbarGrid& grid) const {
    for (auto [r, c] : cells)
      if (!grid.contains(r, c))
        throw ValidationError("pattern cell (" + std::to_string(r) + "," +
                              std::to_string(c) + ") outside the grid");
  }
  [[nodiscard]] bool empty() const { return cells.empty(); }
  [[nodiscard]] std::size_t size() const { return cells.size(); }
  friend bool operator==(const DefectPattern&, const DefectPattern&) = default;

  static DefectPattern from_json(const nlohmann::json& j) {
    DefectPattern p;
    for (const auto& e : j) {
      if (!e.is_array() || e.size() != 2)
        throw ConfigError("pattern entries must be [row, col] pairs");
      p.cells.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    p.normalize();
    return p;
  }
  [[nodiscard]] nlohmann::ordered_json to_json() const {
    auto j = nlohmann::ordered_json::array();
    for (auto [r, c] : cells) j.push_back({r, c});
    return j;
  }
};

/// Row and column sets driven on each crossbar. Driving rows R and columns C
/// activates the full product R x C; nothing smaller is addressable.
struct CrossbarAssignment {
  struct Product {
    std::vector<int> rows;
    std::vector<int> cols;
  };
  std::vector<Product> crossbars;

  void validate(const CrossbarGrid& grid) const {
    for (const auto& p : crossbars) {
      for (int r : p.rows)
        if (r < 0 || r >= grid.rows)
          throw ValidationError("crossbar row index outside the grid");
      for (int c : p.cols)
        if (c < 0 || c >= grid.cols)
          throw ValidationError("crossbar column index outside the grid");
    }
  }
  [[nodiscard]] nlohmann::ordered_json to_json() const {
    auto j = nlohmann::ordered_json::array();
    for (const auto& p : crossbars)
      j.push_back({{"rows", p.rows}, {"cols", p.cols}});
    return j;
  }
};

/// Exact activation of an assignment: the union of the per-crossbar
/// Cartesian products.
inline DefectPattern crossbar_activation(const CrossbarAssignment& a,
                                         const CrossbarGrid& grid) {
  grid.validate();
  a.validate(grid);
  DefectPattern p;
  for (const auto& prod : a.crossbars)
    for (int r : prod.rows)
      for (int c : prod.cols) p.cells.push_back({r, c});
  p.normalize();
  return p;
}

/// Knobs for the cover search. The default demands exact realization; the
/// relaxed mode tolerates stray activations anywhere except on a protected
/// set of cells.
struct RealizeOptions {
  bool allow_spillover = false;
  std::vector<std::pair<int, int>> protected_cells;
};

namespace detail {

/// Pattern compressed onto its occupied rows/columns, with column sets as
/// 64-bit masks. Products of a valid assignment can always be shrunk to the
/// pattern's rows and columns (shrinking keeps the pattern covered and never
/// adds activations), so the search works on the compressed matrix.
struct CompressedPattern {
  std::vector<int> row_ids, col_ids;           // compressed -> original
  std::vector<std::uint64_t> row_support;      // required cells per row
  std::vector<std::uint64_t> row_allowed;      // cells a product may touch

  CompressedPattern(const DefectPattern& p, const RealizeOptions& opt) {
    std::set<int> rows, cols;
    for (auto [r, c] : p.cells) {
      rows.insert(r);
      cols.insert(c);
    }
    row_ids.assign(rows.begin(), rows.end());
    col_ids.assign(cols.begin(), cols.end());
    if (col_ids.size() > 64)
      throw SizeError("exact-cover search supports at most 64 distinct "
                      "pattern columns");
    std::map<int, int> rid, cid;
    for (std::size_t i = 0; i < row_ids.size(); ++i) rid[row_ids[i]] = i;
    for (std::size_t i = 0; i < col_ids.size(); ++i) cid[col_ids[i]] = i;
    row_support.assign(row_ids.size(), 0);
    for (auto [r, c] : p.cells)
      row_support[rid[r]] |= std::uint64_t{1} << cid[c];
    if (opt.allow_spillover) {
      std::uint64_t all = 0;
      for (std::size_t i = 0; i < col_ids.size(); ++i)
        all |= std::uint64_t{1} << i;
      row_allowed.assign(row_ids.size(), all);
    } else {
      row_allowed = row_support;
    }
    for (auto [r, c] : opt.protected_cells) {
      const auto ri = rid.find(r);
      const auto ci = cid.find(c);
      if (ri == rid.end() || ci == cid.end()) continue;  // off-pattern axes
      if ((row_support[ri->second] >> ci->second) & 1)
        throw ValidationError("a pattern cell cannot be protected");
      row_allowed[ri->second] &= ~(std::uint64_t{1} << ci->second);
    }
  }
};

struct Rect {
  std::vector<int> rows;    // compressed row indices, sorted
  std::uint64_t cols = 0;   // compressed column mask
  friend bool operator<(const Rect& a, const Rect& b) {
    if (a.rows != b.rows) return a.rows < b.rows;
    return a.cols < b.cols;
  }
  friend bool operator==(const Rect& a, const Rect& b) = default;
};

/// All maximal rectangles (maximal bicliques) over the allowed cells:
/// closures of column-set intersections of allowed row sets. The closure
/// system is small at the supported pattern sizes. In exact mode the allowed
/// cells are the pattern itself.
inline std::vector<Rect> maximal_rectangles(const CompressedPattern& cp) {
  const std::size_t n_rows = cp.row_allowed.size();
  auto rows_of = [&](std::uint64_t cols) {
    std::vector<int> rows;
    for (std::size_t r = 0; r < n_rows; ++r)
      if ((cp.row_allowed[r] & cols) == cols) rows.push_back(static_cast<int>(r));
    return rows;
  };
  std::set<std::uint64_t> seen;
  std::vector<std::uint64_t> queue;
  for (std::size_t r = 0; r < n_rows; ++r)
    if (cp.row_allowed[r] && seen.insert(cp.row_allowed[r]).second)
      queue.push_back(cp.row_allowed[r]);
  // Close under pairwise intersection with allowed row sets.
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::uint64_t cols = queue[q];
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::uint64_t c2 = cols & cp.row_allowed[r];
      if (c2 && seen.insert(c2).second) {
        queue.push_back(c2);
        if (seen.size() > 100000)
          throw SizeError("pattern has too many maximal rectangles");
      }
    }
  }
  std::vector<Rect> rects;
  rects.reserve(seen.size());
  for (std::uint64_t cols : seen) {
    Rect rect;
    rect.rows = rows_of(cols);
    // Re-close the column set over the collected rows.
    std::uint64_t closed = ~std::uint64_t{0};
    for (int r : rect.rows) closed &= cp.row_allowed[r];
    rect.cols = closed;
    rects.push_back(std::move(rect));
  }
  std::sort(rects.begin(), rects.end());
  rects.erase(std::unique(rects.begin(), rects.end()), rects.end());
  return rects;
}

}  // namespace detail

/// Find a cover of the pattern by at most `x` crossbar products. By default
/// the cover is exact: the union of the products equals the pattern, no
/// stray activations — exact biclique cover of the pattern's bipartite
/// adjacency. With RealizeOptions::allow_spillover the union may exceed the
/// pattern anywhere except on the protected cells. The search branches over
/// maximal rectangles through the first uncovered cell in deterministic
/// lexicographic order and returns the first solution found. Exact at v1
/// scale only: patterns up to 64 cells.
inline std::optional<CrossbarAssignment> realizable(
    const DefectPattern& pat, int x, const CrossbarGrid& grid,
    const RealizeOptions& opt = {}) {
  grid.validate();
  pat.validate(grid);
  if (x < 1) throw ValidationError("need at least one crossbar");
  if (pat.size() > 64)
    throw SizeError("exact-cover search supports patterns up to 64 cells");
  CrossbarAssignment out;
  if (pat.empty()) return out;  // nothing to drive

  const detail::CompressedPattern cp(pat, opt);
  const auto rects = detail::maximal_rectangles(cp);

  // Per-cell coverage state: one mask per compressed row.
  std::vector<std::uint64_t> covered(cp.row_support.size(), 0);
  auto first_uncovered = [&]() -> std::pair<int, int> {
    for (std::size_t r = 0; r < covered.size(); ++r) {
      const std::uint64_t rest = cp.row_support[r] & ~covered[r];
      if (rest) {
        int c = 0;
        while (!((rest >> c) & 1)) ++c;
        return {static_cast<int>(r), c};
      }
    }
    return {-1, -1};
  };

  std::vector<const detail::Rect*> chosen;
  auto dfs = [&](auto&& self, int depth) -> bool {
    const auto [r, c] = first_uncovered();
    if (r < 0) return true;
    if (depth == x) return false;
    for (const auto& rect : rects) {
      if (!((rect.cols >> c) & 1)) continue;
      if (!std::binary_search(rect.rows.begin(), rect.rows.end(), r)) continue;
      std::vector<std::uint64_t> saved = covered;
      for (int rr : rect.rows) covered[rr] |= rect.cols;
      chosen.push_back(&rect);
      if (self(self, depth + 1)) return true;
      chosen.pop_back();
      covered = std::move(saved);
    }
    return false;
  };
  if (!dfs(dfs, 0)) return std::nullopt;

  for (const auto* rect : chosen) {
    CrossbarAssignment::Product prod;
    for (int r : rect->rows) prod.rows.push_back(cp.row_ids[r]);
    for (int c = 0; c < 64; ++c)
      if ((rect->cols >> c) & 1) prod.cols.push_back(cp.col_ids[c]);
    out.crossbars.push_back(std::move(prod));
  }
  return out;
}

/// Ground-truth oracle: exhaustive enumeration over all assignments of up to
/// `x` products usable on the pattern. Only for small grids.
inline std::optional<CrossbarAssignment> realizable_oracle(
    const DefectPattern& pat, int x, const CrossbarGrid& grid,
    const RealizeOptions& opt = {}) {
  grid.validate();
  pat.validate(grid);
  if (x < 1) throw ValidationError("need at least one crossbar");
  if (grid.rows > 4 || grid.cols > 4)
    throw SizeError("oracle enumeration is limited to 4x4 grids");
  if (x > 3) throw SizeError("oracle enumeration is limited to x <= 3");

  auto bit = [&](int r, int c) { return r * grid.cols + c; };
  std::uint32_t pat_mask = 0;
  for (auto [r, c] : pat.cells) pat_mask |= 1u << bit(r, c);
  std::uint32_t protected_mask = 0;
  for (auto [r, c] : opt.protected_cells)
    if (grid.contains(r, c)) protected_mask |= 1u << bit(r, c);
  if (protected_mask & pat_mask)
    throw ValidationError("a pattern cell cannot be protected");
  if (pat_mask == 0) return CrossbarAssignment{};
  // forbidden cells: everything off the pattern in exact mode, just the
  // protected set when spillover is allowed
  const std::uint32_t forbidden =
      opt.allow_spillover ? protected_mask : ~pat_mask;

  struct Product {
    std::uint32_t rows, cols, mask;
  };
  std::vector<Product> usable;
  for (std::uint32_t rs = 1; rs < (1u << grid.rows); ++rs)
    for (std::uint32_t cs = 1; cs < (1u << grid.cols); ++cs) {
      std::uint32_t mask = 0;
      for (int r = 0; r < grid.rows; ++r)
        if ((rs >> r) & 1)
          for (int c = 0; c < grid.cols; ++c)
            if ((cs >> c) & 1) mask |= 1u << bit(r, c);
      if ((mask & forbidden) == 0) usable.push_back({rs, cs, mask});
    }

  std::vector<int> pick;
  auto to_assignment = [&](const std::vector<int>& sel) {
    CrossbarAssignment a;
    for (int idx : sel) {
      CrossbarAssignment::Product p;
      for (int r = 0; r < grid.rows; ++r)
        if ((usable[idx].rows >> r) & 1) p.rows.push_back(r);
      for (int c = 0; c < grid.cols; ++c)
        if ((usable[idx].cols >> c) & 1) p.cols.push_back(c);
      a.crossbars.push_back(std::move(p));
    }
    return a;
  };
  // Combinations with repetition, lexicographic; first covering union wins.
  auto dfs = [&](auto&& self, std::size_t start, int depth,
                 std::uint32_t acc) -> bool {
    if ((acc & pat_mask) == pat_mask) return true;
    if (depth == x) return false;
    for (std::size_t i = start; i < usable.size(); ++i) {
      pick.push_back(static_cast<int>(i));
      if (self(self, i, depth + 1, acc | usable[i].mask)) return true;
      pick.pop_back();
    }
    return false;
  };
  if (!dfs(dfs, 0, 0, 0)) return std::nullopt;
  return to_assignment(pick);
}

}  // namespace qplane
