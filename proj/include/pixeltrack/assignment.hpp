#pragma once

#include <vector>

namespace pixeltrack {

/// Minimum-cost bipartite assignment of the smaller side of a rectangular
/// cost matrix into the larger side.
struct Assignment {
    std::vector<int> row_to_col;  // -1 where the row is unassigned
    std::vector<int> col_to_row;  // -1 where the column is unassigned
    double total_cost = 0.0;
};

/// Exact O(n^2 m) shortest-augmenting-path solve (potentials form of the
/// Hungarian algorithm). Every entry must be finite. Among equal-cost
/// optima, pairs are canonicalized toward lowest indices so the result is
/// deterministic.
Assignment solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace pixeltrack
