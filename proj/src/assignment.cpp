#include "pixeltrack/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pixeltrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment over an n x m matrix with n <= m.
// Returns col index per row. Indices in the internal arrays are 1-based
// with column 0 acting as the virtual start of each augmenting path.
std::vector<int> solve_rows(const std::vector<std::vector<double>>& cost, int n, int m) {
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("solve_assignment: ragged cost matrix");
        for (double c : row)
            if (!std::isfinite(c))
                throw std::invalid_argument("solve_assignment: non-finite cost entry");
    }

    Assignment out;
    out.row_to_col.assign(n, -1);
    out.col_to_row.assign(m, -1);
    if (n == 0 || m == 0) return out;

    if (n <= m) {
        out.row_to_col = solve_rows(cost, n, m);
    } else {
        std::vector<std::vector<double>> t(m, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) t[j][i] = cost[i][j];
        const auto col_to_row = solve_rows(t, m, n);
        for (int j = 0; j < m; ++j)
            if (col_to_row[j] >= 0) out.row_to_col[col_to_row[j]] = j;
    }

    // Canonicalize exact ties toward lowest index pairs: swap (i<i') column
    // assignments whenever the swapped sum is identical and lexicographically
    // smaller. Each swap strictly reduces the assignment sequence.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            if (out.row_to_col[i] < 0) continue;
            for (int k = i + 1; k < n; ++k) {
                if (out.row_to_col[k] < 0) continue;
                const int ji = out.row_to_col[i], jk = out.row_to_col[k];
                if (jk < ji &&
                    cost[i][jk] + cost[k][ji] == cost[i][ji] + cost[k][jk]) {
                    out.row_to_col[i] = jk;
                    out.row_to_col[k] = ji;
                    changed = true;
                }
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        if (out.row_to_col[i] >= 0) {
            out.col_to_row[out.row_to_col[i]] = i;
            out.total_cost += cost[i][out.row_to_col[i]];
        }
    }
    return out;
}

}  // namespace pixeltrack
