#pragma once

#include <optional>
#include <vector>

#include "qkdv/scalar.hpp"

namespace qkdv {

inline bool lin_is_zero(const Rat& x) { return sgn(x) == 0; }
inline bool lin_is_zero(const GaussRat& x) { return x.is_zero(); }

template <class F>
struct LinSolveResult {
    bool consistent = false;
    int rank = 0;
    std::vector<F> solution;  // free variables set to zero
};

/// Exact Gaussian elimination on the augmented system [A | b].
/// A is row-major with rows.size() rows and `cols` columns.
template <class F>
LinSolveResult<F> solve_linear(std::vector<std::vector<F>> a, std::vector<F> b, int cols) {
    const int rows = static_cast<int>(a.size());
    std::vector<int> pivot_col_of_row;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pr = -1;
        for (int i = r; i < rows; ++i)
            if (!lin_is_zero(a[i][c])) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[pr], a[r]);
        std::swap(b[pr], b[r]);
        F inv = F(Rat(1)) / a[r][c];
        for (int j = c; j < cols; ++j) a[r][j] = a[r][j] * inv;
        b[r] = b[r] * inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || lin_is_zero(a[i][c])) continue;
            F f = a[i][c];
            for (int j = c; j < cols; ++j) a[i][j] = a[i][j] - f * a[r][j];
            b[i] = b[i] - f * b[r];
        }
        pivot_col_of_row.push_back(c);
        ++r;
    }
    LinSolveResult<F> res;
    res.rank = r;
    for (int i = r; i < rows; ++i)
        if (!lin_is_zero(b[i])) return res;  // inconsistent
    res.consistent = true;
    res.solution.assign(cols, F(Rat(0)));
    for (int i = 0; i < r; ++i) res.solution[pivot_col_of_row[i]] = b[i];
    return res;
}

/// Rank of a matrix over the field F.
template <class F>
int matrix_rank(std::vector<std::vector<F>> a) {
    if (a.empty()) return 0;
    const int cols = static_cast<int>(a[0].size());
    std::vector<F> b(a.size(), F(Rat(0)));
    return solve_linear(std::move(a), std::move(b), cols).rank;
}

}  // namespace qkdv
