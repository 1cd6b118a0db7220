#include "brandtlab/matq.hpp"

#include <algorithm>

namespace brandtlab {

MatQ mat_mul(const MatQ& x, const MatQ& y) {
    assert(x.cols == y.rows);
    MatQ r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Rat& xv = x.at(i, k);
            if (xv == 0) continue;
            for (int j = 0; j < y.cols; ++j) r.at(i, j) += xv * y.at(k, j);
        }
    return r;
}

VecQ mat_apply(const MatQ& m, const VecQ& v) {
    assert((int)v.size() == m.cols);
    VecQ r(m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r[i] += m.at(i, j) * v[j];
    return r;
}

VecQ row_apply(const VecQ& v, const MatQ& m) {
    assert((int)v.size() == m.rows);
    VecQ r(m.cols);
    for (int i = 0; i < m.rows; ++i) {
        if (v[i] == 0) continue;
        for (int j = 0; j < m.cols; ++j) r[j] += v[i] * m.at(i, j);
    }
    return r;
}

MatQ transpose(const MatQ& m) {
    MatQ r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
    return r;
}

Rat dot(const VecQ& x, const VecQ& y) {
    assert(x.size() == y.size());
    Rat s;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

namespace {

// Row echelon in place; returns pivot columns.
std::vector<int> echelon(MatQ& m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int sel = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.at(i, c) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        for (int j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(sel, j));
        Rat inv = 1 / m.at(r, c);
        for (int j = c; j < m.cols; ++j) m.at(r, j) *= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            Rat f = m.at(i, c);
            for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

int rank(MatQ m) { return (int)echelon(m).size(); }

Rat det(MatQ m) {
    assert(m.rows == m.cols);
    Rat d = 1;
    int n = m.rows;
    for (int c = 0; c < n; ++c) {
        int sel = -1;
        for (int i = c; i < n; ++i)
            if (m.at(i, c) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) return 0;
        if (sel != c) {
            for (int j = 0; j < n; ++j) std::swap(m.at(c, j), m.at(sel, j));
            d = -d;
        }
        d *= m.at(c, c);
        Rat inv = 1 / m.at(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (m.at(i, c) == 0) continue;
            Rat f = m.at(i, c) * inv;
            for (int j = c; j < n; ++j) m.at(i, j) -= f * m.at(c, j);
        }
    }
    return d;
}

MatQ inverse(const MatQ& m) {
    assert(m.rows == m.cols);
    int n = m.rows;
    MatQ aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = 1;
    }
    auto pivots = echelon(aug);
    if ((int)pivots.size() < n || pivots[n - 1] >= n)
        throw Error("Singular", "matrix not invertible");
    MatQ r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = aug.at(i, n + j);
    return r;
}

std::vector<VecQ> kernel_basis(const MatQ& m) {
    MatQ e = m;
    auto pivots = echelon(e);
    std::vector<bool> is_pivot(m.cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<VecQ> basis;
    for (int c = 0; c < m.cols; ++c) {
        if (is_pivot[c]) continue;
        VecQ v(m.cols);
        v[c] = 1;
        for (size_t r = 0; r < pivots.size(); ++r)
            if (pivots[r] < c) v[pivots[r]] = -e.at((int)r, c);
        basis.push_back(v);
    }
    return basis;
}

bool solve_left(const MatQ& m, const VecQ& rhs, VecQ& out) {
    // x^T m = rhs^T  <=>  m^T x = rhs
    MatQ t = transpose(m);
    assert((int)rhs.size() == t.rows);
    MatQ aug(t.rows, t.cols + 1);
    for (int i = 0; i < t.rows; ++i) {
        for (int j = 0; j < t.cols; ++j) aug.at(i, j) = t.at(i, j);
        aug.at(i, t.cols) = rhs[i];
    }
    auto pivots = echelon(aug);
    for (int c : pivots)
        if (c == t.cols) return false;  // inconsistent
    VecQ x(t.cols);
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at((int)r, t.cols);
    // verify (free variables set to 0)
    VecQ check = row_apply(x, m);
    if (check != rhs) return false;
    out = x;
    return true;
}

VecQ char_poly(const MatQ& m) {
    // Faddeev–LeVerrier
    assert(m.rows == m.cols);
    int n = m.rows;
    MatQ mk = MatQ::identity(n);
    VecQ c(n + 1);
    c[n] = 1;
    MatQ acc = m;
    for (int k = 1; k <= n; ++k) {
        if (k > 1) acc = mat_mul(m, mk);
        Rat tr;
        for (int i = 0; i < n; ++i) tr += acc.at(i, i);
        c[n - k] = -tr / k;
        mk = acc;
        for (int i = 0; i < n; ++i) mk.at(i, i) += c[n - k];
    }
    return c;
}

std::vector<VecZ> hnf(std::vector<VecZ> rows) {
    if (rows.empty()) return rows;
    size_t cols = rows[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows.size(); ++c) {
        // reduce column c below row r with a euclidean loop
        while (true) {
            size_t sel = rows.size();
            for (size_t i = r; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (sel == rows.size() || abs(rows[i][c]) < abs(rows[sel][c])))
                    sel = i;
            if (sel == rows.size()) break;  // column all zero below
            std::swap(rows[r], rows[sel]);
            bool clean = true;
            for (size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
                for (size_t j = 0; j < cols; ++j) rows[i][j] -= q * rows[r][j];
                if (rows[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (rows[r][c] == 0) continue;
        if (rows[r][c] < 0)
            for (size_t j = 0; j < cols; ++j) rows[r][j] = -rows[r][j];
        // reduce entries above the pivot into [0, pivot)
        for (size_t i = 0; i < r; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
            if (q != 0)
                for (size_t j = 0; j < cols; ++j) rows[i][j] -= q * rows[r][j];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

}  // namespace brandtlab
