#ifndef BRANDTLAB_MATQ_HPP
#define BRANDTLAB_MATQ_HPP

#include <cassert>
#include <vector>

#include "brandtlab/rational.hpp"

namespace brandtlab {

using VecQ = std::vector<Rat>;
using VecZ = std::vector<Int>;

// Dense rational matrix; everything here stays exact.
struct MatQ {
    int rows = 0, cols = 0;
    std::vector<Rat> a;

    MatQ() = default;
    MatQ(int r, int c) : rows(r), cols(c), a(r * c) {}

    Rat& at(int i, int j) { return a[i * cols + j]; }
    const Rat& at(int i, int j) const { return a[i * cols + j]; }

    static MatQ identity(int n) {
        MatQ m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    VecQ row(int i) const { return VecQ(a.begin() + i * cols, a.begin() + (i + 1) * cols); }

    bool operator==(const MatQ& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

MatQ mat_mul(const MatQ& x, const MatQ& y);
VecQ mat_apply(const MatQ& m, const VecQ& v);       // m * v (column convention)
VecQ row_apply(const VecQ& v, const MatQ& m);       // v^T * m
MatQ transpose(const MatQ& m);
Rat dot(const VecQ& x, const VecQ& y);

// Gauss elimination utilities.
int rank(MatQ m);
Rat det(MatQ m);
MatQ inverse(const MatQ& m);                        // throws on singular
std::vector<VecQ> kernel_basis(const MatQ& m);      // right kernel of m
bool solve_left(const MatQ& m, const VecQ& rhs, VecQ& out);  // out^T m = rhs^T

// Monic characteristic polynomial coefficients c_0..c_n of an n x n matrix
// (p(x) = x^n + c_{n-1} x^{n-1} + ... + c_0), fraction-free over the rationals.
VecQ char_poly(const MatQ& m);

// Hermite normal form of an integer matrix (rows are generators): output rows
// span the same Z-module, pivots positive, entries above a pivot reduced to
// [0, pivot), zero rows dropped, pivot columns strictly increasing.
std::vector<VecZ> hnf(std::vector<VecZ> rows);

}  // namespace brandtlab

#endif
