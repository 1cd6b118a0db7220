#include "brandtlab/lattice.hpp"

namespace brandtlab {

Lattice canonical_lattice(const std::vector<VecQ>& generators) {
    if (generators.empty()) throw Error("EmptyInput", "no lattice generators");
    size_t cols = generators[0].size();
    Int lcm_den = 1;
    for (auto& g : generators)
        for (auto& q : g) lcm_den = lcm(lcm_den, den(q));
    std::vector<VecZ> rows;
    for (auto& g : generators) {
        VecZ r(cols);
        bool nonzero = false;
        for (size_t j = 0; j < cols; ++j) {
            r[j] = num(g[j]) * (lcm_den / den(g[j]));
            if (r[j] != 0) nonzero = true;
        }
        if (nonzero) rows.push_back(r);
    }
    Lattice L;
    if (rows.empty()) {
        L.den = 1;
        return L;  // zero lattice, rank 0
    }
    rows = hnf(rows);
    // normalize so gcd(entries, den) = 1
    Int g = lcm_den;
    for (auto& r : rows)
        for (auto& x : r) g = gcd(g, x);
    if (g > 1) {
        lcm_den /= g;
        for (auto& r : rows)
            for (auto& x : r) x /= g;
    }
    L.rows = rows;
    L.den = lcm_den;
    return L;
}

Lattice lattice_sum(const Lattice& x, const Lattice& y) {
    std::vector<VecQ> gens;
    for (int i = 0; i < x.rank(); ++i) gens.push_back(x.basis_row(i));
    for (int i = 0; i < y.rank(); ++i) gens.push_back(y.basis_row(i));
    return canonical_lattice(gens);
}

Lattice lattice_scale(const Lattice& x, const Rat& c) {
    if (c == 0) throw Error("Domain", "scaling lattice by 0");
    std::vector<VecQ> gens;
    for (int i = 0; i < x.rank(); ++i) {
        VecQ v = x.basis_row(i);
        for (auto& q : v) q *= c;
        gens.push_back(v);
    }
    return canonical_lattice(gens);
}

Lattice lattice_dual(const Lattice& x) {
    int n = x.rank();
    if (n == 0 || (int)x.rows[0].size() != n)
        throw Error("Domain", "dual needs a full-rank lattice");
    MatQ b = x.basis_matrix();
    MatQ d = transpose(inverse(b));
    std::vector<VecQ> gens;
    for (int i = 0; i < n; ++i) gens.push_back(d.row(i));
    return canonical_lattice(gens);
}

Lattice lattice_intersect(const Lattice& x, const Lattice& y) {
    return lattice_dual(lattice_sum(lattice_dual(x), lattice_dual(y)));
}

bool lattice_contains(const Lattice& L, const VecQ& v) {
    // back-substitute against HNF rows
    VecQ w = v;
    size_t cols = w.size();
    bool all_zero = true;
    for (auto& q : w)
        if (q != 0) all_zero = false;
    if (all_zero) return true;
    for (int i = 0; i < L.rank(); ++i) {
        // pivot column of row i
        size_t pc = 0;
        while (pc < cols && L.rows[i][pc] == 0) ++pc;
        if (pc == cols) continue;
        Rat coeff = w[pc] / frac(L.rows[i][pc], L.den);
        if (coeff == 0) continue;
        if (!is_integer(coeff)) return false;
        for (size_t j = 0; j < cols; ++j) w[j] -= coeff * frac(L.rows[i][j], L.den);
    }
    for (auto& q : w)
        if (q != 0) return false;
    return true;
}

Rat lattice_index(const Lattice& x, const Lattice& y) {
    MatQ bx = x.basis_matrix(), by = y.basis_matrix();
    if (bx.rows != bx.cols || by.rows != by.cols)
        throw Error("Domain", "index needs full-rank lattices");
    Rat r = det(by) / det(bx);
    return rat_abs(r);
}

}  // namespace brandtlab
