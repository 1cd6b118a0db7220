#ifndef BRANDTLAB_LATTICE_HPP
#define BRANDTLAB_LATTICE_HPP

#include <vector>

#include "brandtlab/matq.hpp"

namespace brandtlab {

// Z-lattice in Q^4 (rank <= 4), stored canonically: integer HNF rows over a
// common positive denominator with gcd(all entries, den) = 1.  Two generator
// sets spanning the same lattice produce identical storage.
struct Lattice {
    std::vector<VecZ> rows;  // HNF rows
    Int den = 1;

    int rank() const { return (int)rows.size(); }
    bool operator==(const Lattice& o) const { return den == o.den && rows == o.rows; }

    VecQ basis_row(int i) const {
        VecQ v(rows[i].size());
        for (size_t j = 0; j < rows[i].size(); ++j) v[j] = frac(rows[i][j], den);
        return v;
    }
    MatQ basis_matrix() const {
        MatQ m(rank(), rows.empty() ? 0 : (int)rows[0].size());
        for (int i = 0; i < rank(); ++i)
            for (int j = 0; j < m.cols; ++j) m.at(i, j) = frac(rows[i][j], den);
        return m;
    }
};

// Canonical lattice from rational generators; drops dependent generators.
// Throws EmptyInput on an empty generator list.
Lattice canonical_lattice(const std::vector<VecQ>& generators);

Lattice lattice_sum(const Lattice& x, const Lattice& y);
Lattice lattice_scale(const Lattice& x, const Rat& c);

// Full-rank only.
Lattice lattice_intersect(const Lattice& x, const Lattice& y);
Lattice lattice_dual(const Lattice& x);  // {y : <y, x> in Z for all x in L}

bool lattice_contains(const Lattice& L, const VecQ& v);
// index [x : y] for y <= x, as a positive rational det ratio
Rat lattice_index(const Lattice& x, const Lattice& y);

}  // namespace brandtlab

#endif
