#ifndef BRANDTLAB_ORDER_HPP
#define BRANDTLAB_ORDER_HPP

#include <array>

#include "brandtlab/enumerate.hpp"
#include "brandtlab/lattice.hpp"
#include "brandtlab/quat.hpp"

namespace brandtlab {

// Special level type (N1, N2, M); see validate_level for the constraints.
struct LevelType {
    Int N1, N2, M;

    Int N() const { return N1 * N2 * M; }
    Int DB() const;              // product of primes dividing N1*N2
    Int N1_deep() const;         // product of p^ord_p(N1) over ord_p(N1) > 1
    Int Nprime() const;          // N * DB^{-1}: primes where the order is non-maximal
    int omega_odd_N2() const;    // number of odd primes dividing N2
    bool operator==(const LevelType& o) const { return N1 == o.N1 && N2 == o.N2 && M == o.M; }
};

LevelType validate_level(const Int& N1, const Int& N2, const Int& M);

// Eichler mass of the genus of special orders of this level type.
Rat mass_formula(const LevelType& lt);

// Rank-4 lattices in B; operations that need the algebra take it explicitly.
Quat lattice_elem(const Lattice& L, int i);
Lattice qlat_mul(const QuatAlgebra& A, const Lattice& X, const Lattice& Y);
Lattice qlat_scale(const Lattice& X, const Rat& c);
Lattice qlat_conj(const Lattice& X);
Lattice qlat_mul_elem(const QuatAlgebra& A, const Quat& g, const Lattice& X);   // g * X
Lattice qlat_mul_elem_right(const QuatAlgebra& A, const Lattice& X, const Quat& g);
Rat qlat_norm(const QuatAlgebra& A, const Lattice& X);   // gcd of reduced norms
Lattice qlat_inverse(const QuatAlgebra& A, const Lattice& X);  // conj(X)/N(X)
MatQ qlat_gram(const QuatAlgebra& A, const Lattice& X);  // v^T G v = nrd
Lattice left_order_of(const QuatAlgebra& A, const Lattice& X);
Lattice right_order_of(const QuatAlgebra& A, const Lattice& X);
bool is_order(const QuatAlgebra& A, const Lattice& L);
Int reduced_discriminant(const QuatAlgebra& A, const Lattice& L);

struct QOrder {
    QuatAlgebra A;
    Lattice L;
    Gram gram;      // reduced norm form on the basis
    Int discrd;

    int unit_half_count() const;  // w = #O^x / 2 computed from the norm form
};

QOrder make_order(const QuatAlgebra& A, const Lattice& L);

QOrder maximal_order(const QuatAlgebra& A);

// Two-sided prime of a p-maximal order above a ramified p (radical preimage).
Lattice two_sided_prime(const QOrder& O, const Int& p);

inline QuatAlgebra algebra_from_level(const LevelType& lt) {
    return algebra_from_level_disc(lt.DB());
}

// Special order of the given level type in A; requires disc(A) = DB(lt).
// Rejects even N2 (UnsupportedDyadic).
QOrder special_order(const QuatAlgebra& A, const LevelType& lt);

// Structure of O/pO as a split matrix algebra: coordinates of matrix units.
// Valid for p not dividing disc(O).
struct SplitModP {
    Int p;
    // images sigma(basis_k) as 2x2 matrices over F_p, row-major entries
    std::array<std::array<long, 4>, 4> mat;
};

SplitModP split_mod_p(const QOrder& O, const Int& p);

}  // namespace brandtlab

#endif
