#ifndef BRANDTLAB_CLASSSET_HPP
#define BRANDTLAB_CLASSSET_HPP

#include "brandtlab/order.hpp"

namespace brandtlab {

// Right ideal class data for a special order: representatives, left orders,
// unit weights, everything the Brandt matrices need.  Classes are presented
// with the w > 1 classes first (ascending w), then the w = 1 classes, ties in
// BFS discovery order.
struct ClassSetData {
    QuatAlgebra A;
    LevelType level;
    QOrder O;                        // base order; ideals are right O-ideals
    std::vector<Lattice> ideals;     // I_1..I_n, norms coprime to coprime_modulus
    std::vector<QOrder> left_orders;
    std::vector<Int> weights;        // w_i
    std::vector<Rat> norms;          // nrd(I_i)
    Int coprime_modulus;
    Rat mass;

    int n() const { return (int)ideals.size(); }
};

// Norm of a quaternion ideal: positive generator of the reduced norm ideal.
Rat ideal_norm(const QuatAlgebra& A, const Lattice& I);
Lattice ideal_product(const QuatAlgebra& A, const Lattice& I, const Lattice& J);
Lattice ideal_inverse(const QuatAlgebra& A, const Lattice& I);

// Same right order assumed; tests principality of I J^{-1} by whether the
// scaled norm form attains 1.
bool is_equivalent(const QuatAlgebra& A, const Lattice& I, const Lattice& J);

// BFS over p-neighbors at primes coprime to coprime_modulus, terminated by
// the mass formula; throws MassMismatch if the search exhausts without
// reaching the mass.
ClassSetData right_ideal_classes(const QOrder& O, const LevelType& lt,
                                 const Int& coprime_modulus);

// Same classes re-based at the left order of I_k: ideals become right
// O_l(I_k)-ideals I_j I_k^{-1}; labels, weights, left orders stay aligned.
ClassSetData rebase(const ClassSetData& cs, int k);

// Brandt matrix A_m: a_ij = r_{I_i I_j^{-1}}(m alpha_ij) / (2 w_j); entries
// are nonnegative integers.
MatQ brandt_matrix(const ClassSetData& cs, const Int& m);

// Number of integral right O-ideals of norm m = common row sum of A_m.
Int brandt_degree(const MatQ& am);

}  // namespace brandtlab

#endif
