#ifndef BRANDTLAB_QUAT_HPP
#define BRANDTLAB_QUAT_HPP

#include <vector>

#include "brandtlab/arith.hpp"
#include "brandtlab/matq.hpp"

namespace brandtlab {

// B = (a,b | Q): i^2 = a, j^2 = b, ij = k = -ji.  Definite means a, b < 0.
struct QuatAlgebra {
    Int a, b;
    Int disc;  // product of finite ramified primes

    bool operator==(const QuatAlgebra& o) const { return a == o.a && b == o.b; }
};

struct Quat {
    Rat w, x, y, z;

    bool operator==(const Quat& o) const { return w == o.w && x == o.x && y == o.y && z == o.z; }
    bool is_zero() const { return w == 0 && x == 0 && y == 0 && z == 0; }
};

inline Quat q_of(const VecQ& v) { return Quat{v[0], v[1], v[2], v[3]}; }
inline VecQ q_vec(const Quat& q) { return {q.w, q.x, q.y, q.z}; }
inline Quat q_one() { return Quat{1, 0, 0, 0}; }

Quat q_add(const Quat& p, const Quat& q);
Quat q_sub(const Quat& p, const Quat& q);
Quat q_scale(const Quat& p, const Rat& c);
Quat q_mul(const QuatAlgebra& A, const Quat& p, const Quat& q);
Quat q_conj(const Quat& p);
Rat q_trd(const Quat& p);
Rat q_nrd(const QuatAlgebra& A, const Quat& p);
Quat q_inv(const QuatAlgebra& A, const Quat& p);  // conj / nrd

std::vector<Int> ramified_primes(const Int& a, const Int& b);
QuatAlgebra make_algebra(const Int& a, const Int& b);

// Definite algebra with finite ramification exactly at the primes of DB
// (odd number of primes); found by a small search certified by Hilbert
// symbols at every p | 2ab and at infinity.
QuatAlgebra algebra_from_level_disc(const Int& DB);

}  // namespace brandtlab

#endif
