#ifndef BRANDTLAB_CYCLO_HPP
#define BRANDTLAB_CYCLO_HPP

#include <vector>

#include "brandtlab/rational.hpp"

namespace brandtlab {

// Element of Q(zeta_n), stored on the power basis 1, z, ..., z^{phi(n)-1}
// modulo the n-th cyclotomic polynomial.  Exact arithmetic for character
// values and period sums; n stays small (the exponent of a class group).
struct Cyclo {
    int n = 1;                 // root-of-unity order of the ambient field
    std::vector<Rat> c;        // length phi(n)

    static Cyclo zero(int n);
    static Cyclo from_rat(int n, const Rat& r);
    static Cyclo root_power(int n, long k);  // zeta_n^k

    bool is_zero() const;
    bool is_rational() const;
    Rat rational_value() const;  // throws if not rational

    bool operator==(const Cyclo& o) const { return n == o.n && c == o.c; }
};

Cyclo cy_add(const Cyclo& a, const Cyclo& b);
Cyclo cy_sub(const Cyclo& a, const Cyclo& b);
Cyclo cy_mul(const Cyclo& a, const Cyclo& b);
Cyclo cy_scale(const Cyclo& a, const Rat& r);
Cyclo cy_conj(const Cyclo& a);                 // complex conjugation, zeta -> zeta^{-1}
Cyclo cy_norm_sq(const Cyclo& a);              // a * conj(a)

// Coefficients of the n-th cyclotomic polynomial (degree phi(n)), monic.
std::vector<Int> cyclotomic_poly(int n);

}  // namespace brandtlab

#endif
