#ifndef BRANDTLAB_QUADFIELD_HPP
#define BRANDTLAB_QUADFIELD_HPP

#include <vector>

#include <memory>

#include "brandtlab/cyclo.hpp"

namespace brandtlab {

struct ImagQuadField {
    Int d;    // squarefree negative
    Int D;    // fundamental discriminant: d if d = 1 mod 4, else 4d
    int u;    // unit index u_K = #o_K^x / 2: 3 for D=-3, 2 for D=-4, else 1
    // trace and norm of the standard generator omega of o_K = Z[omega]
    Int gen_trace() const { return D % 2 == 0 ? Int(0) : Int(1); }
    Int gen_norm() const { return D % 2 == 0 ? Int(-D / 4) : Int((1 - D) / 4); }
};

// Accepts a squarefree negative d; errors NotSquarefree / NotNegative.
ImagQuadField make_field(const Int& d);

// Primitive reduced binary quadratic form of discriminant D < 0.
struct QuadForm {
    Int a, b, c;
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const QuadForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
};

Int form_disc(const QuadForm& f);
bool is_reduced(const QuadForm& f);
QuadForm reduce_form(QuadForm f);
QuadForm compose_forms(const QuadForm& f, const QuadForm& g);  // then reduce
// properly equivalent form whose leading coefficient is coprime to m
QuadForm form_coprime_to(const QuadForm& f, const Int& m);
QuadForm principal_form(const Int& D);

enum class Splitting { split, inert, ramified };
Splitting splitting(const ImagQuadField& K, const Int& p);

// Class of a fixed prime above p (form (p, b, .) with minimal b >= 0);
// errors InertPrime.
QuadForm prime_form(const ImagQuadField& K, const Int& p);

// The class group as reduced forms with full multiplication data and a cyclic
// decomposition; index 0 is the principal class.
struct ClassGroup {
    ImagQuadField K;
    std::vector<QuadForm> classes;
    std::vector<std::vector<int>> mul;    // multiplication table
    std::vector<int> inv;
    std::vector<int> cyc_orders;          // orders of the chosen cyclic generators
    std::vector<int> cyc_gens;            // indices of the generators
    std::vector<std::vector<int>> dlog;   // exponent vector of each class
    int exponent = 1;                     // lcm of cyc_orders

    int h() const { return (int)classes.size(); }
    int index_of(const QuadForm& f) const;
};

ClassGroup class_group(const ImagQuadField& K);

// Character of Cl(K): exponents against the cyclic generators.  Values are
// exact roots of unity in Q(zeta_exponent).
struct ClassChar {
    std::shared_ptr<const ClassGroup> G;
    std::vector<int> exps;  // k_i with chi(g_i) = zeta^{ (exponent/ord_i) k_i }

    Cyclo value(int class_index) const;
    Cyclo value_inv(int class_index) const;  // chi^{-1}
    bool is_trivial() const;
    int order() const;
    // +1/-1 for real characters; throws otherwise
    int sign_value(int class_index) const;
};

std::vector<ClassChar> characters(const ClassGroup& G);

}  // namespace brandtlab

#endif
