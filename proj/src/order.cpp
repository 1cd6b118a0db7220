#include "brandtlab/order.hpp"

#include <algorithm>
#include <map>

namespace brandtlab {

Int LevelType::DB() const {
    Int d = 1;
    for (auto& p : prime_divisors(N1 * N2)) d *= p;
    return d;
}

Int LevelType::N1_deep() const {
    Int d = 1;
    for (auto& [p, e] : factorize(N1))
        if (e > 1)
            for (int i = 0; i < e; ++i) d *= p;
    return d;
}

Int LevelType::Nprime() const { return N() / DB(); }

int LevelType::omega_odd_N2() const {
    int c = 0;
    for (auto& p : prime_divisors(N2))
        if (p != 2) ++c;
    return c;
}

LevelType validate_level(const Int& N1, const Int& N2, const Int& M) {
    if (N1 < 1 || N2 < 1 || M < 1) throw Error("Domain", "level parts must be positive");
    if (gcd(N1, N2) != 1 || gcd(N1, M) != 1 || gcd(N2, M) != 1)
        throw Error("NotCoprime", "level parts must be pairwise coprime");
    for (auto& [p, e] : factorize(N1))
        if (e % 2 == 0)
            throw Error("EvenExponentInN1", "ord_" + p.get_str() + "(N1) = " + std::to_string(e));
    for (auto& [p, e] : factorize(N2))
        if (e != 2)
            throw Error("N2NotSquareOfSquarefree",
                        "ord_" + p.get_str() + "(N2) = " + std::to_string(e));
    if (!is_squarefree(M)) throw Error("MNotSquarefree", "M = " + M.get_str());
    if (prime_divisors(N1 * N2).size() % 2 == 0)
        throw Error("WrongParity", "number of primes dividing N1*N2 must be odd");
    return LevelType{N1, N2, M};
}

Rat mass_formula(const LevelType& lt) {
    Rat m = frac(lt.N(), 12);
    for (auto& p : prime_divisors(lt.N1 * lt.N2)) m *= frac(p - 1, p);
    for (auto& p : prime_divisors(lt.N2 * lt.M)) m *= frac(p + 1, p);
    return m;
}

Quat lattice_elem(const Lattice& L, int i) { return q_of(L.basis_row(i)); }

Lattice qlat_mul(const QuatAlgebra& A, const Lattice& X, const Lattice& Y) {
    std::vector<VecQ> gens;
    for (int i = 0; i < X.rank(); ++i)
        for (int j = 0; j < Y.rank(); ++j)
            gens.push_back(q_vec(q_mul(A, lattice_elem(X, i), lattice_elem(Y, j))));
    return canonical_lattice(gens);
}

Lattice qlat_scale(const Lattice& X, const Rat& c) { return lattice_scale(X, c); }

Lattice qlat_conj(const Lattice& X) {
    std::vector<VecQ> gens;
    for (int i = 0; i < X.rank(); ++i) gens.push_back(q_vec(q_conj(lattice_elem(X, i))));
    return canonical_lattice(gens);
}

Lattice qlat_mul_elem(const QuatAlgebra& A, const Quat& g, const Lattice& X) {
    std::vector<VecQ> gens;
    for (int i = 0; i < X.rank(); ++i) gens.push_back(q_vec(q_mul(A, g, lattice_elem(X, i))));
    return canonical_lattice(gens);
}

Lattice qlat_mul_elem_right(const QuatAlgebra& A, const Lattice& X, const Quat& g) {
    std::vector<VecQ> gens;
    for (int i = 0; i < X.rank(); ++i) gens.push_back(q_vec(q_mul(A, lattice_elem(X, i), g)));
    return canonical_lattice(gens);
}

Rat qlat_norm(const QuatAlgebra& A, const Lattice& X) {
    if (X.rank() == 0) throw Error("ZeroLattice", "norm of the zero lattice");
    Rat g;
    std::vector<Quat> b;
    for (int i = 0; i < X.rank(); ++i) b.push_back(lattice_elem(X, i));
    for (size_t i = 0; i < b.size(); ++i) {
        g = rat_gcd(g, q_nrd(A, b[i]));
        for (size_t j = i + 1; j < b.size(); ++j) g = rat_gcd(g, q_nrd(A, q_add(b[i], b[j])));
    }
    return g;
}

Lattice qlat_inverse(const QuatAlgebra& A, const Lattice& X) {
    return qlat_scale(qlat_conj(X), 1 / qlat_norm(A, X));
}

MatQ qlat_gram(const QuatAlgebra& A, const Lattice& X) {
    int n = X.rank();
    MatQ g(n, n);
    std::vector<Quat> b;
    for (int i = 0; i < n; ++i) b.push_back(lattice_elem(X, i));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Rat v = q_trd(q_mul(A, b[i], q_conj(b[j]))) / 2;
            g.at(i, j) = v;
            g.at(j, i) = v;
        }
    return g;
}

namespace {

Lattice idealizer(const QuatAlgebra& A, const Lattice& J, bool left) {
    Lattice result;
    bool first = true;
    for (int k = 0; k < J.rank(); ++k) {
        Quat g = lattice_elem(J, k);
        Quat gi = q_inv(A, g);
        // left: x g in J <=> x in J g^{-1}; right: g x in J <=> x in g^{-1} J
        Lattice piece = left ? qlat_mul_elem_right(A, J, gi) : qlat_mul_elem(A, gi, J);
        result = first ? piece : lattice_intersect(result, piece);
        first = false;
    }
    return result;
}

}  // namespace

Lattice left_order_of(const QuatAlgebra& A, const Lattice& X) { return idealizer(A, X, true); }
Lattice right_order_of(const QuatAlgebra& A, const Lattice& X) { return idealizer(A, X, false); }

bool is_order(const QuatAlgebra& A, const Lattice& L) {
    if (L.rank() != 4) return false;
    VecQ one{Rat(1), Rat(0), Rat(0), Rat(0)};
    if (!lattice_contains(L, one)) return false;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Quat p = q_mul(A, lattice_elem(L, i), lattice_elem(L, j));
            if (!lattice_contains(L, q_vec(p))) return false;
        }
    return true;
}

Int reduced_discriminant(const QuatAlgebra& A, const Lattice& L) {
    MatQ t(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            t.at(i, j) = q_trd(q_mul(A, lattice_elem(L, i), lattice_elem(L, j)));
    Rat d = rat_abs(det(t));
    if (!is_integer(d)) throw Error("Internal", "trace form determinant not integral");
    Int root;
    if (!is_square(to_int(d), &root)) throw Error("Internal", "trace form determinant not square");
    return root;
}

int QOrder::unit_half_count() const {
    auto units = enumerate_by_norm(gram, 1);
    if (units.size() % 2 != 0) throw Error("Internal", "odd unit count");
    return (int)units.size() / 2;
}

QOrder make_order(const QuatAlgebra& A, const Lattice& L) {
    if (!is_order(A, L)) throw Error("ConstructionFailed", "lattice is not an order");
    QOrder O;
    O.A = A;
    O.L = L;
    O.gram = make_gram(qlat_gram(A, L));
    O.discrd = reduced_discriminant(A, L);
    return O;
}

namespace {

VecQ coords_in(const Lattice& L, const VecQ& v) {
    VecQ out;
    if (!solve_left(L.basis_matrix(), v, out)) throw Error("Internal", "vector outside span");
    return out;
}

using StructC = std::array<std::array<std::array<Int, 4>, 4>, 4>;

StructC structure_constants(const QuatAlgebra& A, const Lattice& L) {
    StructC c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            VecQ prod = q_vec(q_mul(A, lattice_elem(L, i), lattice_elem(L, j)));
            VecQ co = coords_in(L, prod);
            for (int k = 0; k < 4; ++k) {
                if (!is_integer(co[k])) throw Error("Internal", "non-integral structure constant");
                c[i][j][k] = to_int(co[k]);
            }
        }
    return c;
}

long mod_p(const Int& x, long p) { return to_long(Int(((x % p) + p) % p)); }

long inv_mod(long a, long p) {
    a = ((a % p) + p) % p;
    for (long t = 1; t < p; ++t)
        if ((a * t) % p == 1) return t;
    throw Error("Internal", "not invertible mod p");
}

using FpVec = std::array<long, 4>;

struct FpAlgebra {
    long p;
    StructC c;
    std::array<long, 4> trd_basis;  // trd(b_k) mod p

    FpVec mul(const FpVec& x, const FpVec& y) const {
        FpVec r{0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; j < 4; ++j) {
                if (y[j] == 0) continue;
                long f = (x[i] * y[j]) % p;
                if (f == 0) continue;
                for (int k = 0; k < 4; ++k) r[k] = (r[k] + f * mod_p(c[i][j][k], p)) % p;
            }
        }
        return r;
    }
    long trd(const FpVec& x) const {
        long t = 0;
        for (int k = 0; k < 4; ++k) t = (t + x[k] * trd_basis[k]) % p;
        return t;
    }
    bool is_zero(const FpVec& x) const { return x == FpVec{0, 0, 0, 0}; }
};

FpAlgebra fp_algebra(const QuatAlgebra& A, const Lattice& L, long p) {
    FpAlgebra alg;
    alg.p = p;
    alg.c = structure_constants(A, L);
    for (int k = 0; k < 4; ++k) {
        Rat t = q_trd(lattice_elem(L, k));
        if (!is_integer(t)) throw Error("Internal", "non-integral trace on an order");
        alg.trd_basis[k] = mod_p(to_int(t), p);
    }
    return alg;
}

// reduce a list of F_p vectors to an echelon basis
std::vector<FpVec> fp_echelon(std::vector<FpVec> vecs, long p) {
    std::vector<FpVec> basis;
    for (auto v : vecs) {
        for (auto& b : basis) {
            int lead = 0;
            while (lead < 4 && b[lead] == 0) ++lead;
            if (lead < 4 && v[lead] % p != 0) {
                long f = (v[lead] * inv_mod(b[lead], p)) % p;
                for (int k = 0; k < 4; ++k) v[k] = ((v[k] - f * b[k]) % p + p) % p;
            }
        }
        for (auto& x : v) x = ((x % p) + p) % p;
        if (v != FpVec{0, 0, 0, 0}) {
            basis.push_back(v);
            std::sort(basis.begin(), basis.end(), [](const FpVec& a, const FpVec& b) {
                return std::find_if(a.begin(), a.end(), [](long x) { return x != 0; }) -
                           a.begin() <
                       std::find_if(b.begin(), b.end(), [](long x) { return x != 0; }) - b.begin();
            });
        }
    }
    return basis;
}

std::vector<FpVec> nilradical_mod_p(const QuatAlgebra& A, const Lattice& L, long p) {
    FpAlgebra alg = fp_algebra(A, L, p);
    if (p <= 3) {
        // brute force: x such that every (x y) is nilpotent
        std::vector<FpVec> all;
        for (long a = 0; a < p; ++a)
            for (long b = 0; b < p; ++b)
                for (long c = 0; c < p; ++c)
                    for (long d = 0; d < p; ++d) all.push_back({a, b, c, d});
        std::vector<FpVec> rad;
        for (auto& x : all) {
            bool ok = true;
            for (auto& y : all) {
                FpVec z = alg.mul(x, y);
                FpVec z2 = alg.mul(z, z);
                FpVec z4 = alg.mul(z2, z2);
                if (!alg.is_zero(z4)) {
                    ok = false;
                    break;
                }
            }
            if (ok) rad.push_back(x);
        }
        return fp_echelon(rad, p);
    }
    // odd p >= 5: kernel of the reduced-trace pairing trd(b_i b_j) mod p
    std::array<std::array<long, 4>, 4> t{};
    for (int i = 0; i < 4; ++i) {
        FpVec ei{0, 0, 0, 0};
        ei[i] = 1;
        for (int j = 0; j < 4; ++j) {
            FpVec ej{0, 0, 0, 0};
            ej[j] = 1;
            t[i][j] = alg.trd(alg.mul(ei, ej));
        }
    }
    // kernel over F_p
    std::array<std::array<long, 4>, 4> m = t;
    std::vector<int> pivots;
    int r = 0;
    for (int col = 0; col < 4 && r < 4; ++col) {
        int sel = -1;
        for (int i = r; i < 4; ++i)
            if (m[i][col] % p != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(m[sel], m[r]);
        long iv = inv_mod(m[r][col], p);
        for (int j = 0; j < 4; ++j) m[r][j] = (m[r][j] * iv) % p;
        for (int i = 0; i < 4; ++i) {
            if (i == r) continue;
            long f = ((m[i][col] % p) + p) % p;
            if (f == 0) continue;
            for (int j = 0; j < 4; ++j) m[i][j] = ((m[i][j] - f * m[r][j]) % p + p) % p;
        }
        pivots.push_back(col);
        ++r;
    }
    std::vector<FpVec> basis;
    std::array<bool, 4> isp{false, false, false, false};
    for (int c : pivots) isp[c] = true;
    for (int col = 0; col < 4; ++col) {
        if (isp[col]) continue;
        FpVec v{0, 0, 0, 0};
        v[col] = 1;
        for (size_t rr = 0; rr < pivots.size(); ++rr)
            if (pivots[rr] < col) v[pivots[rr]] = ((-m[rr][col]) % p + p) % p;
        basis.push_back(v);
    }
    return basis;
}

Lattice fp_sublattice(const Lattice& L, const std::vector<FpVec>& coord_vectors, long p) {
    // lattice spanned by lifts of the coordinate vectors together with p*L
    std::vector<VecQ> gens;
    for (auto& v : coord_vectors) {
        VecQ lift(4);
        for (int k = 0; k < 4; ++k) {
            if (v[k] == 0) continue;
            VecQ row = L.basis_row(k);
            for (int c = 0; c < 4; ++c) lift[c] += Rat(v[k]) * row[c];
        }
        gens.push_back(lift);
    }
    for (int k = 0; k < 4; ++k) {
        VecQ row = L.basis_row(k);
        for (auto& q : row) q *= p;
        gens.push_back(row);
    }
    return canonical_lattice(gens);
}

Lattice radical_preimage(const QOrder& O, long p) {
    return fp_sublattice(O.L, nilradical_mod_p(O.A, O.L, p), p);
}

}  // namespace

namespace {

// Close a lattice under multiplication; gives up if it does not stabilize.
bool multiplicative_closure(const QuatAlgebra& A, Lattice& L) {
    for (int iter = 0; iter < 8; ++iter) {
        Lattice next = lattice_sum(L, qlat_mul(A, L, L));
        if (next == L) return true;
        L = next;
    }
    return false;
}

// At a split hereditary prime both radical idealizers fix the order; divide a
// radical element by p instead and close up to reach the maximal order.
Lattice hereditary_enlarge(const QOrder& O, const Lattice& J, long p) {
    for (long bound = 1; bound <= 2; ++bound) {
        std::vector<long> coef(4, -bound);
        while (true) {
            Quat j{0, 0, 0, 0};
            bool nonzero = false;
            for (int k = 0; k < 4; ++k) {
                if (coef[k] != 0) nonzero = true;
                j = q_add(j, q_scale(lattice_elem(J, k), Rat(coef[k])));
            }
            if (nonzero) {
                Quat x = q_scale(j, frac(1, p));
                if (is_integer(q_trd(x)) && is_integer(q_nrd(O.A, x))) {
                    std::vector<VecQ> gens{q_vec(x)};
                    for (int k = 0; k < 4; ++k) gens.push_back(O.L.basis_row(k));
                    Lattice L = canonical_lattice(gens);
                    if (multiplicative_closure(O.A, L) && is_order(O.A, L) && L != O.L) {
                        Int d = reduced_discriminant(O.A, L);
                        if (d < O.discrd && O.discrd % d == 0) return L;
                    }
                }
            }
            int k = 0;
            for (; k < 4; ++k) {
                if (coef[k] < bound) {
                    ++coef[k];
                    break;
                }
                coef[k] = -bound;
            }
            if (k == 4) break;
        }
    }
    throw Error("ConstructionFailed", "hereditary enlargement failed at p = " + std::to_string(p));
}

}  // namespace

QOrder maximal_order(const QuatAlgebra& A) {
    std::vector<VecQ> gens = {{Rat(1), Rat(0), Rat(0), Rat(0)},
                              {Rat(0), Rat(1), Rat(0), Rat(0)},
                              {Rat(0), Rat(0), Rat(1), Rat(0)},
                              {Rat(0), Rat(0), Rat(0), Rat(1)}};
    QOrder O = make_order(A, canonical_lattice(gens));
    while (O.discrd != A.disc) {
        if (O.discrd % A.disc != 0)
            throw Error("Internal", "discriminant lost the ramified part");
        Int excess = O.discrd / A.disc;
        long p = to_long(prime_divisors(excess)[0]);
        Lattice J = radical_preimage(O, p);
        Lattice grown = left_order_of(A, J);
        if (grown == O.L) grown = right_order_of(A, J);
        if (grown == O.L) grown = hereditary_enlarge(O, J, p);
        O = make_order(A, grown);
    }
    return O;
}

Lattice two_sided_prime(const QOrder& O, const Int& p) {
    Lattice P = radical_preimage(O, to_long(p));
    Lattice P2 = qlat_mul(O.A, P, P);
    if (lattice_index(O.L, P2) != Rat(p * p * p * p))
        throw Error("Internal", "two-sided prime has wrong square");
    return P;
}

namespace {

// Search a trace-adjusted element of the two-sided prime P with v_p(nrd) = 1
// (a ramified quadratic uniformizer at p).
Quat ramified_generator(const QuatAlgebra& A, const Lattice& P, const Int& p) {
    for (long bound = 1; bound <= 3; ++bound) {
        std::vector<long> coef(4, -bound);
        while (true) {
            Quat g{0, 0, 0, 0};
            bool nonzero = false;
            for (int k = 0; k < 4; ++k) {
                if (coef[k] != 0) nonzero = true;
                g = q_add(g, q_scale(lattice_elem(P, k), Rat(coef[k])));
            }
            if (nonzero) {
                Quat u = q_sub(q_scale(g, 2), q_scale(q_one(), q_trd(g)));  // 2g - trd(g)
                Rat n = q_nrd(A, u);
                if (n != 0 && is_integer(n) && valuation(to_int(n), p) == 1) return u;
            }
            int k = 0;
            for (; k < 4; ++k) {
                if (coef[k] < bound) {
                    ++coef[k];
                    break;
                }
                coef[k] = -bound;
            }
            if (k == 4) break;
        }
    }
    throw Error("ConstructionFailed", "no ramified generator at p = " + p.get_str());
}

// Element of O that generates the unramified quadratic extension at every
// prime in s1_odd (nonsquare unit discriminant), and has discriminant 5 mod 8
// if dyadic_deep is set.
Quat unramified_generator(const QuatAlgebra& A, const Lattice& O,
                          const std::vector<Int>& s1_odd, bool dyadic_deep) {
    for (long bound = 1; bound <= 4; ++bound) {
        std::vector<long> coef(4, -bound);
        while (true) {
            Quat u{0, 0, 0, 0};
            for (int k = 0; k < 4; ++k) u = q_add(u, q_scale(lattice_elem(O, k), Rat(coef[k])));
            Rat t = q_trd(u), n = q_nrd(A, u);
            if (is_integer(t) && is_integer(n)) {
                Int d = to_int(t) * to_int(t) - 4 * to_int(n);
                bool ok = d != 0;
                for (auto& p : s1_odd)
                    if (ok && kronecker(d, p) != -1) ok = false;
                if (ok && dyadic_deep && ((d % 8) + 8) % 8 != 5) ok = false;
                if (ok) return u;
            }
            int k = 0;
            for (; k < 4; ++k) {
                if (coef[k] < bound) {
                    ++coef[k];
                    break;
                }
                coef[k] = -bound;
            }
            if (k == 4) break;
        }
    }
    throw Error("ConstructionFailed", "no unramified generator found");
}

}  // namespace

QOrder special_order(const QuatAlgebra& A, const LevelType& lt) {
    if (A.disc != lt.DB())
        throw Error("Domain", "algebra discriminant " + A.disc.get_str() +
                                  " does not match level " + lt.DB().get_str());
    for (auto& p : prime_divisors(lt.N2))
        if (p == 2) throw Error("UnsupportedDyadic", "N2 must be odd");
    QOrder O = maximal_order(A);

    std::vector<std::pair<Int, int>> s1_deep;  // (p, e) with e >= 3
    std::vector<Int> s1_odd;
    bool dyadic_deep = false;
    for (auto& [p, e] : factorize(lt.N1))
        if (e > 1) {
            s1_deep.push_back({p, e});
            if (p == 2)
                dyadic_deep = true;
            else
                s1_odd.push_back(p);
        }
    std::vector<Int> s2 = prime_divisors(lt.N2);

    if (!s1_deep.empty() || !s2.empty()) {
        // two-sided prime powers fixing the local levels
        Lattice prod;
        bool have_prod = false;
        auto mul_in = [&](const Lattice& X) {
            prod = have_prod ? qlat_mul(A, prod, X) : X;
            have_prod = true;
        };
        for (auto& [p, e] : s1_deep) {
            Lattice P = two_sided_prime(O, p);
            Lattice pw = P;
            for (int i = 2; i <= e - 1; ++i) pw = qlat_mul(A, pw, P);
            mul_in(pw);
        }
        std::vector<Quat> gens_u;
        for (auto& p : s2) {
            Lattice P = two_sided_prime(O, p);
            mul_in(P);
            gens_u.push_back(ramified_generator(A, P, p));
        }
        Quat u;
        bool have_u = false;
        if (!s1_odd.empty() || dyadic_deep) {
            u = unramified_generator(A, O.L, s1_odd, dyadic_deep);
            have_u = true;
        }
        // CRT-combine the quadratic generators across their primes via
        // coordinates: conditions only depend on u mod p^2 (resp. mod 8)
        std::vector<std::pair<Quat, Int>> congruences;
        if (have_u) {
            Int m = dyadic_deep ? 8 : 1;
            for (auto& p : s1_odd) m *= p;
            congruences.push_back({u, m});
        }
        for (size_t i = 0; i < s2.size(); ++i) congruences.push_back({gens_u[i], s2[i] * s2[i]});
        Quat combined{0, 0, 0, 0};
        if (congruences.size() == 1) {
            combined = congruences[0].first;
        } else {
            Int M = 1;
            for (auto& [g, m] : congruences) M *= m;
            for (auto& [g, m] : congruences) {
                Int other = M / m;
                Int inv;
                if (mpz_invert(inv.get_mpz_t(), other.get_mpz_t(), m.get_mpz_t()) == 0)
                    throw Error("Internal", "CRT moduli not coprime");
                combined = q_add(combined, q_scale(g, Rat(other * inv)));
            }
        }
        std::vector<VecQ> gens = {{Rat(1), Rat(0), Rat(0), Rat(0)}, q_vec(combined)};
        for (int k = 0; k < prod.rank(); ++k) gens.push_back(prod.basis_row(k));
        O = make_order(A, canonical_lattice(gens));
        if (O.discrd != lt.N1 * lt.N2)
            throw Error("ConstructionFailed",
                        "shaped order has discriminant " + O.discrd.get_str() + ", expected " +
                            Int(lt.N1 * lt.N2).get_str());
    }

    for (auto& p : prime_divisors(lt.M)) {
        SplitModP s = split_mod_p(O, p);
        long pl = to_long(p);
        // stabilizer of the column line e1: sigma(x) entry (1,0) = 0 mod p
        std::array<long, 4> func;
        for (int k = 0; k < 4; ++k) func[k] = s.mat[k][2];
        std::vector<FpVec> kernel;
        // solve func . x = 0 over F_p: 3-dim solution space
        int piv = -1;
        for (int k = 0; k < 4; ++k)
            if (func[k] % pl != 0) {
                piv = k;
                break;
            }
        if (piv < 0) throw Error("Internal", "Eichler functional vanished");
        long ipiv = inv_mod(func[piv], pl);
        for (int k = 0; k < 4; ++k) {
            if (k == piv) continue;
            FpVec v{0, 0, 0, 0};
            v[k] = 1;
            v[piv] = ((-(func[k] % pl) * ipiv) % pl + pl) % pl;
            kernel.push_back(v);
        }
        Lattice L = fp_sublattice(O.L, kernel, pl);
        Int want = O.discrd * p;
        O = make_order(A, L);
        if (O.discrd != want)
            throw Error("ConstructionFailed", "Eichler step at " + p.get_str() + " failed");
    }

    if (O.discrd != lt.N())
        throw Error("ConstructionFailed", "special order has wrong discriminant");
    return O;
}

SplitModP split_mod_p(const QOrder& O, const Int& p_) {
    long p = to_long(p_);
    if (O.discrd % p == 0) throw Error("Domain", "cannot split at a ramified/level prime");
    FpAlgebra alg = fp_algebra(O.A, O.L, p);
    VecQ one_c = coords_in(O.L, {Rat(1), Rat(0), Rat(0), Rat(0)});
    FpVec one{};
    for (int k = 0; k < 4; ++k) one[k] = mod_p(to_int(one_c[k]), p);

    auto scalar = [&](long c) {
        FpVec v;
        for (int k = 0; k < 4; ++k) v[k] = (one[k] * (((c % p) + p) % p)) % p;
        return v;
    };
    auto sub = [&](const FpVec& x, const FpVec& y) {
        FpVec r;
        for (int k = 0; k < 4; ++k) r[k] = ((x[k] - y[k]) % p + p) % p;
        return r;
    };
    auto smul = [&](const FpVec& x, long c) {
        FpVec r;
        c = ((c % p) + p) % p;
        for (int k = 0; k < 4; ++k) r[k] = (x[k] * c) % p;
        return r;
    };

    // find a nontrivial idempotent from an element with split minimal polynomial
    FpVec e{};
    bool found = false;
    std::vector<long> sqrt_table(p, -1);
    for (long x = 0; x < p; ++x) sqrt_table[(x * x) % p] = x;
    FpVec cand{0, 0, 0, 0};
    while (!found) {
        // advance through F_p^4
        int k = 0;
        for (; k < 4; ++k) {
            if (cand[k] < p - 1) {
                ++cand[k];
                break;
            }
            cand[k] = 0;
        }
        if (k == 4) throw Error("Internal", "no idempotent found mod p");
        long t = alg.trd(cand);
        // nrd via x(t - x) = -x^2 + t x = nrd (Cayley-Hamilton): nrd = x*(t-x) as scalar
        FpVec x2 = alg.mul(cand, cand);
        FpVec tx = smul(cand, t);
        FpVec nvec = sub(tx, x2);  // = nrd * 1
        // extract scalar against `one`
        int idx = 0;
        while (idx < 4 && one[idx] == 0) ++idx;
        long n = (nvec[idx] * inv_mod(one[idx], p)) % p;
        if (nvec != scalar(n)) continue;  // not scalar: shouldn't happen
        long d = ((t * t - 4 * n) % p + p) % p;
        if (p == 2) {
            if (t % 2 == 1 && n % 2 == 0) {
                // roots 0 and 1: e = x or x+1, whichever is idempotent
                FpVec cand2 = sub(cand, scalar(1));
                for (auto& ee : {cand, cand2}) {
                    if (alg.mul(ee, ee) == ee && !alg.is_zero(ee) && ee != one) {
                        e = ee;
                        found = true;
                        break;
                    }
                }
            }
            continue;
        }
        if (d == 0 || sqrt_table[d] < 0) continue;
        long s = sqrt_table[d];
        long lam = ((t + s) % p) * inv_mod(2, p) % p;
        long mu = (((t - s) % p + p) % p) * inv_mod(2, p) % p;
        if (lam == mu) continue;
        FpVec ee = smul(sub(cand, scalar(mu)), inv_mod(((lam - mu) % p + p) % p, p));
        if (alg.mul(ee, ee) == ee && !alg.is_zero(ee) && ee != one) {
            e = ee;
            found = true;
        }
    }

    FpVec e11 = e;
    FpVec e22 = sub(one, e);
    // e12 = e11 * b * e22 != 0 for some basis element b
    FpVec e12{}, e21{};
    bool have12 = false;
    for (int k = 0; k < 4 && !have12; ++k) {
        FpVec b{0, 0, 0, 0};
        b[k] = 1;
        FpVec v = alg.mul(alg.mul(e11, b), e22);
        if (!alg.is_zero(v)) {
            e12 = v;
            have12 = true;
        }
    }
    if (!have12) throw Error("Internal", "no e12 matrix unit");
    bool have21 = false;
    for (int k = 0; k < 4 && !have21; ++k) {
        FpVec b{0, 0, 0, 0};
        b[k] = 1;
        FpVec w = alg.mul(alg.mul(e22, b), e11);
        if (alg.is_zero(w)) continue;
        FpVec z = alg.mul(e12, w);  // should be c * e11
        int idx = 0;
        while (idx < 4 && e11[idx] == 0) ++idx;
        long c = (z[idx] * inv_mod(e11[idx] == 0 ? 1 : e11[idx], p)) % p;
        if (c == 0 || z != smul(e11, c)) continue;
        e21 = smul(w, inv_mod(c, p));
        have21 = true;
    }
    if (!have21) throw Error("Internal", "no e21 matrix unit");
    if (alg.mul(e12, e21) != e11 || alg.mul(e21, e12) != e22)
        throw Error("Internal", "matrix units inconsistent");

    auto coeff = [&](const FpVec& v) {
        int idx = 0;
        while (idx < 4 && e11[idx] == 0) ++idx;
        long c = (v[idx] * inv_mod(e11[idx], p)) % p;
        if (v != smul(e11, c)) throw Error("Internal", "not a multiple of e11");
        return c;
    };

    SplitModP out;
    out.p = p_;
    for (int k = 0; k < 4; ++k) {
        FpVec b{0, 0, 0, 0};
        b[k] = 1;
        // entries via e_{1i} x e_{j1} = x_ij e11 with e_{11}=e11, e_{12}=e12, e_{21}=e21
        out.mat[k][0] = coeff(alg.mul(alg.mul(e11, b), e11));  // (0,0)
        out.mat[k][1] = coeff(alg.mul(alg.mul(e11, b), e21));  // (0,1)
        out.mat[k][2] = coeff(alg.mul(alg.mul(e12, b), e11));  // (1,0)
        out.mat[k][3] = coeff(alg.mul(alg.mul(e12, b), e21));  // (1,1)
    }
    // verify multiplicativity on the basis
    auto mat_mul2 = [&](const std::array<long, 4>& x, const std::array<long, 4>& y) {
        std::array<long, 4> r;
        r[0] = (x[0] * y[0] + x[1] * y[2]) % p;
        r[1] = (x[0] * y[1] + x[1] * y[3]) % p;
        r[2] = (x[2] * y[0] + x[3] * y[2]) % p;
        r[3] = (x[2] * y[1] + x[3] * y[3]) % p;
        return r;
    };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::array<long, 4> lhs = mat_mul2(out.mat[i], out.mat[j]);
            std::array<long, 4> rhs{0, 0, 0, 0};
            for (int k = 0; k < 4; ++k) {
                long f = mod_p(alg.c[i][j][k], p);
                for (int idx = 0; idx < 4; ++idx)
                    rhs[idx] = (rhs[idx] + f * out.mat[k][idx]) % p;
            }
            if (lhs != rhs) throw Error("Internal", "mod-p splitting is not multiplicative");
        }
    return out;
}

}  // namespace brandtlab
