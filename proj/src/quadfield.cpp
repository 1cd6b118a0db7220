#include "brandtlab/quadfield.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "brandtlab/arith.hpp"

namespace brandtlab {

ImagQuadField make_field(const Int& d) {
    if (d >= 0) throw Error("NotNegative", "d must be negative, got " + d.get_str());
    if (!is_squarefree(d)) throw Error("NotSquarefree", "d must be squarefree, got " + d.get_str());
    ImagQuadField K;
    K.d = d;
    Int m4 = ((d % 4) + 4) % 4;
    K.D = (m4 == 1) ? d : 4 * d;
    K.u = (K.D == -3) ? 3 : (K.D == -4 ? 2 : 1);
    return K;
}

Int form_disc(const QuadForm& f) { return f.b * f.b - 4 * f.a * f.c; }

bool is_reduced(const QuadForm& f) {
    if (!(abs(f.b) <= f.a && f.a <= f.c)) return false;
    if ((abs(f.b) == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

QuadForm reduce_form(QuadForm f) {
    Int D = form_disc(f);
    while (!is_reduced(f)) {
        // normalize b into (-a, a]
        if (f.b > f.a || f.b <= -f.a) {
            Int q;
            Int t = f.b + f.a;
            Int m = 2 * f.a;
            mpz_fdiv_q(q.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
            Int b2 = f.b - 2 * q * f.a;           // b2 in [-a, a)
            if (b2 == -f.a) b2 = f.a;             // same class, canonical side
            f = {f.a, b2, (b2 * b2 - D) / (4 * f.a)};
        }
        if (f.c < f.a || (f.c == f.a && f.b < 0)) f = {f.c, -f.b, f.a};
    }
    return f;
}

QuadForm principal_form(const Int& D) {
    Int r = ((D % 2) + 2) % 2;
    return reduce_form({1, r, (r * r - D) / 4});
}

namespace {

// f transformed by [[x,u],[y,v]] in SL2(Z); proper equivalence
QuadForm transform(const QuadForm& f, const Int& x, const Int& y, const Int& u, const Int& v) {
    Int a2 = f.a * x * x + f.b * x * y + f.c * y * y;
    Int b2 = 2 * f.a * x * u + f.b * (x * v + y * u) + 2 * f.c * y * v;
    Int c2 = f.a * u * u + f.b * u * v + f.c * v * v;
    return {a2, b2, c2};
}

// equivalent form whose leading coefficient is coprime to m
QuadForm coprime_representative(const QuadForm& f, const Int& m) {
    for (long bound = 1; bound < 64; ++bound) {
        for (long x = -bound; x <= bound; ++x)
            for (long y = -bound; y <= bound; ++y) {
                if (std::max(labs(x), labs(y)) != bound) continue;  // new shell only
                Int xi = x, yi = y;
                if (gcd(xi, yi) != 1) continue;
                Int val = f.a * xi * xi + f.b * xi * yi + f.c * yi * yi;
                if (gcd(val, m) != 1) continue;
                // complete to SL2: x v - y u = 1
                Int u, v, g;
                mpz_gcdext(g.get_mpz_t(), v.get_mpz_t(), u.get_mpz_t(), xi.get_mpz_t(),
                           yi.get_mpz_t());
                u = -u;
                if (xi * v - yi * u != 1) throw Error("Internal", "not SL2");
                return transform(f, xi, yi, u, v);
            }
    }
    throw Error("Internal", "coprime representative search failed");
}

}  // namespace

QuadForm form_coprime_to(const QuadForm& f, const Int& m) { return coprime_representative(f, m); }

QuadForm compose_forms(const QuadForm& f, const QuadForm& g) {
    // united-forms composition: arrange gcd(a1, a2) = 1, align middle coefficients
    Int D = form_disc(f);
    if (D != form_disc(g)) throw Error("Domain", "composing forms of different discriminants");
    QuadForm f2 = coprime_representative(g, f.a);
    Int a1 = f.a, b1 = f.b, a2 = f2.a, b2 = f2.b;
    // B = b1 mod 2a1, B = b2 mod 2a2 (b1 = b2 = D mod 2 makes this consistent)
    Int m1 = 2 * a1, m2 = 2 * a2;
    Int u, v, gg;
    mpz_gcdext(gg.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t());
    // gg = 2 since gcd(a1,a2)=1; (b2-b1)/2 integer
    Int B = b1 + m1 * u * ((b2 - b1) / gg);
    Int mod = m1 * m2 / gg;
    B = ((B % mod) + mod) % mod;
    Int a3 = a1 * a2;
    Int c3 = (B * B - D) / (4 * a3);
    return reduce_form({a3, B, c3});
}

Splitting splitting(const ImagQuadField& K, const Int& p) {
    if (K.D % p == 0) return Splitting::ramified;
    if (p == 2) return (((K.D % 8) + 8) % 8 == 1) ? Splitting::split : Splitting::inert;
    return kronecker(K.D, p) == 1 ? Splitting::split : Splitting::inert;
}

QuadForm prime_form(const ImagQuadField& K, const Int& p) {
    if (splitting(K, p) == Splitting::inert)
        throw Error("InertPrime", "no prime of norm " + p.get_str() + " in Q(sqrt(" +
                                      K.d.get_str() + "))");
    for (Int b = ((K.D % 2) + 2) % 2; b <= p; b += 2) {
        if ((b * b - K.D) % (4 * p) == 0) return reduce_form({p, b, (b * b - K.D) / (4 * p)});
    }
    throw Error("Internal", "prime_form search failed");
}

int ClassGroup::index_of(const QuadForm& f) const {
    auto it = std::find(classes.begin(), classes.end(), f);
    if (it == classes.end()) throw Error("Internal", "form not in class list");
    return (int)(it - classes.begin());
}

namespace {

int order_of(const std::vector<std::vector<int>>& mul, int g) {
    int o = 1, x = g;
    while (x != 0) {
        x = mul[x][g];
        ++o;
    }
    return o;
}

int power_of(const std::vector<std::vector<int>>& mul, int g, long e) {
    int x = 0;
    long k = e;
    int base = g;
    while (k > 0) {
        if (k & 1) x = mul[x][base];
        base = mul[base][base];
        k >>= 1;
    }
    return x;
}

}  // namespace

ClassGroup class_group(const ImagQuadField& K) {
    ClassGroup G;
    G.K = K;
    Int D = K.D;
    Int amax = isqrt_floor(abs(D) / 3);
    std::vector<QuadForm> forms;
    for (Int a = 1; a <= amax; ++a) {
        for (Int b = -a; b <= a; ++b) {
            Int n = b * b - D;
            if (n % (4 * a) != 0) continue;
            QuadForm f{a, b, n / (4 * a)};
            if (!is_reduced(f)) continue;
            if (gcd(gcd(f.a, f.b), f.c) != 1) continue;
            forms.push_back(f);
        }
    }
    QuadForm one = principal_form(D);
    std::sort(forms.begin(), forms.end());
    forms.erase(std::remove(forms.begin(), forms.end(), one), forms.end());
    G.classes.push_back(one);
    for (auto& f : forms) G.classes.push_back(f);
    int h = (int)G.classes.size();
    G.mul.assign(h, std::vector<int>(h));
    G.inv.assign(h, 0);
    for (int i = 0; i < h; ++i)
        for (int j = i; j < h; ++j) {
            int k = G.index_of(compose_forms(G.classes[i], G.classes[j]));
            G.mul[i][j] = k;
            G.mul[j][i] = k;
        }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j)
            if (G.mul[i][j] == 0) G.inv[i] = j;

    // direct cyclic decomposition; greedy with solvable basis adjustment,
    // verified at the end (product of orders = h, dlogs bijective)
    std::vector<int> gens, orders;
    std::vector<int> in_sub(h, 0);
    in_sub[0] = 1;
    std::vector<std::vector<int>> dlog(h);
    long sub_size = 1;
    while (sub_size < h) {
        // order of x in the quotient by the current subgroup
        auto quotient_order = [&](int x) {
            int o = 1, y = x;
            while (!in_sub[y]) {
                y = G.mul[y][x];
                ++o;
            }
            return o;
        };
        int best_m = 0;
        for (int x = 0; x < h; ++x)
            if (!in_sub[x]) best_m = std::max(best_m, quotient_order(x));
        int chosen = -1;
        std::vector<int> adj;  // t_i : y = x * prod g_i^{-t_i}
        for (int x = 0; x < h && chosen < 0; ++x) {
            if (in_sub[x] || quotient_order(x) != best_m) continue;
            int xm = power_of(G.mul, x, best_m);
            const std::vector<int>& c = dlog[xm];
            bool ok = true;
            std::vector<int> t(gens.size(), 0);
            for (size_t i = 0; i < gens.size() && ok; ++i) {
                // solve best_m * t_i = c_i (mod orders[i])
                int d = std::gcd(best_m, orders[i]);
                if (c[i] % d != 0) {
                    ok = false;
                    break;
                }
                int mm = orders[i] / d;
                // inverse of best_m/d mod mm
                long a = (best_m / d) % mm, inv = 1;
                if (mm > 1) {
                    inv = -1;
                    for (long z = 1; z < mm; ++z)
                        if ((a * z) % mm == 1) {
                            inv = z;
                            break;
                        }
                    if (inv < 0) {
                        ok = false;
                        break;
                    }
                }
                t[i] = (int)(((long)(c[i] / d) * inv) % mm);
            }
            if (!ok) continue;
            chosen = x;
            adj = t;
        }
        if (chosen < 0) throw Error("Internal", "class group decomposition failed");
        int y = chosen;
        for (size_t i = 0; i < gens.size(); ++i)
            y = G.mul[y][power_of(G.mul, G.inv[gens[i]], adj[i])];
        if (order_of(G.mul, y) != best_m)
            throw Error("Internal", "class group basis adjustment failed");
        // extend the subgroup and dlogs
        std::vector<int> new_in(h, 0);
        std::vector<std::vector<int>> new_dlog(h);
        for (int old = 0; old < h; ++old) {
            if (!in_sub[old]) continue;
            int z = old;
            for (int k = 0; k < best_m; ++k) {
                if (new_in[z]) throw Error("Internal", "class group decomposition not direct");
                new_in[z] = 1;
                new_dlog[z] = dlog[old];
                new_dlog[z].push_back(k);
                z = G.mul[z][y];
            }
        }
        in_sub = new_in;
        dlog = new_dlog;
        gens.push_back(y);
        orders.push_back(best_m);
        sub_size *= best_m;
    }
    G.cyc_gens = gens;
    G.cyc_orders = orders;
    G.dlog = dlog;
    size_t r = gens.size();
    for (auto& v : G.dlog) v.resize(r, 0);
    G.exponent = 1;
    for (int o : orders) G.exponent = std::lcm(G.exponent, o);
    return G;
}

Cyclo ClassChar::value(int class_index) const {
    int n = G->exponent;
    long e = 0;
    for (size_t i = 0; i < exps.size(); ++i) {
        long step = n / G->cyc_orders[i];
        e += (long)exps[i] * step * G->dlog[class_index][i];
    }
    return Cyclo::root_power(n, e);
}

Cyclo ClassChar::value_inv(int class_index) const { return value(G->inv[class_index]); }

bool ClassChar::is_trivial() const {
    for (int e : exps)
        if (e != 0) return false;
    return true;
}

int ClassChar::order() const {
    int o = 1;
    for (size_t i = 0; i < exps.size(); ++i) {
        int d = G->cyc_orders[i] / std::gcd(G->cyc_orders[i], exps[i]);
        o = std::lcm(o, d);
    }
    return o;
}

int ClassChar::sign_value(int class_index) const {
    Cyclo v = value(class_index);
    if (!v.is_rational()) throw Error("Internal", "character value not rational");
    Rat r = v.rational_value();
    if (r == 1) return 1;
    if (r == -1) return -1;
    throw Error("Internal", "character value not a sign");
}

std::vector<ClassChar> characters(const ClassGroup& G) {
    auto shared = std::make_shared<ClassGroup>(G);
    std::vector<ClassChar> chars;
    std::vector<int> exps(G.cyc_orders.size(), 0);
    while (true) {
        chars.push_back(ClassChar{shared, exps});
        size_t i = 0;
        for (; i < exps.size(); ++i) {
            exps[i] = (exps[i] + 1) % G.cyc_orders[i];
            if (exps[i] != 0) break;
        }
        if (i == exps.size()) break;
    }
    if ((int)chars.size() != G.h()) throw Error("Internal", "character count mismatch");
    return chars;
}

}  // namespace brandtlab
