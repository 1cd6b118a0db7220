#include "brandtlab/cyclo.hpp"

#include <map>

#include "brandtlab/arith.hpp"

namespace brandtlab {

namespace {

// exact division of integer polynomials (little-endian coefficients)
std::vector<Int> poly_div_exact(std::vector<Int> a, const std::vector<Int>& b) {
    std::vector<Int> q(a.size() - b.size() + 1);
    for (int i = (int)q.size() - 1; i >= 0; --i) {
        Int coef = a[i + b.size() - 1] / b.back();
        q[i] = coef;
        for (size_t j = 0; j < b.size(); ++j) a[i + j] -= coef * b[j];
    }
    for (auto& x : a)
        if (x != 0) throw Error("Internal", "inexact cyclotomic division");
    return q;
}

std::map<int, std::vector<Int>>& cyclo_cache() {
    static std::map<int, std::vector<Int>> cache;
    return cache;
}

}  // namespace

std::vector<Int> cyclotomic_poly(int n) {
    auto& cache = cyclo_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    // x^n - 1 divided by the product of Phi_d for proper divisors d
    std::vector<Int> p(n + 1);
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d)
        if (n % d == 0) p = poly_div_exact(p, cyclotomic_poly(d));
    cache[n] = p;
    return p;
}

Cyclo Cyclo::zero(int n) {
    Cyclo z;
    z.n = n;
    z.c.assign((size_t)to_long(euler_phi(n)), Rat(0));
    return z;
}

Cyclo Cyclo::from_rat(int n, const Rat& r) {
    Cyclo z = zero(n);
    z.c[0] = r;
    return z;
}

namespace {

// reduce a power-basis polynomial (arbitrary degree) mod Phi_n
Cyclo reduce_poly(int n, std::vector<Rat> p) {
    auto phi = cyclotomic_poly(n);
    size_t deg = phi.size() - 1;
    if (p.size() < deg) p.resize(deg);
    for (int i = (int)p.size() - 1; i >= (int)deg; --i) {
        if (p[i] == 0) continue;
        Rat coef = p[i];  // phi is monic
        for (size_t j = 0; j < phi.size(); ++j) p[i - deg + j] -= coef * Rat(phi[j]);
    }
    p.resize(deg);
    Cyclo z;
    z.n = n;
    z.c = p;
    return z;
}

}  // namespace

Cyclo Cyclo::root_power(int n, long k) {
    k %= n;
    if (k < 0) k += n;
    std::vector<Rat> p(k + 1);
    p[k] = 1;
    return reduce_poly(n, p);
}

bool Cyclo::is_zero() const {
    for (auto& x : c)
        if (x != 0) return false;
    return true;
}

bool Cyclo::is_rational() const {
    for (size_t i = 1; i < c.size(); ++i)
        if (c[i] != 0) return false;
    return true;
}

Rat Cyclo::rational_value() const {
    if (!is_rational()) throw Error("Internal", "cyclotomic value not rational");
    return c[0];
}

Cyclo cy_add(const Cyclo& a, const Cyclo& b) {
    Cyclo r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}

Cyclo cy_sub(const Cyclo& a, const Cyclo& b) {
    Cyclo r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
    return r;
}

Cyclo cy_mul(const Cyclo& a, const Cyclo& b) {
    std::vector<Rat> p(a.c.size() + b.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) p[i + j] += a.c[i] * b.c[j];
    }
    return reduce_poly(a.n, p);
}

Cyclo cy_scale(const Cyclo& a, const Rat& r) {
    Cyclo z = a;
    for (auto& x : z.c) x *= r;
    return z;
}

Cyclo cy_conj(const Cyclo& a) {
    // zeta^k -> zeta^{n-k}
    Cyclo r = Cyclo::zero(a.n);
    for (size_t k = 0; k < a.c.size(); ++k) {
        if (a.c[k] == 0) continue;
        r = cy_add(r, cy_scale(Cyclo::root_power(a.n, (long)((a.n - k) % a.n)), a.c[k]));
    }
    return r;
}

Cyclo cy_norm_sq(const Cyclo& a) { return cy_mul(a, cy_conj(a)); }

}  // namespace brandtlab
