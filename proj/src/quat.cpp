#include "brandtlab/quat.hpp"

#include <algorithm>
#include <set>

namespace brandtlab {

Quat q_add(const Quat& p, const Quat& q) { return {p.w + q.w, p.x + q.x, p.y + q.y, p.z + q.z}; }
Quat q_sub(const Quat& p, const Quat& q) { return {p.w - q.w, p.x - q.x, p.y - q.y, p.z - q.z}; }
Quat q_scale(const Quat& p, const Rat& c) { return {p.w * c, p.x * c, p.y * c, p.z * c}; }

Quat q_mul(const QuatAlgebra& A, const Quat& p, const Quat& q) {
    const Rat a(A.a), b(A.b);
    Quat r;
    r.w = p.w * q.w + a * p.x * q.x + b * p.y * q.y - a * b * p.z * q.z;
    r.x = p.w * q.x + p.x * q.w - b * p.y * q.z + b * p.z * q.y;
    r.y = p.w * q.y + p.y * q.w + a * p.x * q.z - a * p.z * q.x;
    r.z = p.w * q.z + p.z * q.w + p.x * q.y - p.y * q.x;
    return r;
}

Quat q_conj(const Quat& p) { return {p.w, -p.x, -p.y, -p.z}; }

Rat q_trd(const Quat& p) { return 2 * p.w; }

Rat q_nrd(const QuatAlgebra& A, const Quat& p) {
    Rat a(A.a), b(A.b);
    Rat r = p.w * p.w;
    r -= a * p.x * p.x;
    r -= b * p.y * p.y;
    r += a * b * p.z * p.z;
    return r;
}

Quat q_inv(const QuatAlgebra& A, const Quat& p) {
    Rat n = q_nrd(A, p);
    if (n == 0) throw Error("ZeroLattice", "inverting a zero-norm quaternion");
    return q_scale(q_conj(p), 1 / n);
}

std::vector<Int> ramified_primes(const Int& a, const Int& b) {
    std::set<Int> candidates{2};
    for (auto& p : prime_divisors(a)) candidates.insert(p);
    for (auto& p : prime_divisors(b)) candidates.insert(p);
    std::vector<Int> ram;
    for (auto& p : candidates)
        if (hilbert_symbol(Rat(a), Rat(b), p) == -1) ram.push_back(p);
    std::sort(ram.begin(), ram.end());
    return ram;
}

QuatAlgebra make_algebra(const Int& a, const Int& b) {
    if (a == 0 || b == 0) throw Error("Domain", "algebra parameters must be nonzero");
    QuatAlgebra A{a, b, 1};
    Int d = 1;
    for (auto& p : ramified_primes(a, b)) d *= p;
    A.disc = d;
    return A;
}

QuatAlgebra algebra_from_level_disc(const Int& DB) {
    auto ps = prime_divisors(DB);
    if (ps.size() % 2 == 0) throw Error("Domain", "discriminant needs an odd number of primes");
    for (long bound = 1; bound <= 400; ++bound)
        for (long aa = 1; aa <= bound; ++aa) {
            Int a = -aa, b = -bound;
            if (hilbert_symbol_inf(Rat(a), Rat(b)) != -1) continue;
            QuatAlgebra A = make_algebra(a, b);
            if (A.disc == DB) return A;
        }
    throw Error("ConstructionFailed", "no small definite algebra of discriminant " + DB.get_str());
}

}  // namespace brandtlab
