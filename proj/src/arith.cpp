#include "brandtlab/arith.hpp"

#include <algorithm>
#include <map>

namespace brandtlab {

bool is_prime(const Int& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

namespace {

Int pollard_rho(const Int& n) {
    if (n % 2 == 0) return 2;
    Int x = 2, y = 2, d = 1, c = 1;
    while (true) {
        x = 2;
        y = 2;
        d = 1;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            d = gcd(abs(x - y), n);
        }
        if (d != n) return d;
        c += 1;
    }
}

void factor_into(Int n, std::map<Int, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out[n] += 1;
        return;
    }
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
        if (n % p == 0) {
            out[Int(p)] += 1;
            factor_into(n / p, out);
            return;
        }
    }
    Int d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<Int, int>> factorize(const Int& n) {
    if (n < 1) throw Error("Domain", "factorize requires n >= 1");
    std::map<Int, int> m;
    factor_into(n, m);
    return {m.begin(), m.end()};
}

std::vector<Int> prime_divisors(const Int& n) {
    std::vector<Int> ps;
    for (auto& [p, e] : factorize(abs(n) == 0 ? Int(1) : abs(n))) ps.push_back(p);
    return ps;
}

int valuation(Int n, const Int& p) {
    if (n == 0) throw Error("Domain", "valuation of 0");
    int v = 0;
    n = abs(n);
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

int kronecker(const Int& a, const Int& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

bool is_squarefree(const Int& n) {
    if (n == 0) return false;
    for (auto& [p, e] : factorize(abs(n)))
        if (e > 1) return false;
    return true;
}

Int squarefree_part(const Int& n) {
    if (n == 0) return 0;
    Int core = n < 0 ? -1 : 1;
    for (auto& [p, e] : factorize(abs(n)))
        if (e % 2) core *= p;
    return core;
}

std::vector<long> primes_up_to(long bound) {
    std::vector<bool> sieve(std::max(bound + 1, 2L), true);
    std::vector<long> ps;
    for (long i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        ps.push_back(i);
        for (long j = 2 * i; j <= bound; j += i) sieve[j] = false;
    }
    return ps;
}

namespace {

// Legendre symbol of a unit u mod odd p.
int legendre_unit(const Int& u, const Int& p) { return kronecker(u, p); }

}  // namespace

int hilbert_symbol(const Rat& a0, const Rat& b0, const Int& p) {
    if (a0 == 0 || b0 == 0) throw Error("Domain", "hilbert symbol of 0");
    // clear squares: only the class of a,b in Q_p^x / (Q_p^x)^2 matters
    Int a = num(a0) * den(a0), b = num(b0) * den(b0);
    int alpha = valuation(a, p), beta = valuation(b, p);
    Int u = a, v = b;
    for (int i = 0; i < alpha; ++i) u /= p;
    for (int i = 0; i < beta; ++i) v /= p;
    alpha %= 2;
    beta %= 2;
    if (p == 2) {
        auto eps = [](const Int& x) { return ((x - 1) / 2) % 2 != 0; };   // (x-1)/2 mod 2
        auto omega = [](const Int& x) { return ((x * x - 1) / 8) % 2 != 0; };  // (x^2-1)/8 mod 2
        bool e = (eps(u) && eps(v)) ^ (alpha && omega(v)) ^ (beta && omega(u));
        return e ? -1 : 1;
    }
    int sign = 1;
    if (alpha && beta && ((p - 1) / 2) % 2 != 0) sign = -sign;
    if (beta) sign *= legendre_unit(u, p);
    if (alpha) sign *= legendre_unit(v, p);
    return sign;
}

int hilbert_symbol_inf(const Rat& a, const Rat& b) { return (a < 0 && b < 0) ? -1 : 1; }

Int euler_phi(const Int& n) {
    Int r = 1;
    for (auto& [p, e] : factorize(n)) {
        r *= p - 1;
        for (int i = 1; i < e; ++i) r *= p;
    }
    return r;
}

}  // namespace brandtlab
