#ifndef BRANDTLAB_RATIONAL_HPP
#define BRANDTLAB_RATIONAL_HPP

#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <vector>

namespace brandtlab {

using Int = mpz_class;
using Rat = mpq_class;

// Error with a stable machine-readable code ("WrongParity", "MassMismatch", ...).
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat frac(const Int& n, const Int& d) {
    Rat r(n, d);
    r.canonicalize();
    return r;
}

inline Int num(const Rat& q) { return q.get_num(); }
inline Int den(const Rat& q) { return q.get_den(); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline Int to_int(const Rat& q) {
    if (!is_integer(q)) throw Error("Internal", "expected integer, got " + q.get_str());
    return q.get_num();
}

inline long to_long(const Int& n) {
    if (!n.fits_slong_p()) throw Error("Internal", "integer out of long range: " + n.get_str());
    return n.get_si();
}

// "num/den" with den omitted when 1; the cache and CLI formats use this.
inline std::string rat_str(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rat rat_parse(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw Error("ParseError", "bad rational: " + s);
    q.canonicalize();
    return q;
}

inline Int isqrt_floor(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r = isqrt_floor(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

// gcd of fractional ideals aZ + bZ of Q.
inline Rat rat_gcd(const Rat& a, const Rat& b) {
    if (a == 0) return abs(b);
    if (b == 0) return abs(a);
    Int d = den(a) * den(b);
    Int g = gcd(num(a) * den(b), num(b) * den(a));
    Rat r(g, d);
    r.canonicalize();
    return r;
}

inline Rat rat_abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }

inline Int floor_rat(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), num(q).get_mpz_t(), den(q).get_mpz_t());
    return r;
}

// floor(sqrt(r) - t) for r >= 0, exact.  The enumeration turns rational
// interval bounds [-sqrt(r)-t, sqrt(r)-t] into integer loops with this.
inline Int upper_root(const Rat& t, const Rat& r) {
    if (r < 0) throw Error("Internal", "upper_root with negative bound");
    Int a = isqrt_floor(num(r) * den(r));  // a/den(r) <= sqrt(r) < (a+1)/den(r)
    Int k = floor_rat(frac(a, den(r)) - t);
    while (true) {
        Rat s = Rat(k + 1) + t;
        if (s * s <= r)
            k += 1;
        else
            break;
    }
    return k;
}

// ceil(-sqrt(r) - t), exact.
inline Int lower_root(const Rat& t, const Rat& r) { return -upper_root(-t, r); }

}  // namespace brandtlab

#endif
