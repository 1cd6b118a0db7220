#ifndef BRANDTLAB_FORMULAS_HPP
#define BRANDTLAB_FORMULAS_HPP

#include "brandtlab/spectra.hpp"

namespace brandtlab {

// Exact value coeff * pi^2 * sqrt(disc), disc squarefree (disc = 1 rational).
struct SymbolicLValue {
    Rat coeff;
    Int disc = 1;

    bool operator==(const SymbolicLValue& o) const { return coeff == o.coeff && disc == o.disc; }
    std::string str() const;
};

SymbolicLValue symbolic_normalize(const Rat& coeff, const Int& disc_raw);
SymbolicLValue symbolic_div(const SymbolicLValue& a, const SymbolicLValue& b);

// a + b sqrt(d) with exact comparisons; used for the Xi(p) certificates.
struct QuadVal {
    Rat a, b;
    Int d;

    bool less_than(const Rat& c) const;
    bool greater_than(const Rat& c) const;
    std::string str() const;
};

QuadVal xi_factor(const Int& p);  // 2((1+p^{-1/2})/(1-1/p))^2

struct VerificationReport {
    std::string identity;
    std::string inputs;
    std::string lhs;
    std::string rhs;
    bool exact_match = false;
    Rat tolerance_used = 0;
    std::string note;
};

// Shared construction cache: algebras, special orders, class sets, class
// maps, spectral data.  Class sets are rebuilt when a caller needs a larger
// coprimality modulus.
class Workspace {
  public:
    void set_cache_dir(std::string dir) { cache_dir_ = std::move(dir); }
    const std::string& cache_dir() const { return cache_dir_; }
    const ClassSetData& class_set(const LevelType& lt, const Int& coprime_extra = 1);
    const ClassMapData& map_for(const LevelType& lt, const ImagQuadField& K);
    std::vector<Eigensystem>& systems_for(const LevelType& lt, long hecke_max = 23);
    ClassSetProvider tower_provider(const Int& coprime_extra = 1);

  private:
    std::string cache_dir_;
    std::map<std::string, ClassSetData> sets_;
    std::map<std::string, ClassMapData> maps_;
    std::map<std::string, std::vector<Eigensystem>> systems_;
};

// C(K;N) = 2^{#{p | gcd(D_K,N)}-1} u_K^2 sqrt(-D_K) prod_{p|N2} 1/(1+1/p),
// returned as coeff * sqrt(disc).
SymbolicLValue C_constant(const ImagQuadField& K, const LevelType& lt);

// c(N1,N2,M) = 1/mass, verified against the mass formula.
Rat c_constant(const LevelType& lt);

Rat lambda_factor_n2(LocalType t, const Int& p);
// eq. for p | M, p not dividing N_f, with chi(p) a root of unity (+-1 here).
Rat lambda_factor_m_old(const Rat& ap, int chi_p, const Int& p);

int delta_plus(const LevelType& lt, const Int& m);
Int eis_group_order(const LevelType& lt);

// Lambda_p(f, chi) at one p | N (1 at p | N1; by local type at p | N2; 1 or
// the old-form expression at p | M); errors MissingLocalType.
Rat lambda_factor(Workspace& ws, const ClassSetData& cs, Eigensystem& es,
                  const ImagQuadField& K, const ClassChar& chi, const Int& p);

// Full Lambda_N(f, chi) * N_f / N weight of an eigensystem whose local data
// has been computed; chi evaluated through its values at the ramified/split
// prime classes.  Requires rational (quadratic) chi at old M-primes.
Rat lambda_weight(Workspace& ws, const ClassSetData& cs, Eigensystem& es,
                  const ImagQuadField& K, const ClassChar& chi);

// Double average of Prop/Cor per-avg at index m: full and cuspidal identities.
VerificationReport verify_double_average(Workspace& ws, const LevelType& lt,
                                         const ImagQuadField& K, const Int& m);

// Theorem for N = p^{2r+1}: newform double average via inclusion-exclusion.
VerificationReport verify_theorem_prime(Workspace& ws, const Int& p, int r,
                                        const ImagQuadField& K);

// Newform isolation over the Sigma-subset tower.
VerificationReport verify_thm2(Workspace& ws, const LevelType& lt, const ImagQuadField& K);

// Stable single-chi average (N2 = 1).
VerificationReport verify_stable_single(Workspace& ws, const LevelType& lt,
                                        const ImagQuadField& K, const ClassChar& chi);

VerificationReport semistable_bounds_check(Workspace& ws, const LevelType& lt,
                                           const ImagQuadField& K);

// Hom-space vanishing test (per prime conditions at ramified places).
bool hom_vanishes(Workspace& ws, const ClassSetData& cs, Eigensystem& es,
                  const ImagQuadField& K, const ClassChar& chi);

// Predicted L_fin(1/2,f,chi)/(f,f); throws HomVanishes when the period is
// forced to zero.
SymbolicLValue predicted_lvalue(Workspace& ws, const ClassSetData& cs, Eigensystem& es,
                                const ImagQuadField& K, const ClassChar& chi);

struct BoundReport {
    std::string shape;
    Rat exact_average = 0;     // eq:lower-bound1 LHS when computable
    bool have_exact = false;
    Rat elementary_bound = 0;  // closed-form lower bound
    QuadVal xi{0, 0, 1};
    bool uses_xi = false;
    bool certificate = false;  // guaranteed nonvanishing
    std::string note;
};

BoundReport lower_bounds_and_certificates(Workspace& ws, const LevelType& lt,
                                          const ImagQuadField& K);

}  // namespace brandtlab

#endif
