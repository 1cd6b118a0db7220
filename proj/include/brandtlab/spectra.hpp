#ifndef BRANDTLAB_SPECTRA_HPP
#define BRANDTLAB_SPECTRA_HPP

#include <functional>
#include <map>

#include "brandtlab/embeddings.hpp"

namespace brandtlab {

// Weighted inner product (phi, psi) = sum (1/w_i) phi_i psi_i on M(O).
Rat weighted_inner(const ClassSetData& cs, const VecQ& phi, const VecQ& psi);

// Height pairing <c, d> = sum w_i c_i conj(d_i) on complex divisors.
Cyclo height_pairing(const ClassSetData& cs, const std::vector<Cyclo>& c,
                     const std::vector<Cyclo>& d);

// 2^{omega'(N2)} vectors: phi_S(x_i) = prod_{p in S} (nrd I_i | p), S running
// over subsets of the odd primes dividing N2; S = {} gives the constant 1.
std::vector<VecQ> eisenstein_basis(const ClassSetData& cs);

// Exact orthogonal basis of the cuspidal space (complement of the Eisenstein
// span, Gram-Schmidt over Q).
std::vector<VecQ> orthogonal_cuspidal_basis(const ClassSetData& cs);

enum class LocalType { unram_steinberg, ram_steinberg, supercuspidal, one_dim_db, eichler_new,
                       eichler_old };

struct Eigensystem {
    std::vector<VecQ> basis;           // orthogonal basis of the eigenspace
    std::map<long, Rat> eigenvalues;   // lambda_m at the tested Hecke indices
    int multiplicity = 0;
    bool is_eisenstein = false;
    bool rational = true;              // exact path; numeric blocks set false
    std::vector<std::string> numeric_eigenvalues;  // per tested index, decimal
    // filled by local_type_and_level
    std::map<long, LocalType> local_types;
    Int exact_level = 0;               // N_f
};

// Simultaneous decomposition of M(O) under A_m for m <= hecke_max coprime to
// N' = N / D_B (the indices acting by scalars on every isotypic block).
// Residual irrational blocks are grouped numerically; PrecisionLoss if the
// numeric separation fails.
std::vector<Eigensystem> eigensystems(const ClassSetData& cs, long hecke_max);

// P_{K,chi}(phi) = sum_t phi(x(t)) chi^{-1}(t), exact in Q(zeta).
Cyclo period(const VecQ& phi, const ClassMapData& cmd, const ClassChar& chi);

// sum over the eigensystem's orthogonal basis of |P_{K,chi}(phi)|^2/(phi,phi)
Cyclo period_square_sum(const ClassSetData& cs, const Eigensystem& es, const ClassMapData& cmd,
                        const ClassChar& chi);

// Column orthogonality: sum_phi (T phi)(x_i) conj(phi(x_j)) / (phi,phi) =
// w_j T_ij for the full orthogonal basis; exact.
bool column_orthogonality_check(const ClassSetData& cs, const MatQ& T);

// Provider hands back (and caches) class sets for the tower of lowered level
// types used in conductor and local-type detection.
using ClassSetProvider = std::function<const ClassSetData&(const LevelType&)>;

// Local types at p | N and the exact level N_f of a cuspidal eigensystem.
// match_primes: how many Hecke eigenvalue indices are used for matching
// across orders (AmbiguousType if systems collide on all of them).
void local_type_and_level(const ClassSetData& cs, Eigensystem& es, const ClassSetProvider& tower,
                          int match_primes = 8);

// Eigenvalue of A_p on the eigensystem for p | M or p sharply dividing N1
// (scalar action verified exactly).
Rat hecke_eigenvalue_at(const ClassSetData& cs, const Eigensystem& es, const Int& p);

}  // namespace brandtlab

#endif
