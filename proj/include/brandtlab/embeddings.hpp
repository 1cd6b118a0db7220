#ifndef BRANDTLAB_EMBEDDINGS_HPP
#define BRANDTLAB_EMBEDDINGS_HPP

#include "brandtlab/classset.hpp"
#include "brandtlab/quadfield.hpp"

namespace brandtlab {

// o_K -> O embedding together with the induced class map Cl(K) -> Cl(O).
struct ClassMapData {
    ImagQuadField K;
    Quat generator_image;     // image of omega_K (right trace and norm)
    int base_class;           // class whose left order receives the embedding
    std::vector<Int> fibers;  // h_i, indexed like the class set
    std::vector<int> images;  // K-class index (ClassGroup order) -> class index
};

enum class StabStatus { unstable, semistable, stable };

struct StabilityReport {
    StabStatus status;
    bool balanced;
    Int sum_wh;                 // sum w_i h_i
    bool disc_stable_sufficient;  // D_B > |D_K| with gcd(D_B, D_K) = 1
};

// Admissibility of K for the level type (embedding into the genus exists).
bool admissible(const ImagQuadField& K, const LevelType& lt, std::string* reason = nullptr);

// Local optimal embedding count at p | N; errors PrimeNotDividingLevel.
Int local_embedding_count(const ImagQuadField& K, const Int& p, const LevelType& lt);

// Optimal embeddings of o_K into one order, counted modulo unit conjugation.
Int embedding_count(const ImagQuadField& K, const QOrder& O);

// sum_i #Emb(o_K, O_l(I_i)) = h_K * prod_p #Emb(o_{K,p}, O_p)
bool check_global_embedding_identity(const ImagQuadField& K, const ClassSetData& cs,
                                     Int* lhs = nullptr, Int* rhs = nullptr);

// Embedding seed: the image of omega_K and the class whose left order
// receives it (first in presentation order); errors NotAdmissible.
std::pair<Quat, int> find_embedding(const ImagQuadField& K, const ClassSetData& cs);

// Fix an embedding (via find_embedding) and compute the full ideal class map;
// errors NotAdmissible.
ClassMapData class_map(const ImagQuadField& K, const ClassSetData& cs);

bool balanced_criterion(const LevelType& lt);

StabilityReport stability_status(const ClassMapData& cmd, const ClassSetData& cs);

}  // namespace brandtlab

#endif
