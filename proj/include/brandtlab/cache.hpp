#ifndef BRANDTLAB_CACHE_HPP
#define BRANDTLAB_CACHE_HPP

#include <string>

#include "json.hpp"

#include "brandtlab/formulas.hpp"

namespace brandtlab {

using Json = nlohmann::ordered_json;

// Versioned cache documents keyed by (a, b, N1, N2, M); rationals serialized
// as "num/den" strings.
Json classset_to_json(const ClassSetData& cs);
ClassSetData classset_from_json(const Json& j);

Json brandt_to_json(const Int& m, const MatQ& am);
Json classmap_to_json(const ClassMapData& cmd);
Json eigensystem_to_json(const Eigensystem& es);
Json report_to_json(const VerificationReport& rep);
Json symbolic_to_json(const SymbolicLValue& v);

std::string cache_file_name(const ClassSetData& cs);
std::string cache_file_name(const QuatAlgebra& A, const LevelType& lt);

// Load/store a class set under dir; returns false when absent or stale.
bool load_classset(const std::string& dir, const QuatAlgebra& A, const LevelType& lt,
                   const Int& min_modulus, ClassSetData& out);
void store_classset(const std::string& dir, const ClassSetData& cs);

}  // namespace brandtlab

#endif
