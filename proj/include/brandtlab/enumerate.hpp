#ifndef BRANDTLAB_ENUMERATE_HPP
#define BRANDTLAB_ENUMERATE_HPP

#include <vector>

#include "brandtlab/matq.hpp"

namespace brandtlab {

// Symmetric positive definite rational Gram matrix, dim 1..4.
struct Gram {
    MatQ g;
    int dim() const { return g.rows; }
    Rat eval(const VecQ& v) const;
    Rat eval_int(const VecZ& v) const;
};

Gram make_gram(const MatQ& g);  // validates symmetry + positive definiteness
bool is_positive_definite(const MatQ& g);

// All integer vectors x with (x+c)^T G (x+c) = target, in lexicographic order.
// target = 0 yields the solutions with x+c = 0 (just x = 0 when c = 0).
std::vector<VecZ> enumerate_by_norm_shifted(const Gram& G, const VecQ& center, const Rat& target);
std::vector<VecZ> enumerate_by_norm(const Gram& G, const Rat& target);

// All x with 0 < (x+c)^T G (x+c) <= bound.
std::vector<VecZ> enumerate_up_to(const Gram& G, const VecQ& center, const Rat& bound);

// Least value of v^T G v over nonzero integer v.
Rat minimal_positive_norm(const Gram& G);

}  // namespace brandtlab

#endif
