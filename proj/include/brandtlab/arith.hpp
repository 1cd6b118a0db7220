#ifndef BRANDTLAB_ARITH_HPP
#define BRANDTLAB_ARITH_HPP

#include <utility>
#include <vector>

#include "brandtlab/rational.hpp"

namespace brandtlab {

bool is_prime(const Int& n);

// Prime factorization with strictly increasing primes; factorize(1) = {}.
std::vector<std::pair<Int, int>> factorize(const Int& n);

std::vector<Int> prime_divisors(const Int& n);

int valuation(Int n, const Int& p);

// Kronecker symbol (a|n), completely multiplicative in n.
int kronecker(const Int& a, const Int& n);

bool is_squarefree(const Int& n);

// n = squarefree_part * square_part^2 with squarefree_part squarefree.
Int squarefree_part(const Int& n);

// Primes in [2, bound].
std::vector<long> primes_up_to(long bound);

// Hilbert symbol (a,b)_p at a finite prime p, and at the real place.
int hilbert_symbol(const Rat& a, const Rat& b, const Int& p);
int hilbert_symbol_inf(const Rat& a, const Rat& b);

Int euler_phi(const Int& n);

}  // namespace brandtlab

#endif
