#include "brandtlab/enumerate.hpp"

#include <algorithm>

namespace brandtlab {

Rat Gram::eval(const VecQ& v) const { return dot(v, mat_apply(g, v)); }

Rat Gram::eval_int(const VecZ& v) const {
    VecQ w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = Rat(v[i]);
    return eval(w);
}

bool is_positive_definite(const MatQ& g) {
    // leading principal minors
    for (int k = 1; k <= g.rows; ++k) {
        MatQ sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub.at(i, j) = g.at(i, j);
        if (det(sub) <= 0) return false;
    }
    return true;
}

Gram make_gram(const MatQ& g) {
    if (g.rows != g.cols || g.rows < 1 || g.rows > 4)
        throw Error("Domain", "gram must be n x n with 1 <= n <= 4");
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j)
            if (g.at(i, j) != g.at(j, i)) throw Error("Domain", "gram not symmetric");
    if (!is_positive_definite(g)) throw Error("Domain", "gram not positive definite");
    return Gram{g};
}

namespace {

// Exact rational Cholesky data: Q(x) = sum_i d[i] * (x_i + sum_{j>i} u[i][j] x_j)^2.
struct Chol {
    int n;
    std::vector<Rat> d;
    MatQ u;
};

Chol decompose(const Gram& G) {
    int n = G.dim();
    MatQ q = G.g;
    Chol ch{n, std::vector<Rat>(n), MatQ(n, n)};
    for (int i = 0; i < n; ++i) {
        ch.d[i] = q.at(i, i);
        if (ch.d[i] <= 0) throw Error("Domain", "gram not positive definite");
        for (int j = i + 1; j < n; ++j) ch.u.at(i, j) = q.at(i, j) / ch.d[i];
        for (int j = i + 1; j < n; ++j)
            for (int k = j; k < n; ++k) q.at(j, k) -= q.at(i, j) * q.at(i, k) / ch.d[i];
    }
    return ch;
}

// Depth-first over coordinates x_{n-1}, ..., x_0 with exact interval bounds.
// mode_exact: collect Q = target; otherwise collect 0 < Q <= target.
void search(const Chol& ch, const VecQ& center, const Rat& target, bool mode_exact,
            std::vector<VecZ>& out) {
    int n = ch.n;
    VecZ x(n);
    std::vector<Rat> rem(n + 1);  // remaining budget at each level
    rem[n - 1] = target;
    // shift_i = c_i + sum_{j>i} u_ij (x_j + c_j), maintained per level
    std::vector<Rat> shift(n);
    int i = n - 1;
    std::vector<Int> lo(n), hi(n);
    std::vector<bool> started(n, false);

    auto level_shift = [&](int lvl) {
        Rat s = center[lvl];
        for (int j = lvl + 1; j < n; ++j)
            if (ch.u.at(lvl, j) != 0) s += ch.u.at(lvl, j) * (Rat(x[j]) + center[j]);
        return s;
    };

    while (i < n) {
        if (!started[i]) {
            shift[i] = level_shift(i);
            Rat bound = rem[i] / ch.d[i];
            if (bound < 0) {
                ++i;
                if (i < n) x[i] += 1;
                continue;
            }
            lo[i] = lower_root(shift[i], bound);
            hi[i] = upper_root(shift[i], bound);
            x[i] = lo[i];
            started[i] = true;
        }
        if (x[i] > hi[i]) {
            started[i] = false;
            ++i;
            if (i < n) x[i] += 1;
            continue;
        }
        Rat term = Rat(x[i]) + shift[i];
        Rat used = ch.d[i] * term * term;
        if (i == 0) {
            Rat q = rem[0] - used;  // target - Q(x)
            if (mode_exact ? (q == 0) : (q >= 0 && q < target)) out.push_back(x);
            if (!mode_exact && q >= 0 && q == target) {
                // Q(x) == 0 exactly: skip (only the shifted origin)
            }
            x[0] += 1;
        } else {
            rem[i - 1] = rem[i] - used;
            --i;
        }
    }
}

}  // namespace

std::vector<VecZ> enumerate_by_norm_shifted(const Gram& G, const VecQ& center, const Rat& target) {
    if (target < 0) throw Error("Domain", "negative norm target");
    std::vector<VecZ> out;
    search(decompose(G), center, target, true, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VecZ> enumerate_by_norm(const Gram& G, const Rat& target) {
    return enumerate_by_norm_shifted(G, VecQ(G.dim()), target);
}

std::vector<VecZ> enumerate_up_to(const Gram& G, const VecQ& center, const Rat& bound) {
    if (bound < 0) throw Error("Domain", "negative bound");
    std::vector<VecZ> out;
    search(decompose(G), center, bound, false, out);
    std::sort(out.begin(), out.end());
    return out;
}

Rat minimal_positive_norm(const Gram& G) {
    // Values of the form lie in (1/q)Z for q = lcm of entry denominators, and
    // the minimum is at most the least diagonal entry.
    Rat best;
    bool have = false;
    for (int i = 0; i < G.dim(); ++i)
        if (!have || G.g.at(i, i) < best) {
            best = G.g.at(i, i);
            have = true;
        }
    auto pts = enumerate_up_to(G, VecQ(G.dim()), best);
    Rat mn = best;
    for (auto& v : pts) {
        Rat q = G.eval_int(v);
        if (q > 0 && q < mn) mn = q;
    }
    return mn;
}

}  // namespace brandtlab
