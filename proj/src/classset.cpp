#include "brandtlab/classset.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace brandtlab {

Rat ideal_norm(const QuatAlgebra& A, const Lattice& I) { return qlat_norm(A, I); }

Lattice ideal_product(const QuatAlgebra& A, const Lattice& I, const Lattice& J) {
    return qlat_mul(A, I, J);
}

Lattice ideal_inverse(const QuatAlgebra& A, const Lattice& I) { return qlat_inverse(A, I); }

bool is_equivalent(const QuatAlgebra& A, const Lattice& I, const Lattice& J) {
    if (I == J) return true;
    Lattice L = qlat_mul(A, I, qlat_inverse(A, J));
    Rat alpha = qlat_norm(A, L);
    MatQ g = qlat_gram(A, L);
    for (auto& x : g.a) x /= alpha;
    return !enumerate_by_norm(make_gram(g), 1).empty();
}

namespace {

// neighbor ideals of the base order at p: kernels of the p+1 row functionals
std::vector<Lattice> order_neighbors(const QOrder& O, const Int& p) {
    SplitModP s = split_mod_p(O, p);
    long pl = to_long(p);
    std::vector<std::pair<long, long>> lines;  // row vectors (v0, v1) in P^1
    lines.push_back({1, 0});
    for (long t = 0; t < pl; ++t) lines.push_back({t, 1});
    std::vector<Lattice> result;
    for (auto& [v0, v1] : lines) {
        // conditions: v . sigma(x) = 0: two linear functionals on F_p^4
        // col 0: v0 m[k][0] + v1 m[k][2]; col 1: v0 m[k][1] + v1 m[k][3]
        std::array<long, 4> f0, f1;
        for (int k = 0; k < 4; ++k) {
            f0[k] = (v0 * s.mat[k][0] + v1 * s.mat[k][2]) % pl;
            f1[k] = (v0 * s.mat[k][1] + v1 * s.mat[k][3]) % pl;
        }
        // kernel of both functionals over F_p (dimension 2)
        std::vector<std::array<long, 4>> rows;
        rows.push_back(f0);
        rows.push_back(f1);
        // gaussian elimination to echelon
        std::vector<int> pivots;
        int r = 0;
        for (int col = 0; col < 4 && r < (int)rows.size(); ++col) {
            int sel = -1;
            for (int i = r; i < (int)rows.size(); ++i)
                if (((rows[i][col] % pl) + pl) % pl != 0) {
                    sel = i;
                    break;
                }
            if (sel < 0) continue;
            std::swap(rows[sel], rows[r]);
            long inv = 1;
            {
                long a = ((rows[r][col] % pl) + pl) % pl;
                for (long t = 1; t < pl; ++t)
                    if ((a * t) % pl == 1) inv = t;
            }
            for (int j = 0; j < 4; ++j) rows[r][j] = ((rows[r][j] * inv) % pl + pl) % pl;
            for (int i = 0; i < (int)rows.size(); ++i) {
                if (i == r) continue;
                long f = ((rows[i][col] % pl) + pl) % pl;
                if (f == 0) continue;
                for (int j = 0; j < 4; ++j)
                    rows[i][j] = ((rows[i][j] - f * rows[r][j]) % pl + pl) % pl;
            }
            pivots.push_back(col);
            ++r;
        }
        std::vector<std::array<long, 4>> kernel;
        std::array<bool, 4> isp{false, false, false, false};
        for (int c : pivots) isp[c] = true;
        for (int col = 0; col < 4; ++col) {
            if (isp[col]) continue;
            std::array<long, 4> v{0, 0, 0, 0};
            v[col] = 1;
            for (size_t rr = 0; rr < pivots.size(); ++rr)
                if (pivots[rr] < col) v[pivots[rr]] = ((-rows[rr][col]) % pl + pl) % pl;
            kernel.push_back(v);
        }
        // lift kernel + p O
        std::vector<VecQ> gens;
        for (auto& v : kernel) {
            VecQ lift(4);
            for (int k = 0; k < 4; ++k) {
                if (v[k] == 0) continue;
                VecQ row = O.L.basis_row(k);
                for (int c = 0; c < 4; ++c) lift[c] += Rat(v[k]) * row[c];
            }
            gens.push_back(lift);
        }
        for (int k = 0; k < 4; ++k) {
            VecQ row = O.L.basis_row(k);
            for (auto& q : row) q *= p;
            gens.push_back(row);
        }
        Lattice I = canonical_lattice(gens);
        if (qlat_norm(O.A, I) != p) throw Error("Internal", "neighbor has wrong norm");
        result.push_back(I);
    }
    return result;
}

// gamma in I with nrd(gamma)/nrd(I) coprime to p, of small norm
Quat local_generator(const QuatAlgebra& A, const Lattice& I, const Int& p) {
    Rat nI = qlat_norm(A, I);
    Gram g = make_gram(qlat_gram(A, I));
    for (int k = 1; k <= 64; ++k) {
        if (Int(k) % p == 0) continue;
        auto pts = enumerate_by_norm(g, nI * k);
        if (!pts.empty()) {
            VecQ v(4);
            for (int c = 0; c < 4; ++c)
                for (int kk = 0; kk < 4; ++kk) v[c] += Rat(pts[0][kk]) * I.basis_row(kk)[c];
            return q_of(v);
        }
    }
    throw Error("Internal", "no local generator coprime to p");
}

}  // namespace

ClassSetData right_ideal_classes(const QOrder& O, const LevelType& lt,
                                 const Int& coprime_modulus) {
    Rat target = mass_formula(lt);
    ClassSetData cs;
    cs.A = O.A;
    cs.level = lt;
    cs.O = O;
    cs.coprime_modulus = coprime_modulus;
    cs.mass = target;

    auto add_class = [&](const Lattice& I) {
        QOrder left = make_order(O.A, left_order_of(O.A, I));
        cs.ideals.push_back(I);
        cs.left_orders.push_back(left);
        cs.weights.push_back(left.unit_half_count());
        cs.norms.push_back(qlat_norm(O.A, I));
    };

    add_class(O.L);
    Rat found = frac(1, cs.weights[0]);

    std::vector<Int> bfs_primes;
    for (long q = 2; q < 200 && bfs_primes.size() < 4; ++q)
        if (is_prime(q) && gcd(Int(q), coprime_modulus) == 1) bfs_primes.push_back(q);
    if (bfs_primes.empty()) throw Error("Domain", "no BFS prime coprime to the modulus");

    for (auto& p : bfs_primes) {
        if (found == target) break;
        auto base_neighbors = order_neighbors(O, p);
        std::deque<Lattice> queue;
        for (auto& I : cs.ideals) queue.push_back(I);
        size_t processed = 0;
        while (!queue.empty() && found != target) {
            Lattice I = queue.front();
            queue.pop_front();
            ++processed;
            Quat gamma = local_generator(O.A, I, p);
            for (auto& Nv : base_neighbors) {
                if (found == target) break;
                // gamma Nv + p I
                Lattice gN = qlat_mul_elem(O.A, gamma, Nv);
                Lattice pI = qlat_scale(I, Rat(p));
                Lattice J = lattice_sum(gN, pI);
                bool known = false;
                for (auto& rep : cs.ideals)
                    if (is_equivalent(O.A, J, rep)) {
                        known = true;
                        break;
                    }
                if (!known) {
                    add_class(J);
                    found += frac(1, cs.weights.back());
                    if (found == target) break;
                    queue.push_back(J);
                }
            }
            if (processed > 4096) break;
        }
    }
    if (found != target)
        throw Error("MassMismatch", "search found mass " + rat_str(found) + ", expected " +
                                        rat_str(target));

    // presentation order: weights > 1 first (ascending), then weight-1 classes
    std::vector<int> idx(cs.ideals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        bool a1 = cs.weights[a] == 1, b1 = cs.weights[b] == 1;
        if (a1 != b1) return !a1;
        if (!a1 && cs.weights[a] != cs.weights[b]) return cs.weights[a] < cs.weights[b];
        return false;
    });
    ClassSetData out = cs;
    for (size_t i = 0; i < idx.size(); ++i) {
        out.ideals[i] = cs.ideals[idx[i]];
        out.left_orders[i] = cs.left_orders[idx[i]];
        out.weights[i] = cs.weights[idx[i]];
        out.norms[i] = cs.norms[idx[i]];
    }
    return out;
}

ClassSetData rebase(const ClassSetData& cs, int k) {
    ClassSetData out = cs;
    out.O = cs.left_orders[k];
    Lattice inv = qlat_inverse(cs.A, cs.ideals[k]);
    for (int j = 0; j < cs.n(); ++j) {
        out.ideals[j] = qlat_mul(cs.A, cs.ideals[j], inv);
        out.norms[j] = qlat_norm(cs.A, out.ideals[j]);
    }
    return out;
}

MatQ brandt_matrix(const ClassSetData& cs, const Int& m) {
    if (m < 1) throw Error("Domain", "Brandt index must be positive");
    int n = cs.n();
    MatQ am(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Lattice L = qlat_mul(cs.A, cs.ideals[i], qlat_inverse(cs.A, cs.ideals[j]));
            Rat alpha = qlat_norm(cs.A, L);
            Gram g = make_gram(qlat_gram(cs.A, L));
            long count = (long)enumerate_by_norm(g, Rat(m) * alpha).size();
            Rat entry = frac(count, 2 * cs.weights[j]);
            if (!is_integer(entry)) throw Error("Internal", "non-integral Brandt entry");
            am.at(i, j) = entry;
        }
    }
    return am;
}

Int brandt_degree(const MatQ& am) {
    Int deg = 0;
    for (int j = 0; j < am.cols; ++j) deg += to_int(am.at(0, j));
    for (int i = 1; i < am.rows; ++i) {
        Int s = 0;
        for (int j = 0; j < am.cols; ++j) s += to_int(am.at(i, j));
        if (s != deg) throw Error("Internal", "Brandt row sums differ");
    }
    return deg;
}

}  // namespace brandtlab
