#include "brandtlab/embeddings.hpp"

#include <algorithm>
#include <set>

namespace brandtlab {

bool admissible(const ImagQuadField& K, const LevelType& lt, std::string* reason) {
    auto fail = [&](const std::string& r) {
        if (reason) *reason = r;
        return false;
    };
    for (auto& p : prime_divisors(lt.N1 * lt.N2))
        if (splitting(K, p) == Splitting::split)
            return fail("K split at " + p.get_str() + " | N1 N2");
    for (auto& [p, e] : factorize(lt.N1))
        if (e > 1 && splitting(K, p) == Splitting::ramified)
            return fail("K ramified at " + p.get_str() + " with " + p.get_str() + "^3 | N1");
    for (auto& p : prime_divisors(lt.N2))
        if (splitting(K, p) != Splitting::ramified)
            return fail("K not ramified at " + p.get_str() + " | N2");
    for (auto& p : prime_divisors(lt.M))
        if (splitting(K, p) == Splitting::inert)
            return fail("K inert at " + p.get_str() + " | M");
    if (reason) reason->clear();
    return true;
}

Int local_embedding_count(const ImagQuadField& K, const Int& p, const LevelType& lt) {
    if (lt.N() % p != 0)
        throw Error("PrimeNotDividingLevel", p.get_str() + " does not divide " + lt.N().get_str());
    Splitting s = splitting(K, p);
    if (lt.N1 % p == 0) {
        if (s == Splitting::inert) return 2;
        if (s == Splitting::split) return 0;
        return valuation(lt.N1, p) == 1 ? 1 : 0;
    }
    if (lt.N2 % p == 0) return s == Splitting::ramified ? Int(p + 1) : Int(0);
    // p | M
    if (s == Splitting::inert) return 0;
    return s == Splitting::ramified ? 1 : 2;
}

namespace {

// integer kernel and particular solution of sum c_k t_k = t over Z^4
bool trace_solve(const std::array<Int, 4>& tk, const Int& t, VecZ& particular,
                 std::vector<VecZ>& kernel) {
    // Hermite-style reduction of the row vector
    std::vector<VecZ> rows;  // [coeffs | value]
    for (int k = 0; k < 4; ++k) {
        VecZ r(5, 0);
        r[k] = 1;
        r[4] = tk[k];
        rows.push_back(r);
    }
    // reduce the value column to (g, 0, 0, 0)
    while (true) {
        int nz = -1, cnt = 0;
        for (int i = 0; i < 4; ++i)
            if (rows[i][4] != 0) {
                ++cnt;
                if (nz < 0 || abs(rows[i][4]) < abs(rows[nz][4])) nz = i;
            }
        if (cnt <= 1) break;
        for (int i = 0; i < 4; ++i) {
            if (i == nz || rows[i][4] == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), rows[i][4].get_mpz_t(), rows[nz][4].get_mpz_t());
            for (int c = 0; c < 5; ++c) rows[i][c] -= q * rows[nz][c];
        }
    }
    int gi = -1;
    for (int i = 0; i < 4; ++i)
        if (rows[i][4] != 0) gi = i;
    kernel.clear();
    if (gi < 0) {
        if (t != 0) return false;
        for (int i = 0; i < 4; ++i) kernel.push_back(VecZ(rows[i].begin(), rows[i].begin() + 4));
        particular = VecZ(4, 0);
        return true;
    }
    Int g = rows[gi][4];
    if (t % g != 0) return false;
    Int mult = t / g;
    particular.assign(4, 0);
    for (int c = 0; c < 4; ++c) particular[c] = mult * rows[gi][c];
    for (int i = 0; i < 4; ++i)
        if (i != gi) kernel.push_back(VecZ(rows[i].begin(), rows[i].begin() + 4));
    return true;
}

// all y in O with trd(y) = t, nrd(y) = n, as quaternions
std::vector<Quat> elements_with_charpoly(const QOrder& O, const Int& t, const Int& n) {
    std::array<Int, 4> tk;
    for (int k = 0; k < 4; ++k) {
        Rat tr = q_trd(lattice_elem(O.L, k));
        if (!is_integer(tr)) throw Error("Internal", "non-integral trace");
        tk[k] = to_int(tr);
    }
    VecZ part;
    std::vector<VecZ> ker;
    if (!trace_solve(tk, t, part, ker)) return {};
    // ambient vectors
    auto amb = [&](const VecZ& co) {
        VecQ v(4);
        for (int k = 0; k < 4; ++k) {
            if (co[k] == 0) continue;
            VecQ row = O.L.basis_row(k);
            for (int c = 0; c < 4; ++c) v[c] += Rat(co[k]) * row[c];
        }
        return v;
    };
    VecQ y0 = amb(part);
    std::vector<VecQ> dirs;
    for (auto& kv : ker) dirs.push_back(amb(kv));
    int d = (int)dirs.size();
    // Q(x) = nrd(y0 + sum x_i dirs_i): gram + affine center
    auto bil = [&](const VecQ& u, const VecQ& v) -> Rat {
        Quat qu = q_of(u), qv = q_of(v);
        return q_trd(q_mul(O.A, qu, q_conj(qv))) / 2;
    };
    MatQ g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g.at(i, j) = bil(dirs[i], dirs[j]);
    VecQ beta(d);
    for (int i = 0; i < d; ++i) beta[i] = bil(y0, dirs[i]);
    // center c solves g c = beta
    MatQ ginv = inverse(g);
    VecQ center = mat_apply(ginv, beta);
    Rat shift = q_nrd(O.A, q_of(y0)) - dot(center, mat_apply(g, center));
    Rat target = Rat(n) - shift;
    if (target < 0) return {};
    auto sols = enumerate_by_norm_shifted(make_gram(g), center, target);
    std::vector<Quat> out;
    for (auto& x : sols) {
        VecQ v = y0;
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < 4; ++c) v[c] += Rat(x[i]) * dirs[i][c];
        Quat q = q_of(v);
        if (q_trd(q) != t || q_nrd(O.A, q) != n) throw Error("Internal", "charpoly solve drifted");
        out.push_back(q);
    }
    return out;
}

std::vector<Quat> unit_list(const QOrder& O) {
    auto coords = enumerate_by_norm(O.gram, 1);
    std::vector<Quat> us;
    for (auto& co : coords) {
        VecQ v(4);
        for (int k = 0; k < 4; ++k)
            for (int c = 0; c < 4; ++c) v[c] += Rat(co[k]) * O.L.basis_row(k)[c];
        us.push_back(q_of(v));
    }
    return us;
}

}  // namespace

Int embedding_count(const ImagQuadField& K, const QOrder& O) {
    auto sols = elements_with_charpoly(O, K.gen_trace(), K.gen_norm());
    if (sols.empty()) return 0;
    auto units = unit_list(O);
    std::set<std::array<std::string, 4>> orbits;
    for (auto& y : sols) {
        std::array<std::string, 4> best{"", "", "", ""};
        bool first = true;
        for (auto& u : units) {
            Quat c = q_mul(O.A, q_mul(O.A, u, y), q_inv(O.A, u));
            std::array<std::string, 4> key{c.w.get_str(), c.x.get_str(), c.y.get_str(),
                                           c.z.get_str()};
            if (first || key < best) {
                best = key;
                first = false;
            }
        }
        orbits.insert(best);
    }
    return (Int)(long)orbits.size();
}

bool check_global_embedding_identity(const ImagQuadField& K, const ClassSetData& cs, Int* lhs_out,
                                     Int* rhs_out) {
    Int lhs = 0;
    for (auto& L : cs.left_orders) lhs += embedding_count(K, L);
    Int rhs = class_group(K).h();
    for (auto& p : prime_divisors(cs.level.N())) rhs *= local_embedding_count(K, p, cs.level);
    if (lhs_out) *lhs_out = lhs;
    if (rhs_out) *rhs_out = rhs;
    return lhs == rhs;
}

std::pair<Quat, int> find_embedding(const ImagQuadField& K, const ClassSetData& cs) {
    std::string reason;
    if (!admissible(K, cs.level, &reason)) throw Error("NotAdmissible", reason);
    Int t = K.gen_trace(), n = K.gen_norm();
    for (int i = 0; i < cs.n(); ++i) {
        auto sols = elements_with_charpoly(cs.left_orders[i], t, n);
        if (!sols.empty()) {
            std::sort(sols.begin(), sols.end(), [](const Quat& a, const Quat& b) {
                return q_vec(a) < q_vec(b);
            });
            return {sols[0], i};
        }
    }
    throw Error("Internal", "admissible field with no embedding in the genus");
}

ClassMapData class_map(const ImagQuadField& K, const ClassSetData& cs) {
    auto [gen, base] = find_embedding(K, cs);
    Int t = K.gen_trace();

    ClassSetData rb = rebase(cs, base);
    Quat s = q_sub(q_scale(gen, 2), q_scale(q_one(), Rat(t)));  // image of sqrt(D_K)
    if (q_nrd(cs.A, s) != -K.D) throw Error("Internal", "sqrt image has wrong norm");

    ClassMapData out;
    out.K = K;
    out.generator_image = gen;
    out.base_class = base;
    out.fibers.assign(cs.n(), 0);

    auto G = class_group(K);
    Int modulus = 2 * cs.level.N() * cs.A.disc * abs(K.D);
    for (int ci = 0; ci < G.h(); ++ci) {
        QuadForm f = form_coprime_to(G.classes[ci], modulus);
        // ideal a = Z a + Z (-b + sqrt(D))/2 mapped through the embedding
        Quat xi = q_scale(q_add(q_scale(q_one(), Rat(-f.b)), s), Rat(1, 2));
        std::vector<VecQ> gens;
        for (int k = 0; k < 4; ++k) {
            Quat bk = lattice_elem(rb.O.L, k);
            gens.push_back(q_vec(q_scale(bk, Rat(f.a))));
            gens.push_back(q_vec(q_mul(cs.A, xi, bk)));
        }
        Lattice ideal = canonical_lattice(gens);
        int image = -1;
        for (int i = 0; i < rb.n(); ++i)
            if (is_equivalent(cs.A, ideal, rb.ideals[i])) {
                image = i;
                break;
            }
        if (image < 0) throw Error("ClassificationFailed", "K-ideal matches no representative");
        out.images.push_back(image);
        out.fibers[image] += 1;
    }
    Int total = 0;
    for (auto& h : out.fibers) total += h;
    if (total != G.h()) throw Error("Internal", "fiber counts do not sum to h_K");
    return out;
}

bool balanced_criterion(const LevelType& lt) {
    auto has_prime = [&](const Int& n, long m, long r) {
        for (auto& p : prime_divisors(n))
            if (p % m == r) return true;
        return false;
    };
    bool one = has_prime(lt.N1, 4, 1) || has_prime(lt.M, 4, 3) || (lt.N2 != 1 && lt.N2 != 4) ||
               lt.N1 % 8 == 0;
    bool two = has_prime(lt.N1, 3, 1) || has_prime(lt.M, 3, 2) || (lt.N2 != 1 && lt.N2 != 9) ||
               lt.N1 % 27 == 0;
    return one && two;
}

StabilityReport stability_status(const ClassMapData& cmd, const ClassSetData& cs) {
    StabilityReport r;
    r.balanced = true;
    for (auto& w : cs.weights)
        if (w != 1) r.balanced = false;
    r.sum_wh = 0;
    bool semi = true, stable = true;
    for (int i = 0; i < cs.n(); ++i) {
        r.sum_wh += cs.weights[i] * cmd.fibers[i];
        if (cmd.fibers[i] > 1) semi = false;
        if (cmd.fibers[i] == 1 && cs.weights[i] != cmd.K.u) stable = false;
        if (cmd.fibers[i] > 0 && cs.weights[i] % cmd.K.u != 0)
            throw Error("Internal", "u_K does not divide w_i on a populated class");
    }
    r.status = !semi ? StabStatus::unstable
                     : (stable ? StabStatus::stable : StabStatus::semistable);
    Int DB = cs.level.DB();
    r.disc_stable_sufficient = DB > abs(cmd.K.D) && gcd(DB, cmd.K.D) == 1;
    Int hK = 0;
    for (auto& h : cmd.fibers) hK += h;
    if (cs.level.N() >= 5 && DB > 3 && (r.sum_wh < hK || r.sum_wh > 3 * hK))
        throw Error("Internal", "sum w_i h_i outside [h_K, 3 h_K]");
    return r;
}

}  // namespace brandtlab
