#include "brandtlab/spectra.hpp"

#include <algorithm>

namespace brandtlab {

Rat weighted_inner(const ClassSetData& cs, const VecQ& phi, const VecQ& psi) {
    Rat s;
    for (int i = 0; i < cs.n(); ++i) s += phi[i] * psi[i] / Rat(cs.weights[i]);
    return s;
}

Cyclo height_pairing(const ClassSetData& cs, const std::vector<Cyclo>& c,
                     const std::vector<Cyclo>& d) {
    Cyclo s = Cyclo::zero(c.empty() ? 1 : c[0].n);
    for (int i = 0; i < cs.n(); ++i)
        s = cy_add(s, cy_scale(cy_mul(c[i], cy_conj(d[i])), Rat(cs.weights[i])));
    return s;
}

std::vector<VecQ> eisenstein_basis(const ClassSetData& cs) {
    std::vector<Int> odd_n2;
    for (auto& p : prime_divisors(cs.level.N2))
        if (p != 2) odd_n2.push_back(p);
    size_t count = (size_t)1 << odd_n2.size();
    std::vector<VecQ> out;
    for (size_t mask = 0; mask < count; ++mask) {
        VecQ v(cs.n());
        for (int i = 0; i < cs.n(); ++i) {
            int sign = 1;
            for (size_t b = 0; b < odd_n2.size(); ++b) {
                if (!(mask >> b & 1)) continue;
                const Rat& nm = cs.norms[i];
                int s = kronecker(num(nm), odd_n2[b]) * kronecker(den(nm), odd_n2[b]);
                if (s == 0) throw Error("Internal", "representative norm not coprime to N2");
                sign *= s;
            }
            v[i] = sign;
        }
        out.push_back(v);
    }
    return out;
}

namespace {

// exact Gram-Schmidt for the weighted inner product; drops zero vectors
std::vector<VecQ> gram_schmidt(const ClassSetData& cs, std::vector<VecQ> vecs) {
    std::vector<VecQ> out;
    for (auto v : vecs) {
        for (auto& u : out) {
            Rat c = weighted_inner(cs, v, u) / weighted_inner(cs, u, u);
            if (c == 0) continue;
            for (int i = 0; i < cs.n(); ++i) v[i] -= c * u[i];
        }
        bool zero = true;
        for (auto& x : v)
            if (x != 0) zero = false;
        if (!zero) {
            // clear denominators for readability of reported vectors
            Int l = 1;
            for (auto& x : v) l = lcm(l, den(x));
            Int g = 0;
            for (auto& x : v) g = gcd(g, num(x) * (l / den(x)));
            for (auto& x : v) x = x * Rat(l) / Rat(g);
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace

std::vector<VecQ> orthogonal_cuspidal_basis(const ClassSetData& cs) {
    auto eis = eisenstein_basis(cs);
    // cuspidal = kernel of phi -> (phi, e) for all Eisenstein e
    MatQ m((int)eis.size(), cs.n());
    for (size_t r = 0; r < eis.size(); ++r)
        for (int i = 0; i < cs.n(); ++i) m.at((int)r, i) = eis[r][i] / Rat(cs.weights[i]);
    auto ker = kernel_basis(m);
    return gram_schmidt(cs, ker);
}

namespace {

// integer eigenvalue candidates of an integer matrix: integer roots of the
// characteristic polynomial
std::vector<Rat> rational_eigenvalue_candidates(const MatQ& a) {
    VecQ cp = char_poly(a);
    // trailing zero roots
    std::vector<Rat> out;
    size_t low = 0;
    while (low < cp.size() && cp[low] == 0) ++low;
    if (low > 0) out.push_back(0);
    if (low >= cp.size() - 1) return out;
    Int constant = abs(to_int(cp[low]));
    for (Int d = 1; d * d <= constant; ++d) {
        if (constant % d != 0) continue;
        Int other = constant / d;
        for (const Int& cand : {d, other}) {
            for (int sgn : {1, -1}) {
                Rat x(cand * sgn);
                Rat val;
                Rat pw = 1;
                for (size_t k = 0; k < cp.size(); ++k) {
                    val += cp[k] * pw;
                    pw *= x;
                }
                if (val == 0) out.push_back(x);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// basis of {v in span(space) : A v = lambda v}
std::vector<VecQ> eigensubspace(const MatQ& a, const Rat& lambda, const std::vector<VecQ>& space) {
    // solve (A - lambda) (space^T x) = 0 for coefficient vectors x
    int n = a.rows, d = (int)space.size();
    MatQ m(n, d);
    for (int j = 0; j < d; ++j) {
        VecQ av = mat_apply(a, space[j]);
        for (int i = 0; i < n; ++i) m.at(i, j) = av[i] - lambda * space[j][i];
    }
    auto ker = kernel_basis(m);
    std::vector<VecQ> out;
    for (auto& x : ker) {
        VecQ v(n);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < n; ++i) v[i] += x[j] * space[j][i];
        out.push_back(v);
    }
    return out;
}

}  // namespace


namespace {

std::string mpf_decimal(const mpf_class& x, int digits = 50) {
    mp_exp_t e;
    std::string m = x.get_str(e, 10, digits);
    bool neg = !m.empty() && m[0] == '-';
    if (neg) m = m.substr(1);
    if (m.empty()) m = "0";
    std::string out = neg ? "-" : "";
    if (e <= 0) {
        out += "0." + std::string(-e, '0') + m;
    } else if ((size_t)e >= m.size()) {
        out += m + std::string(e - m.size(), '0');
    } else {
        out += m.substr(0, e) + "." + m.substr(e);
    }
    return out;
}

// Jacobi eigendecomposition of a symmetric mpf matrix; returns eigenvectors
// as rows of v.
void jacobi_eigen(std::vector<std::vector<mpf_class>>& a, std::vector<std::vector<mpf_class>>& v) {
    int n = (int)a.size();
    v.assign(n, std::vector<mpf_class>(n, 0));
    for (int i = 0; i < n; ++i) v[i][i] = 1;
    mpf_class eps(1);
    eps >>= 240;  // ~1e-72
    for (int sweep = 0; sweep < 128; ++sweep) {
        mpf_class off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += abs(a[i][j]);
        if (off < eps) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (abs(a[p][q]) < eps) continue;
                mpf_class theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                mpf_class t;
                mpf_class at = abs(theta);
                mpf_class root;
                mpf_sqrt(root.get_mpf_t(), mpf_class(theta * theta + 1).get_mpf_t());
                if (theta >= 0)
                    t = 1 / (theta + root);
                else
                    t = 1 / (theta - root);
                mpf_class c;
                mpf_sqrt(c.get_mpf_t(), mpf_class(t * t + 1).get_mpf_t());
                c = 1 / c;
                mpf_class s = t * c;
                for (int k = 0; k < n; ++k) {
                    mpf_class akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    mpf_class apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    mpf_class vpk = v[p][k], vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
    }
}

std::vector<Eigensystem> numeric_split(const ClassSetData& cs, const std::vector<VecQ>& blk,
                                       const std::vector<long>& indices,
                                       std::map<long, MatQ>& mats) {
    mpf_set_default_prec(256);
    int d = (int)blk.size();
    // weighted-orthonormal coordinates on the block (the basis is orthogonal)
    std::vector<mpf_class> norms(d);
    for (int i = 0; i < d; ++i) {
        Rat nn = weighted_inner(cs, blk[i], blk[i]);
        mpf_class f;
        f = nn;
        mpf_sqrt(norms[i].get_mpf_t(), f.get_mpf_t());
    }
    auto restricted = [&](long m) {
        // S[i][j] = (A_m phi_j, phi_i) / (|phi_i| |phi_j|)
        std::vector<std::vector<mpf_class>> S(d, std::vector<mpf_class>(d, 0));
        for (int j = 0; j < d; ++j) {
            VecQ aphi = mat_apply(mats[m], blk[j]);
            for (int i = 0; i < d; ++i) {
                Rat ip = weighted_inner(cs, aphi, blk[i]);
                S[i][j] = mpf_class(mpq_class(ip)) / (norms[i] * norms[j]);
            }
        }
        return S;
    };
    // generic self-adjoint combination separates the joint eigenspaces
    std::vector<std::vector<mpf_class>> T(d, std::vector<mpf_class>(d, 0));
    mpf_class w = 1;
    std::map<long, std::vector<std::vector<mpf_class>>> all;
    for (long m : indices) {
        all[m] = restricted(m);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) T[i][j] += w * all[m][i][j];
        w /= 3;
    }
    std::vector<std::vector<mpf_class>> vecs;
    jacobi_eigen(T, vecs);
    // Rayleigh eigenvalues per operator, then tolerance grouping
    auto rayleigh = [&](const std::vector<mpf_class>& v, long m) {
        mpf_class r = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r += v[i] * all[m][i][j] * v[j];
        return r;
    };
    std::vector<std::vector<mpf_class>> tuples(d);
    mpf_class scale = 1;
    for (int k = 0; k < d; ++k) {
        for (long m : indices) {
            tuples[k].push_back(rayleigh(vecs[k], m));
            if (abs(tuples[k].back()) > scale) scale = abs(tuples[k].back());
        }
    }
    mpf_class tol = scale;
    tol /= 1000000000;  // 1e-9 on the unit-operator-norm scale
    std::vector<int> group(d, -1);
    int ngroups = 0;
    for (int k = 0; k < d; ++k) {
        for (int g = 0; g < k; ++g) {
            bool same = group[g] >= 0;
            mpf_class worst = 0;
            for (size_t t = 0; t < tuples[k].size(); ++t) {
                mpf_class diff = abs(tuples[k][t] - tuples[g][t]);
                if (diff > worst) worst = diff;
            }
            if (worst < tol && same) {
                group[k] = group[g];
                break;
            }
            if (worst < tol * 1000 && worst > tol)
                throw Error("PrecisionLoss", "numeric eigenvalue separation is marginal");
        }
        if (group[k] < 0) group[k] = ngroups++;
    }
    std::vector<Eigensystem> out(ngroups);
    for (int g = 0; g < ngroups; ++g) {
        out[g].rational = false;
        out[g].basis = blk;  // exact span; the numeric data refines it
    }
    for (int k = 0; k < d; ++k) {
        Eigensystem& es = out[group[k]];
        es.multiplicity += 1;
        if (es.numeric_eigenvalues.empty())
            for (size_t t = 0; t < indices.size(); ++t)
                es.numeric_eigenvalues.push_back(mpf_decimal(tuples[k][t], 30));
    }
    return out;
}

}  // namespace

std::vector<Eigensystem> eigensystems(const ClassSetData& cs, long hecke_max) {
    std::vector<Eigensystem> out;
    auto eis = eisenstein_basis(cs);
    std::vector<long> indices;
    Int nprime = cs.level.Nprime();
    for (long m = 2; m <= hecke_max; ++m)
        if (gcd(Int(m), nprime) == 1) indices.push_back(m);
    std::map<long, MatQ> mats;
    for (long m : indices) mats[m] = brandt_matrix(cs, m);

    for (auto& e : eis) {
        Eigensystem es;
        es.basis = {e};
        es.multiplicity = 1;
        es.is_eisenstein = true;
        for (long m : indices) {
            VecQ ae = mat_apply(mats[m], e);
            // scalar on an Eisenstein vector
            int piv = 0;
            while (piv < cs.n() && e[piv] == 0) ++piv;
            Rat lambda = ae[piv] / e[piv];
            for (int i = 0; i < cs.n(); ++i)
                if (ae[i] != lambda * e[i])
                    throw Error("Internal", "Eisenstein vector is not an eigenvector");
            es.eigenvalues[m] = lambda;
        }
        out.push_back(es);
    }

    std::vector<std::vector<VecQ>> blocks;
    auto cusp = orthogonal_cuspidal_basis(cs);
    if (!cusp.empty()) blocks.push_back(cusp);
    for (long m : indices) {
        std::vector<std::vector<VecQ>> next;
        for (auto& blk : blocks) {
            if (blk.size() == 1) {
                next.push_back(blk);
                continue;
            }
            auto lambdas = rational_eigenvalue_candidates(mats[m]);
            std::vector<std::vector<VecQ>> pieces;
            std::vector<VecQ> captured;
            for (auto& l : lambdas) {
                auto sub = eigensubspace(mats[m], l, blk);
                if (!sub.empty()) {
                    pieces.push_back(gram_schmidt(cs, sub));
                    for (auto& v : pieces.back()) captured.push_back(v);
                }
            }
            if (captured.size() == blk.size()) {
                for (auto& p : pieces) next.push_back(p);
            } else if (captured.empty()) {
                next.push_back(blk);  // fully irrational under this operator
            } else {
                // orthogonal complement of the captured part within the block
                std::vector<VecQ> rest;
                for (auto v : blk) {
                    for (auto& u : captured) {
                        Rat c = weighted_inner(cs, v, u) / weighted_inner(cs, u, u);
                        for (int i = 0; i < cs.n(); ++i) v[i] -= c * u[i];
                    }
                    rest.push_back(v);
                }
                auto rest_basis = gram_schmidt(cs, rest);
                for (auto& p : pieces) next.push_back(p);
                if (!rest_basis.empty()) next.push_back(rest_basis);
            }
        }
        blocks = next;
    }

    for (auto& blk : blocks) {
        Eigensystem es;
        es.basis = blk;
        es.multiplicity = (int)blk.size();
        for (long m : indices) {
            // scalar action check on the block
            const VecQ& v = blk[0];
            VecQ av = mat_apply(mats[m], v);
            int piv = 0;
            while (piv < cs.n() && v[piv] == 0) ++piv;
            Rat lambda = av[piv] / v[piv];
            bool scalar = true;
            for (auto& w : blk) {
                VecQ aw = mat_apply(mats[m], w);
                for (int i = 0; i < cs.n() && scalar; ++i)
                    if (aw[i] != lambda * w[i]) scalar = false;
            }
            if (scalar)
                es.eigenvalues[m] = lambda;
            else
                es.rational = false;  // irrational splitting handled numerically
        }
        if (es.rational) {
            out.push_back(es);
        } else {
            for (auto& sub : numeric_split(cs, blk, indices, mats)) out.push_back(sub);
        }
    }
    int total = 0;
    for (auto& es : out) total += es.multiplicity;
    if (total != cs.n()) throw Error("Internal", "eigensystem multiplicities do not fill M(O)");
    return out;
}

Cyclo period(const VecQ& phi, const ClassMapData& cmd, const ClassChar& chi) {
    int e = chi.G->exponent;
    Cyclo s = Cyclo::zero(e);
    for (size_t t = 0; t < cmd.images.size(); ++t)
        s = cy_add(s, cy_scale(chi.value_inv((int)t), phi[cmd.images[t]]));
    return s;
}

Cyclo period_square_sum(const ClassSetData& cs, const Eigensystem& es, const ClassMapData& cmd,
                        const ClassChar& chi) {
    Cyclo s = Cyclo::zero(chi.G->exponent);
    for (auto& phi : es.basis) {
        Cyclo p = period(phi, cmd, chi);
        s = cy_add(s, cy_scale(cy_norm_sq(p), 1 / weighted_inner(cs, phi, phi)));
    }
    return s;
}

bool column_orthogonality_check(const ClassSetData& cs, const MatQ& T) {
    auto eis = eisenstein_basis(cs);
    auto cusp = orthogonal_cuspidal_basis(cs);
    std::vector<VecQ> basis = eis;
    for (auto& v : cusp) basis.push_back(v);
    for (int i = 0; i < cs.n(); ++i)
        for (int j = 0; j < cs.n(); ++j) {
            Rat lhs;
            for (auto& phi : basis) {
                VecQ tphi = mat_apply(T, phi);
                lhs += tphi[i] * phi[j] / weighted_inner(cs, phi, phi);
            }
            if (lhs != Rat(cs.weights[j]) * T.at(i, j)) return false;
        }
    return true;
}

Rat hecke_eigenvalue_at(const ClassSetData& cs, const Eigensystem& es, const Int& p) {
    MatQ ap = brandt_matrix(cs, p);
    const VecQ& v = es.basis[0];
    VecQ av = mat_apply(ap, v);
    int piv = 0;
    while (piv < (int)v.size() && v[piv] == 0) ++piv;
    Rat lambda = av[piv] / v[piv];
    for (auto& w : es.basis) {
        VecQ aw = mat_apply(ap, w);
        for (size_t i = 0; i < w.size(); ++i)
            if (aw[i] != lambda * w[i])
                throw Error("AmbiguousType",
                            "A_" + p.get_str() + " is not scalar on the eigenspace");
    }
    return lambda;
}

namespace {

// eigenvalue tuples at shared indices for matching across orders
std::vector<Rat> eigen_signature(const ClassSetData& cs, const Eigensystem& es,
                                 const std::vector<long>& primes) {
    std::vector<Rat> sig;
    for (long p : primes) {
        auto it = es.eigenvalues.find(p);
        if (it == es.eigenvalues.end()) throw Error("AmbiguousType", "missing matching eigenvalue");
        sig.push_back(it->second);
    }
    return sig;
}

bool occurs_at(const ClassSetData& lower, const std::vector<Rat>& sig,
               const std::vector<long>& primes, long hecke_max) {
    auto systems = eigensystems(lower, hecke_max);
    for (auto& es : systems) {
        if (es.is_eisenstein || !es.rational) continue;
        bool match = true;
        for (size_t k = 0; k < primes.size() && match; ++k) {
            auto it = es.eigenvalues.find(primes[k]);
            if (it == es.eigenvalues.end() || it->second != sig[k]) match = false;
        }
        if (match) return true;
    }
    return false;
}

}  // namespace

void local_type_and_level(const ClassSetData& cs, Eigensystem& es, const ClassSetProvider& tower,
                          int match_primes) {
    if (es.is_eisenstein) throw Error("Domain", "local types apply to cuspidal systems");
    if (!es.rational)
        throw Error("PrecisionLoss", "local types require a rational eigensystem here");
    const LevelType& lt = cs.level;
    // matching indices: primes coprime to N, present in the computed eigenvalues
    std::vector<long> primes;
    long hecke_max = 2;
    for (long p = 2; (int)primes.size() < match_primes; ++p) {
        if (!is_prime(p)) continue;
        if (lt.N() % p == 0) continue;
        if (es.eigenvalues.find(p) == es.eigenvalues.end())
            es.eigenvalues[p] = hecke_eigenvalue_at(cs, es, p);
        primes.push_back(p);
        hecke_max = p;
    }
    auto sig = eigen_signature(cs, es, primes);

    Int nf = 1;
    // p | M: new or old by occurrence with M lowered
    Int baseline = 1;
    for (auto& p : prime_divisors(lt.M)) {
        LevelType low{lt.N1, lt.N2, lt.M / p};
        bool old_at_p = occurs_at(tower(low), sig, primes, hecke_max);
        if (old_at_p) {
            es.local_types[to_long(p)] = LocalType::eichler_old;
            baseline *= 2;
        } else {
            es.local_types[to_long(p)] = LocalType::eichler_new;
            nf *= p;
        }
    }
    // p | N1
    for (auto& [p, e] : factorize(lt.N1)) {
        if (e == 1) {
            es.local_types[to_long(p)] = LocalType::one_dim_db;
            nf *= p;
            continue;
        }
        int cond = e;
        for (int r = 1; r < e; r += 2) {
            Int lowered = lt.N1;
            for (int k = 0; k < e - r; ++k) lowered /= p;
            LevelType low{lowered, lt.N2, lt.M};
            if (occurs_at(tower(low), sig, primes, hecke_max)) {
                cond = r;
                break;
            }
        }
        es.local_types[to_long(p)] = cond == 1 ? LocalType::one_dim_db : LocalType::supercuspidal;
        for (int k = 0; k < cond; ++k) nf *= p;
    }
    // p | N2
    for (auto& p : prime_divisors(lt.N2)) {
        LevelType low{lt.N1 * p, lt.N2 / (p * p), lt.M};
        if (occurs_at(tower(low), sig, primes, hecke_max)) {
            es.local_types[to_long(p)] = LocalType::unram_steinberg;
            nf *= p;
            continue;
        }
        if (es.multiplicity == 2 * to_long(baseline)) {
            es.local_types[to_long(p)] = LocalType::supercuspidal;
        } else if (es.multiplicity == to_long(baseline)) {
            es.local_types[to_long(p)] = LocalType::ram_steinberg;
        } else {
            throw Error("AmbiguousType", "multiplicity does not separate the N2 local type");
        }
        nf *= p * p;
    }
    es.exact_level = nf;
}

}  // namespace brandtlab
