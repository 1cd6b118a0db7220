#include "brandtlab/spectra.hpp"
#include "doctest.h"

using namespace brandtlab;

namespace {

ClassSetData build(long n1, long n2, long m) {
    auto lt = validate_level(n1, n2, m);
    auto A = algebra_from_level_disc(lt.DB());
    return right_ideal_classes(special_order(A, lt), lt, Int(2310) * lt.N());
}

Rat rational_of(const Cyclo& c) { return c.rational_value(); }

}  // namespace

TEST_CASE("eisenstein basis") {
    auto cs11 = build(11, 1, 1);
    auto e11 = eisenstein_basis(cs11);
    REQUIRE(e11.size() == 1);
    CHECK(weighted_inner(cs11, e11[0], e11[0]) == cs11.mass);  // (1,1) = 5/6

    auto cs75 = build(1, 25, 3);
    auto e75 = eisenstein_basis(cs75);
    REQUIRE(e75.size() == 2);  // dim Eis = 2
    for (auto& e : e75) CHECK(weighted_inner(cs75, e, e) == cs75.mass);
    CHECK(weighted_inner(cs75, e75[0], e75[1]) == 0);
    // Eisenstein vectors are exact eigenvectors of every Brandt matrix tested
    for (long m : {2L, 7L, 11L}) {
        MatQ am = brandt_matrix(cs75, m);
        for (auto& e : e75) {
            VecQ ae = mat_apply(am, e);
            Rat lambda = ae[0] / e[0];
            for (int i = 0; i < cs75.n(); ++i) CHECK(ae[i] == lambda * e[i]);
        }
    }
}

TEST_CASE("eigensystems at level 11") {
    auto cs = build(11, 1, 1);
    auto systems = eigensystems(cs, 13);
    REQUIRE(systems.size() == 2);
    const Eigensystem* cuspidal = nullptr;
    for (auto& es : systems)
        if (!es.is_eisenstein) cuspidal = &es;
    REQUIRE(cuspidal != nullptr);
    CHECK(cuspidal->multiplicity == 1);
    // phi = (2, -3) up to scaling
    const VecQ& phi = cuspidal->basis[0];
    CHECK(phi[0] * (-3) == phi[1] * 2);
    CHECK(cuspidal->eigenvalues.at(2) == -2);
    CHECK(cuspidal->eigenvalues.at(3) == -1);
    CHECK(cuspidal->eigenvalues.at(5) == 1);
    CHECK(cuspidal->eigenvalues.at(7) == -2);
    CHECK(cuspidal->eigenvalues.at(13) == 4);  // a_p of the level-11 newform
    // eigenvalue of A_11 at the ramified prime is a_11(f) = +1 (split
    // multiplicative reduction); this fixes the sign convention the
    // K(-11) nonvanishing check depends on
    CHECK(cuspidal->eigenvalues.at(11) == 1);
}

TEST_CASE("eigensystems at level 22 and 27") {
    auto cs22 = build(11, 1, 2);
    auto sys22 = eigensystems(cs22, 13);
    int cusp_count = 0;
    for (auto& es : sys22)
        if (!es.is_eisenstein) {
            ++cusp_count;
            CHECK(es.multiplicity == 2);  // the 2-old block of f_11
            CHECK(es.eigenvalues.at(3) == -1);
        }
    CHECK(cusp_count == 1);

    auto cs27 = build(27, 1, 1);
    auto sys27 = eigensystems(cs27, 13);
    for (auto& es : sys27)
        if (!es.is_eisenstein) {
            CHECK(es.multiplicity == 1);
            const VecQ& phi = es.basis[0];
            CHECK(phi[0] * (-1) == phi[1] * 2);  // (2, -1) up to scale
            CHECK(es.eigenvalues.at(2) == 0);    // a_2 of 27.2.a.a
            CHECK(es.eigenvalues.at(7) == -1);
        }
}

TEST_CASE("eigensystems at level 75: multiplicities 1,1,2,2") {
    auto cs = build(1, 25, 3);
    auto systems = eigensystems(cs, 23);
    std::vector<int> mults;
    for (auto& es : systems)
        if (!es.is_eisenstein) {
            CHECK(es.rational);
            mults.push_back(es.multiplicity);
        }
    std::sort(mults.begin(), mults.end());
    CHECK(mults == std::vector<int>{1, 1, 2, 2});
    int total = 0;
    for (auto& es : systems) total += es.multiplicity;
    CHECK(total == 8);
}

TEST_CASE("periods and heights at level 11") {
    auto cs = build(11, 1, 1);
    auto K = make_field(-1);
    auto cmd = class_map(K, cs);
    auto G = std::make_shared<ClassGroup>(class_group(K));
    ClassChar triv{G, std::vector<int>(G->cyc_orders.size(), 0)};

    auto systems = eigensystems(cs, 13);
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        Cyclo ps = period_square_sum(cs, es, cmd, triv);
        CHECK(rational_of(ps) == Rat(4, 5));  // |P_K(phi)|^2/(phi,phi) = 4/5
    }
    // <c_K, a(1)> = w_1 h_1 = 2
    std::vector<Cyclo> cK, a1;
    for (int i = 0; i < cs.n(); ++i) {
        cK.push_back(Cyclo::from_rat(1, Rat(cmd.fibers[i])));
        a1.push_back(Cyclo::from_rat(1, Rat(1)));  // A_1 = I diagonal
    }
    CHECK(rational_of(height_pairing(cs, cK, a1)) == 2);
    // <1-divisor, 1-divisor> = sum w_i
    std::vector<Cyclo> ones(cs.n(), Cyclo::from_rat(1, Rat(1)));
    CHECK(rational_of(height_pairing(cs, ones, ones)) == 5);

    auto K11 = make_field(-11);
    auto cmd11 = class_map(K11, cs);
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        CHECK(rational_of(period_square_sum(cs, es, cmd11, triv)) == Rat(4, 5));
    }
}

TEST_CASE("periods at level 22 for K(-15)") {
    auto cs = build(11, 1, 2);
    auto K = make_field(-15);
    auto cmd = class_map(K, cs);
    auto G = std::make_shared<ClassGroup>(class_group(K));
    auto chars = characters(*G);
    REQUIRE(chars.size() == 2);
    const ClassChar* triv = &chars[0];
    const ClassChar* sgn = &chars[1];
    if (!chars[0].is_trivial()) std::swap(triv, sgn);
    for (auto& ch : chars) ch.G = G;

    auto systems = eigensystems(cs, 13);
    Rat triv_total, sgn_total;
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        triv_total += rational_of(period_square_sum(cs, es, cmd, *triv));
        sgn_total += rational_of(period_square_sum(cs, es, cmd, *sgn));
    }
    CHECK(triv_total == Rat(2, 5));  // 1/15 + 1/3
    CHECK(sgn_total == 2);           // 25/15 + 1/3
}

TEST_CASE("column orthogonality") {
    auto cs11 = build(11, 1, 1);
    CHECK(column_orthogonality_check(cs11, MatQ::identity(cs11.n())));
    CHECK(column_orthogonality_check(cs11, brandt_matrix(cs11, 2)));
    auto cs22 = build(11, 1, 2);
    CHECK(column_orthogonality_check(cs22, brandt_matrix(cs22, 3)));
    auto cs75 = build(1, 25, 3);
    CHECK(column_orthogonality_check(cs75, brandt_matrix(cs75, 2)));
}

TEST_CASE("self-adjointness and Parseval") {
    auto cs = build(11, 1, 2);
    auto K = make_field(-15);
    auto cmd = class_map(K, cs);
    auto G = std::make_shared<ClassGroup>(class_group(K));
    auto chars = characters(*G);
    for (auto& ch : chars) ch.G = G;
    // (A_m phi, psi) = (phi, A_m psi)
    for (long m : {2L, 3L, 5L}) {
        MatQ am = brandt_matrix(cs, m);
        VecQ phi{1, 2, -1}, psi{0, 1, 1};
        CHECK(weighted_inner(cs, mat_apply(am, phi), psi) ==
              weighted_inner(cs, phi, mat_apply(am, psi)));
    }
    // Parseval: sum_chi |P_chi(phi)|^2 = h_K sum h_i |phi(x_i)|^2
    VecQ phi{3, -1, 2};
    Cyclo lhs = Cyclo::zero(G->exponent);
    for (auto& ch : chars) lhs = cy_add(lhs, cy_norm_sq(period(phi, cmd, ch)));
    Rat rhs;
    for (int i = 0; i < cs.n(); ++i) rhs += Rat(cmd.fibers[i]) * phi[i] * phi[i];
    CHECK(lhs.rational_value() == Rat(G->h()) * rhs);
}

TEST_CASE("irrational eigensystems split numerically at level 23") {
    auto cs = build(23, 1, 1);
    auto systems = eigensystems(cs, 13);
    std::vector<std::string> lam2;
    int numeric = 0;
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        CHECK(!es.rational);
        CHECK(es.multiplicity == 1);
        ++numeric;
        REQUIRE(!es.numeric_eigenvalues.empty());
        lam2.push_back(es.numeric_eigenvalues[0]);
    }
    CHECK(numeric == 2);
    // a_2 are the roots of x^2 + x - 1 (golden-ratio conjugates)
    std::sort(lam2.begin(), lam2.end());
    CHECK(lam2[0].substr(0, 7) == "-1.6180");
    CHECK(lam2[1].substr(0, 6) == "0.6180");
}

TEST_CASE("local types and exact levels at 75") {
    auto cs = build(1, 25, 3);
    std::map<std::string, ClassSetData> cache;
    ClassSetProvider tower = [&](const LevelType& lt) -> const ClassSetData& {
        std::string key = lt.N1.get_str() + "," + lt.N2.get_str() + "," + lt.M.get_str();
        auto it = cache.find(key);
        if (it == cache.end()) {
            auto A = algebra_from_level_disc(lt.DB());
            it = cache.emplace(key, right_ideal_classes(special_order(A, lt), lt,
                                                        Int(2310) * cs.level.N()))
                     .first;
        }
        return it->second;
    };
    auto systems = eigensystems(cs, 23);
    int n_unram_st = 0, n_ram_st = 0, n_sc = 0;
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        local_type_and_level(cs, es, tower);
        LocalType t5 = es.local_types.at(5);
        if (t5 == LocalType::unram_steinberg) {
            ++n_unram_st;
            CHECK(es.exact_level == 15);  // the oldform g of level 15
            CHECK(es.multiplicity == 1);
        } else if (t5 == LocalType::ram_steinberg) {
            ++n_ram_st;
            CHECK(es.exact_level == 75);
            CHECK(es.multiplicity == 1);
        } else {
            ++n_sc;
            CHECK(t5 == LocalType::supercuspidal);
            CHECK(es.exact_level == 75);
            CHECK(es.multiplicity == 2);
        }
        CHECK(es.local_types.at(3) == LocalType::eichler_new);
    }
    CHECK(n_unram_st == 1);
    CHECK(n_ram_st == 1);
    CHECK(n_sc == 2);
}

TEST_CASE("local types at 22: the 2-old block") {
    auto cs = build(11, 1, 2);
    std::map<std::string, ClassSetData> cache;
    ClassSetProvider tower = [&](const LevelType& lt) -> const ClassSetData& {
        std::string key = rat_str(Rat(lt.N1)) + "," + rat_str(Rat(lt.N2)) + "," + rat_str(Rat(lt.M));
        auto it = cache.find(key);
        if (it == cache.end()) {
            auto A = algebra_from_level_disc(lt.DB());
            it = cache.emplace(key, right_ideal_classes(special_order(A, lt), lt,
                                                        Int(2310) * cs.level.N()))
                     .first;
        }
        return it->second;
    };
    auto systems = eigensystems(cs, 13);
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        local_type_and_level(cs, es, tower);
        CHECK(es.local_types.at(2) == LocalType::eichler_old);
        CHECK(es.local_types.at(11) == LocalType::one_dim_db);
        CHECK(es.exact_level == 11);
    }
}
