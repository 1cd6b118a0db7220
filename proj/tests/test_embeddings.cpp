#include "brandtlab/embeddings.hpp"
#include "doctest.h"

using namespace brandtlab;

namespace {

ClassSetData build(long n1, long n2, long m) {
    auto lt = validate_level(n1, n2, m);
    auto A = algebra_from_level_disc(lt.DB());
    return right_ideal_classes(special_order(A, lt), lt, Int(2310) * lt.N());
}

}  // namespace

TEST_CASE("admissibility") {
    CHECK(admissible(make_field(-1), validate_level(11, 1, 1)));
    CHECK(admissible(make_field(-15), validate_level(11, 1, 2)));
    std::string reason;
    CHECK(!admissible(make_field(-3), validate_level(27, 1, 1), &reason));
    CHECK(reason.find("ramified") != std::string::npos);  // 3 ramified but 27 | N1
    // -3 is a nonresidue mod 11, so K(-3) is inert at 11 and admissible; its
    // ring of integers sits in the 6-unit maximal order (w_2 = 3)
    CHECK(admissible(make_field(-3), validate_level(11, 1, 1)));
    CHECK(admissible(make_field(-5), validate_level(1, 25, 3)));   // ramified at 5, split at 3
    CHECK(admissible(make_field(-15), validate_level(1, 25, 3)));  // ramified at both
    CHECK(!admissible(make_field(-1), validate_level(13, 1, 1)));  // split at 13
    CHECK(admissible(make_field(-7), validate_level(13, 1, 1)));
}

TEST_CASE("local embedding counts") {
    CHECK(local_embedding_count(make_field(-1), 11, validate_level(11, 1, 1)) == 2);
    CHECK(local_embedding_count(make_field(-11), 11, validate_level(11, 1, 1)) == 1);
    CHECK(local_embedding_count(make_field(-15), 5, validate_level(1, 25, 3)) == 6);
    CHECK(local_embedding_count(make_field(-5), 3, validate_level(1, 25, 3)) == 2);   // split
    CHECK(local_embedding_count(make_field(-15), 3, validate_level(1, 25, 3)) == 1);  // ramified
    CHECK(local_embedding_count(make_field(-1), 3, validate_level(27, 1, 1)) == 2);
    CHECK(local_embedding_count(make_field(-3), 3, validate_level(27, 1, 1)) == 0);
    CHECK_THROWS_WITH_AS(local_embedding_count(make_field(-1), 7, validate_level(11, 1, 1)),
                         doctest::Contains("PrimeNotDividingLevel"), Error);
}

TEST_CASE("global embedding identity") {
    auto cs11 = build(11, 1, 1);
    Int lhs, rhs;
    CHECK(check_global_embedding_identity(make_field(-1), cs11, &lhs, &rhs));
    CHECK(lhs == 2);
    CHECK(check_global_embedding_identity(make_field(-11), cs11, &lhs, &rhs));
    CHECK(lhs == 1);
    auto cs22 = build(11, 1, 2);
    CHECK(check_global_embedding_identity(make_field(-15), cs22, &lhs, &rhs));
    CHECK(lhs == 8);
}

TEST_CASE("class maps of the worked examples") {
    auto cs11 = build(11, 1, 1);
    auto cmd = class_map(make_field(-1), cs11);
    CHECK(cmd.fibers == std::vector<Int>{1, 0});
    CHECK(q_trd(cmd.generator_image) == 0);
    CHECK(q_nrd(cs11.A, cmd.generator_image) == 1);

    auto cmd11 = class_map(make_field(-11), cs11);
    CHECK(cmd11.fibers == std::vector<Int>{1, 0});
    CHECK(q_trd(cmd11.generator_image) == 1);
    CHECK(q_nrd(cs11.A, cmd11.generator_image) == 3);

    auto cs22 = build(11, 1, 2);
    auto cmd22 = class_map(make_field(-15), cs22);
    CHECK(cmd22.fibers == std::vector<Int>{0, 1, 1});

    auto cs27 = build(27, 1, 1);
    auto cmd27 = class_map(make_field(-1), cs27);
    CHECK(cmd27.fibers == std::vector<Int>{1, 0});

    auto cmd3 = class_map(make_field(-3), cs11);
    CHECK(cmd3.fibers == std::vector<Int>{0, 1});  // lands in the 6-unit order
    CHECK_THROWS_WITH_AS(class_map(make_field(-1), build(13, 1, 1)),
                         doctest::Contains("NotAdmissible"), Error);
}

TEST_CASE("find_embedding seeds") {
    auto cs11 = build(11, 1, 1);
    auto [gen4, base4] = find_embedding(make_field(-1), cs11);
    CHECK(base4 == 0);  // lands in the 4-unit order
    CHECK(q_trd(gen4) == 0);
    CHECK(q_nrd(cs11.A, gen4) == 1);
    auto [gen11, base11] = find_embedding(make_field(-11), cs11);
    CHECK(base11 == 0);
    CHECK(q_trd(gen11) == 1);
    CHECK(q_nrd(cs11.A, gen11) == 3);
    auto cs22 = build(11, 1, 2);
    auto [gen15, base15] = find_embedding(make_field(-15), cs22);
    CHECK(base15 >= 1);  // no embedding into the 4-unit class
    CHECK_THROWS_WITH_AS(find_embedding(make_field(-13), cs11),
                         doctest::Contains("NotAdmissible"), Error);
}

TEST_CASE("balanced criterion") {
    CHECK(balanced_criterion(validate_level(1, 25, 3)));
    CHECK(!balanced_criterion(validate_level(11, 1, 1)));
    CHECK(balanced_criterion(validate_level(13, 1, 1)));  // 13 = 1 mod 12
    CHECK(!balanced_criterion(validate_level(27, 1, 1)));
    CHECK(!balanced_criterion(validate_level(11, 1, 2)));
    // balanced criterion forces all weights 1 on a computed class set
    auto cs75 = build(1, 25, 3);
    CHECK(balanced_criterion(cs75.level));
    for (auto& w : cs75.weights) CHECK(w == 1);
    auto cs13 = build(13, 1, 1);
    for (auto& w : cs13.weights) CHECK(w == 1);
}

TEST_CASE("stability classification") {
    auto cs11 = build(11, 1, 1);
    auto cmd = class_map(make_field(-1), cs11);
    auto rep = stability_status(cmd, cs11);
    CHECK(rep.status == StabStatus::stable);  // h=(1,0), w_1 = 2 = u_K
    CHECK(rep.sum_wh == 2);
    CHECK(rep.disc_stable_sufficient);  // 11 > 4, coprime

    auto cs22 = build(11, 1, 2);
    auto cmd22 = class_map(make_field(-15), cs22);
    auto rep22 = stability_status(cmd22, cs22);
    CHECK(rep22.status == StabStatus::stable);  // w_2 = w_3 = 1 = u_K
    CHECK(rep22.sum_wh == 2);
    CHECK(!rep22.disc_stable_sufficient);  // 11 < 15

    // pigeonhole: h_K > n forces unstable
    auto cs13 = build(13, 1, 1);
    auto K47 = make_field(-47);  // h = 5 > n = 1, inert at 13?
    if (admissible(K47, cs13.level)) {
        auto c = class_map(K47, cs13);
        CHECK(stability_status(c, cs13).status == StabStatus::unstable);
    }
}

TEST_CASE("suborder inheritance on the 11 | 22 chain") {
    auto cs11 = build(11, 1, 1);
    auto cs22 = build(11, 1, 2);
    auto K = make_field(-15);
    // semistable upstairs implies semistable downstairs (checked concretely)
    auto up = stability_status(class_map(K, cs11), cs11);
    auto down = stability_status(class_map(K, cs22), cs22);
    if (up.status != StabStatus::unstable) CHECK(down.status != StabStatus::unstable);
    // sum h_i = h_K on both
    Int h11 = 0, h22 = 0;
    for (auto& h : class_map(K, cs11).fibers) h11 += h;
    for (auto& h : class_map(K, cs22).fibers) h22 += h;
    CHECK(h11 == 2);
    CHECK(h22 == 2);
}
