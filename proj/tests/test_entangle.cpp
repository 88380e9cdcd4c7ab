#include "upbv/entangle.hpp"
#include "upbv/families.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace upbv;

TEST_CASE("span projector") {
    const auto set = upb_333();
    const CMatrix p = span_projector(set);
    REQUIRE(p.rows() == 27);
    REQUIRE((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((p * p - p).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE(rank(p, 1e-9) == 19);
    for (const auto& s : set.states) {
        const CVector v = state_vector(s);
        REQUIRE((p * v - v).norm() <= 1e-9 * v.norm());
    }
    SECTION("single state") {
        StateSet one;
        one.dims = {2, 2, 2};
        one.states.push_back({{basis_ket(2, 0), basis_ket(2, 0), basis_ket(2, 0)}, "000"});
        const CMatrix q = span_projector(one);
        CMatrix want = CMatrix::Zero(8, 8);
        want(0, 0) = 1;
        REQUIRE(q.isApprox(want));
    }
    SECTION("non-orthogonal input rejected") {
        StateSet bad;
        bad.dims = {2, 2, 2};
        bad.states.push_back({{basis_ket(2, 0), basis_ket(2, 0), basis_ket(2, 0)}, "a"});
        bad.states.push_back({{ones_ket(2), basis_ket(2, 0), basis_ket(2, 0)}, "b"});
        REQUIRE_THROWS_AS(span_projector(bad), std::invalid_argument);
    }
}

TEST_CASE("complement mixed state") {
    for (int d : {3, 4}) {
        const auto set = d == 3 ? upb_333() : upb_444();
        const auto rho = upb_mixed_state(set, /*assume_upb=*/true);
        const long D = d * d * d;
        REQUIRE(std::abs(rho.rho.trace() - Complex(1, 0)) <= 1e-10);
        const RVector ev = eig_hermitian(rho.rho);
        REQUIRE(ev(0) >= -1e-10);
        int nonzero = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) nonzero += ev(i) > 1e-10;
        REQUIRE(nonzero == D - static_cast<long>(set.states.size()));  // rank 8
        REQUIRE(nonzero == 8);
        // nonzero spectrum is flat at 1/(D - t)
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) > 1e-10)
                REQUIRE(ev(i) == Catch::Approx(1.0 / static_cast<double>(
                                                   D - static_cast<long>(set.states.size()))));
        // range orthogonal to the span
        const CMatrix p = span_projector(set);
        REQUIRE((rho.rho * p).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SECTION("extendible defining set rejected") {
        auto set = upb_333();
        set.states.pop_back();  // drop the stopper
        REQUIRE_THROWS_AS(upb_mixed_state(set), std::invalid_argument);
    }
    SECTION("invariant under the cyclic party permutation") {
        const auto set = upb_333();
        const auto rho = upb_mixed_state(set, true);
        // permutation matrix for (a,b,c) -> (b,c,a) relabeling
        CMatrix perm = CMatrix::Zero(27, 27);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) perm(9 * b + 3 * c + a, 9 * a + 3 * b + c) = 1.0;
        REQUIRE((perm * rho.rho * perm.adjoint() - rho.rho).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("ppt report") {
    SECTION("complement states of the small families are PPT everywhere") {
        for (int d : {3, 4}) {
            const auto set = d == 3 ? upb_333() : upb_444();
            const auto rep = ppt_report(upb_mixed_state(set, true));
            REQUIRE(rep.size() == 3);
            REQUIRE(rep[0].first == "A|BC");
            REQUIRE(rep[1].first == "B|CA");
            REQUIRE(rep[2].first == "C|AB");
            for (const auto& [cut, mineig] : rep) REQUIRE(mineig >= -1e-10);
        }
    }
    SECTION("maximally mixed state has flat positive minima") {
        DensityMatrix mm{{2, 2, 2}, CMatrix::Identity(8, 8) / 8.0};
        for (const auto& [cut, mineig] : ppt_report(mm))
            REQUIRE(mineig == Catch::Approx(1.0 / 8.0));
    }
}

TEST_CASE("range criterion certificate") {
    SECTION("UPB families are certified") {
        REQUIRE(range_entanglement_certificate(upb_333()).certified);
        REQUIRE(range_entanglement_certificate(upb_ddd(5)).certified);
    }
    SECTION("a completable product set is refused") {
        StateSet set;
        set.dims = {2, 2};
        set.states.push_back({{basis_ket(2, 0), basis_ket(2, 0)}, "00"});
        set.states.push_back({{basis_ket(2, 0), basis_ket(2, 1)}, "01"});
        const auto cert = range_entanglement_certificate(set);
        REQUIRE(!cert.certified);
        REQUIRE(cert.statement.find("refused") != std::string::npos);
    }
}

TEST_CASE("schmidt rank") {
    REQUIRE(schmidt_rank(kron({basis_ket(2, 0), basis_ket(2, 0), basis_ket(2, 0)}), {2, 2, 2},
                         {0}) == 1);
    CVector bell = kron({basis_ket(2, 0), basis_ket(2, 0)}) +
                   kron({basis_ket(2, 1), basis_ket(2, 1)});
    REQUIRE(schmidt_rank(bell, {2, 2}, {0}) == 2);
    const auto phis = complement_phi_3();
    REQUIRE(schmidt_rank(phis[0].vec, {3, 3, 3}, {0}) == 1);
    REQUIRE(schmidt_rank(phis[0].vec, {3, 3, 3}, {1}) >= 2);
    SECTION("guards") {
        REQUIRE_THROWS_AS(schmidt_rank(CVector::Zero(8), {2, 2, 2}, {0}), std::domain_error);
        REQUIRE_THROWS_AS(schmidt_rank(bell, {2, 2}, {0, 1}), std::domain_error);
    }
}
