#include "upbv/entangle.hpp"
#include "upbv/families.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace upbv;

TEST_CASE("expected sizes") {
    REQUIRE(expected_size(3) == 19);
    REQUIRE(expected_size(4) == 56);
    REQUIRE(expected_size(5) == 109);
    REQUIRE(expected_size(6) == 200);
    REQUIRE(expected_size(7) == 319);
    const auto closed_form = [](long long d) {
        return d % 2 == 1 ? d * d * d - 4 * d + 4 : d * d * d - 4 * d + 8;
    };
    for (int d = 3; d <= 12; ++d) REQUIRE(expected_size(d) == closed_form(d));
    REQUIRE_THROWS_AS(expected_size(2), std::domain_error);
}

TEST_CASE("family construction counts and orthogonality") {
    for (int d = 3; d <= 8; ++d) {
        const auto set = upb_ddd(d);
        REQUIRE_NOTHROW(check_valid(set));
        REQUIRE(static_cast<long long>(set.states.size()) == expected_size(d));
        if (d <= 6) REQUIRE(max_gram_offdiag(set) <= 1e-10);
    }
    REQUIRE_THROWS_AS(upb_ddd(2), std::domain_error);
}

TEST_CASE("the three-qutrit family") {
    const auto set = upb_333();
    REQUIRE(set.states.size() == 19);
    REQUIRE(max_gram_offdiag(set) <= 1e-10);

    SECTION("named member with exact factors") {
        bool found = false;
        for (const auto& s : set.states)
            if (s.label == "A1[i=0,j=1]") {
                found = true;
                REQUIRE(s.factors[0].isApprox(xi(3, 0, 1)));
                REQUIRE(s.factors[1].isApprox(basis_ket(3, 0)));
                REQUIRE(s.factors[2].isApprox(eta(3, 0, 0)));
            }
        REQUIRE(found);
    }
    SECTION("six 3-element blocks plus stopper") {
        int stoppers = 0;
        for (const auto& s : set.states) stoppers += s.label == "S";
        REQUIRE(stoppers == 1);
    }
}

TEST_CASE("the 4x4x4 family") {
    const auto set = upb_444();
    REQUIRE(set.states.size() == 56);
    REQUIRE(max_gram_offdiag(set) <= 1e-10);
    int center = 0;
    for (const auto& s : set.states) center += s.label.rfind("A0[", 0) == 0;
    REQUIRE(center == 7);
}

TEST_CASE("general family agrees with the explicit small families ray by ray") {
    REQUIRE(same_ray_set(upb_ddd(3), upb_333()));
    REQUIRE(same_ray_set(upb_ddd(4), upb_444()));
}

TEST_CASE("cyclic invariance of the layered families") {
    for (int d = 3; d <= 6; ++d) {
        const auto set = upb_ddd(d);
        std::vector<bool> used(set.states.size(), false);
        for (const auto& s : set.states) {
            const ProductState rot{{s.factors[1], s.factors[2], s.factors[0]}, s.label};
            bool hit = false;
            for (std::size_t j = 0; j < set.states.size() && !hit; ++j) {
                if (used[j]) continue;
                if (proportional_states(rot, set.states[j])) {
                    used[j] = true;
                    hit = true;
                }
            }
            REQUIRE(hit);
        }
    }
}

TEST_CASE("tiles in 3x4") {
    const auto set = tiles_34();
    REQUIRE(set.states.size() == 8);
    REQUIRE(max_gram_offdiag(set) <= 1e-10);
    bool found = false;
    for (const auto& s : set.states)
        if (s.label == "psi6") {
            found = true;
            REQUIRE(s.factors[0].isApprox(basis_ket(3, 0)));
            REQUIRE(s.factors[1].isApprox(basis_ket(4, 3)));
        }
    REQUIRE(found);
}

TEST_CASE("complement vectors of the d=3 family") {
    const auto phis = complement_phi_3();
    REQUIRE(phis.size() == 3);
    const auto set = upb_333();

    SECTION("orthogonal to every member") {
        for (const auto& cvec : phis)
            for (const auto& s : set.states) {
                const CVector v = state_vector(s);
                REQUIRE(std::abs(inner(v, cvec.vec)) <= 1e-10 * v.norm() * cvec.vec.norm());
            }
    }
    SECTION("claimed product cuts have Schmidt rank 1, the others do not") {
        for (const auto& cvec : phis) {
            for (int party = 0; party < 3; ++party) {
                const int r = schmidt_rank(cvec.vec, {3, 3, 3}, {party});
                if (party == cvec.product_cut_party)
                    REQUIRE(r == 1);
                else
                    REQUIRE(r >= 2);
            }
        }
        REQUIRE(phis[0].product_cut_party == 0);  // A|BC
    }
}
