// Constructors for every state set handled by the verifier, with the size
// accounting that goes with them.
//
// The layered d x d x d family unions \C^(d,d-2k) over k, six blocks per
// layer, each block indexed by (i,j) in Z_{d-1-2k} x Z_{d-1-2k} minus (0,0).
// One printed index set in the source material reads "Z_{d,d-1-2k}" for the
// B1 block; every sibling block uses Z_{d-1-2k}, and only that reading makes
// the blocks symmetric and the size formula come out, so B1 is built the same
// way. Certificates and reports carry a note recording this reading.

#pragma once

#include "upbv/states.hpp"

#include <string>
#include <vector>

namespace upbv {

inline constexpr const char* kB1IndexReadingNote =
    "B1 block index set read as Z_(d-1-2k) x Z_(d-1-2k) \\ {(0,0)}, matching the sibling blocks";

/// d^3 - 8*(floor((d-3)/2) + 1): equals d^3-4d+4 for odd d, d^3-4d+8 for even d.
inline long long expected_size(int d) {
    detail::require(d >= 3, "expected_size: d must be >= 3");
    return static_cast<long long>(d) * d * d - 8LL * ((d - 3) / 2 + 1);
}

namespace detail {

inline std::string block_label(const char* family, int k, int i, int j, bool with_layer) {
    std::string s(family);
    s += '[';
    if (with_layer) s += "k=" + std::to_string(k) + ",";
    s += "i=" + std::to_string(i) + ",j=" + std::to_string(j) + "]";
    return s;
}

/// Append the six blocks of layer k for local dimension d.
inline void append_layer(StateSet& set, int d, int k, bool with_layer_tag) {
    const int n = d - 1 - 2 * k;
    const CVector lo = basis_ket(d, k);          // |k>
    const CVector hi = basis_ket(d, d - 1 - k);  // |d-1-k>
    auto add = [&](const char* fam, int i, int j, CVector a, CVector b, CVector c) {
        set.states.push_back({{std::move(a), std::move(b), std::move(c)},
                              block_label(fam, k, i, j, with_layer_tag)});
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == 0 && j == 0) continue;
            add("A1", i, j, xi(d, k, j), lo, eta(d, k, i));
            add("A2", i, j, xi(d, k, j), eta(d, k, i), hi);
            add("A3", i, j, hi, xi(d, k, j), eta(d, k, i));
            add("B1", i, j, eta(d, k, i), hi, xi(d, k, j));
            add("B2", i, j, eta(d, k, i), xi(d, k, j), lo);
            add("B3", i, j, lo, eta(d, k, i), xi(d, k, j));
        }
}

inline void append_center(StateSet& set, int d) {
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) {
                if (r == 0 && s == 0 && t == 0) continue;
                set.states.push_back({{phi(d, r), phi(d, s), phi(d, t)},
                                      "A0[r=" + std::to_string(r) + ",s=" + std::to_string(s) +
                                          ",t=" + std::to_string(t) + "]"});
            }
}

}  // namespace detail

/// Layered union over k = 0..floor((d-3)/2) for odd d, or k = 0..(d-4)/2 plus
/// the central phi block for even d, plus the stopper.
inline StateSet upb_ddd(int d) {
    detail::require(d >= 3, "upb_ddd: d must be >= 3");
    StateSet set;
    set.dims = {d, d, d};
    set.name = "ddd(d=" + std::to_string(d) + ")";
    const int kmax = (d % 2 == 1) ? (d - 3) / 2 : (d - 4) / 2;
    for (int k = 0; k <= kmax; ++k) detail::append_layer(set, d, k, /*with_layer_tag=*/true);
    if (d % 2 == 0) detail::append_center(set, d);
    set.states.push_back(stopper(d));
    return set;
}

/// The 19-state three-qutrit set: six 3-element blocks plus the stopper.
inline StateSet upb_333() {
    StateSet set;
    set.dims = {3, 3, 3};
    set.name = "333";
    detail::append_layer(set, 3, 0, /*with_layer_tag=*/false);
    set.states.push_back(stopper(3));
    return set;
}

/// The 56-state 4x4x4 set: the 7-element central block, six 8-element blocks
/// and the stopper.
inline StateSet upb_444() {
    StateSet set;
    set.dims = {4, 4, 4};
    set.name = "444";
    detail::append_layer(set, 4, 0, /*with_layer_tag=*/false);
    detail::append_center(set, 4);
    set.states.push_back(stopper(4));
    return set;
}

/// The 8-state bipartite tiles set in 3 x 4. psi5's second factor sums basis
/// kets 0..2 of the 4-dimensional space.
inline StateSet tiles_34() {
    StateSet set;
    set.dims = {3, 4};
    set.name = "tiles34";
    auto e3 = [](int t) { return basis_ket(3, t); };
    auto e4 = [](int t) { return basis_ket(4, t); };
    CVector s3 = ones_ket(3);
    CVector s4 = CVector::Zero(4);
    s4(0) = s4(1) = s4(2) = 1.0;
    set.states.push_back({{e3(0), e4(0) - e4(1)}, "psi1"});
    set.states.push_back({{e3(0) - e3(1), e4(2)}, "psi2"});
    set.states.push_back({{e3(2), e4(1) - e4(2)}, "psi3"});
    set.states.push_back({{e3(1) - e3(2), e4(0)}, "psi4"});
    set.states.push_back({{s3, s4}, "psi5"});
    set.states.push_back({{e3(0), e4(3)}, "psi6"});
    set.states.push_back({{e3(1), e4(3)}, "psi7"});
    set.states.push_back({{e3(2), e4(3)}, "psi8"});
    return set;
}

/// A complement vector of the d=3 family together with the bipartition across
/// which it is claimed to be a product: the named party versus the rest.
struct ComplementVector {
    std::string label;
    CVector vec;             ///< dim 27, flattened last party fastest
    int product_cut_party;   ///< 0 = A|BC, 1 = B|CA, 2 = C|AB
};

/// The three product-complement vectors of the d=3 family.
inline std::vector<ComplementVector> complement_phi_3() {
    const CVector xi0 = xi(3, 0, 0), eta0 = eta(3, 0, 0);
    const CVector e0 = basis_ket(3, 0), e2 = basis_ket(3, 2);
    auto k3 = [](const CVector& a, const CVector& b, const CVector& c) {
        return kron({a, b, c});
    };
    std::vector<ComplementVector> out;
    out.push_back({"phi1", k3(xi0, e0, eta0) - k3(xi0, eta0, e2), 0});
    out.push_back({"phi2", k3(e0, eta0, xi0) - k3(eta0, e2, xi0), 2});
    out.push_back({"phi3", k3(e2, xi0, eta0) - k3(eta0, xi0, e0), 1});
    return out;
}

/// Ray-set equality: every state of a matches a distinct state of b up to a
/// scalar, and vice versa.
inline bool same_ray_set(const StateSet& a, const StateSet& b, double tol = 1e-9) {
    if (a.dims != b.dims || a.states.size() != b.states.size()) return false;
    std::vector<bool> used(b.states.size(), false);
    for (const auto& s : a.states) {
        bool found = false;
        for (std::size_t j = 0; j < b.states.size(); ++j) {
            if (used[j]) continue;
            if (proportional_states(s, b.states[j], tol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace upbv
