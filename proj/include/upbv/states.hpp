// Local Fourier-window vectors and labeled multipartite product states.
// States are kept unnormalized with exact root-of-unity coefficients so that
// orthogonality tests stay exact up to rounding; consumers normalize on
// demand.

#pragma once

#include "upbv/linalg.hpp"

#include <string>
#include <unordered_set>
#include <vector>

namespace upbv {

/// One product state: one local factor per party plus a human-readable label
/// used by certificates and diagnostics (e.g. "A1[i=0,j=1]").
struct ProductState {
    std::vector<CVector> factors;
    std::string label;
};

struct StateSet {
    std::vector<int> dims;
    std::vector<ProductState> states;
    std::string name;
};

/// eta(d, k, i): dim-d ket with coefficient w_{d-1-2k}^{i(t-k)} at position t
/// on the window k <= t <= d-2-k, zero elsewhere.
inline CVector eta(int d, int k, int i) {
    detail::require(d >= 3, "eta: d must be >= 3");
    detail::require(k >= 0 && 2 * k <= d - 3, "eta: layer k out of range");
    const int n = d - 1 - 2 * k;
    detail::require(i >= 0 && i < n, "eta: index i out of range");
    CVector v = CVector::Zero(d);
    for (int t = k; t <= d - 2 - k; ++t) v(t) = root_of_unity(n, static_cast<long>(i) * (t - k));
    return v;
}

/// xi(d, k, j): as eta but on the window shifted one position up.
inline CVector xi(int d, int k, int j) {
    detail::require(d >= 3, "xi: d must be >= 3");
    detail::require(k >= 0 && 2 * k <= d - 3, "xi: layer k out of range");
    const int n = d - 1 - 2 * k;
    detail::require(j >= 0 && j < n, "xi: index j out of range");
    CVector v = CVector::Zero(d);
    for (int t = k; t <= d - 2 - k; ++t) v(t + 1) = root_of_unity(n, static_cast<long>(j) * (t - k));
    return v;
}

/// phi(d, i) = |(d-2)/2> + (-1)^i |d/2>, defined for even d only.
inline CVector phi(int d, int i) {
    detail::require(d >= 4 && d % 2 == 0, "phi: d must be even and >= 4");
    detail::require(i == 0 || i == 1, "phi: i must be 0 or 1");
    CVector v = CVector::Zero(d);
    v((d - 2) / 2) = 1.0;
    v(d / 2) = (i == 0) ? 1.0 : -1.0;
    return v;
}

inline CVector basis_ket(int d, int t) {
    detail::require(d >= 1 && t >= 0 && t < d, "basis_ket: index out of range");
    CVector v = CVector::Zero(d);
    v(t) = 1.0;
    return v;
}

inline CVector ones_ket(int d) { return CVector::Constant(d, Complex(1.0, 0.0)); }

/// The all-ones tripartite stopper state |S_d>.
inline ProductState stopper(int d) {
    detail::require(d >= 2, "stopper: d must be >= 2");
    return {{ones_ket(d), ones_ket(d), ones_ket(d)}, "S"};
}

/// Product of the per-party factor inner products.
inline Complex product_inner(const ProductState& p, const ProductState& q) {
    detail::require(p.factors.size() == q.factors.size(), "product_inner: party count mismatch");
    Complex acc(1.0, 0.0);
    for (std::size_t x = 0; x < p.factors.size(); ++x) acc *= inner(p.factors[x], q.factors[x]);
    return acc;
}

inline double product_norm(const ProductState& p) {
    double acc = 1.0;
    for (const auto& f : p.factors) acc *= f.norm();
    return acc;
}

inline CVector state_vector(const ProductState& p) { return kron(p.factors); }

/// Proportionality of unnormalized states: |<p|q>|^2 = <p|p><q|q> up to tol.
inline bool proportional_states(const ProductState& p, const ProductState& q, double tol = 1e-9) {
    if (p.factors.size() != q.factors.size()) return false;
    for (std::size_t x = 0; x < p.factors.size(); ++x)
        if (p.factors[x].size() != q.factors[x].size()) return false;
    const double np = product_norm(p), nq = product_norm(q);
    const double ov = std::abs(product_inner(p, q));
    return ov * ov >= (1.0 - tol) * np * np * nq * nq;
}

inline bool proportional_kets(const CVector& a, const CVector& b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    const double ov = std::abs(inner(a, b));
    return ov * ov >= (1.0 - tol) * a.squaredNorm() * b.squaredNorm();
}

/// Structural validation: factor dims match the set's dims, no zero factor,
/// labels unique. Throws std::domain_error on the first violation.
inline void check_valid(const StateSet& set) {
    std::unordered_set<std::string> labels;
    for (const auto& s : set.states) {
        detail::require(s.factors.size() == set.dims.size(),
                        "state set: party count mismatch in '" + s.label + "'");
        for (std::size_t x = 0; x < s.factors.size(); ++x) {
            detail::require(s.factors[x].size() == set.dims[x],
                            "state set: factor dim mismatch in '" + s.label + "'");
            detail::require(s.factors[x].norm() > 0, "state set: zero factor in '" + s.label + "'");
            detail::require_finite(s.factors[x], "state set");
        }
        detail::require(labels.insert(s.label).second, "state set: duplicate label '" + s.label + "'");
    }
}

/// Largest off-diagonal Gram magnitude relative to the member norms.
inline double max_gram_offdiag(const StateSet& set) {
    double worst = 0.0;
    for (std::size_t a = 0; a < set.states.size(); ++a)
        for (std::size_t b = a + 1; b < set.states.size(); ++b) {
            const double nn =
                product_norm(set.states[a]) * product_norm(set.states[b]);
            worst = std::max(worst, std::abs(product_inner(set.states[a], set.states[b])) / nn);
        }
    return worst;
}

/// Pairwise orthogonality at tolerance tol (relative).
inline bool pairwise_orthogonal(const StateSet& set, double tol,
                                std::pair<std::string, std::string>* offending = nullptr) {
    for (std::size_t a = 0; a < set.states.size(); ++a)
        for (std::size_t b = a + 1; b < set.states.size(); ++b) {
            const double nn = product_norm(set.states[a]) * product_norm(set.states[b]);
            if (std::abs(product_inner(set.states[a], set.states[b])) > tol * nn) {
                if (offending) *offending = {set.states[a].label, set.states[b].label};
                return false;
            }
        }
    return true;
}

}  // namespace upbv
