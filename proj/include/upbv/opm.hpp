// The core verifier: assemble the homogeneous linear system an
// orthogonality-preserving measurement operator E on a chosen party subset
// must satisfy, compute its Hermitian solution space, and render the
// triviality verdict.
//
// A pair of member states constrains E exactly when their unmeasured factors
// overlap; the constraint is <x_meas| E |y_meas> = 0, expanded over the real
// Hermitian parameter layout (two real rows per pair). The identity operator
// always solves the system because the members themselves are orthogonal, so
// "only trivial measurements" is exactly "solution dimension 1". Positive
// semidefiniteness is never imposed: if the Hermitian solution space has
// dimension >= 2 it contains a PSD non-trivial element I + eps*X, so the
// dimension criterion is equivalent.

#pragma once

#include "upbv/states.hpp"

#include <algorithm>
#include <array>
#include <future>
#include <string>
#include <vector>

namespace upbv {

/// The measured parties (ascending, nonempty proper subset).
struct MeasuredSubset {
    std::vector<int> parties;
};

inline std::vector<int> unmeasured_parties(const MeasuredSubset& measured, int nparties) {
    std::vector<int> out;
    for (int x = 0; x < nparties; ++x)
        if (std::find(measured.parties.begin(), measured.parties.end(), x) ==
            measured.parties.end())
            out.push_back(x);
    return out;
}

inline void check_measured(const MeasuredSubset& measured, int nparties) {
    detail::require(!measured.parties.empty() &&
                        measured.parties.size() < static_cast<std::size_t>(nparties),
                    "measured subset must be a nonempty proper subset of the parties");
    for (std::size_t i = 0; i < measured.parties.size(); ++i) {
        detail::require(measured.parties[i] >= 0 && measured.parties[i] < nparties,
                        "measured subset: party index out of range");
        detail::require(i == 0 || measured.parties[i] > measured.parties[i - 1],
                        "measured subset: parties must be strictly ascending");
    }
}

struct ActivePair {
    int a = 0, b = 0;            ///< state indices, a < b
    Complex unmeasured_overlap;  ///< product of unmeasured factor inners
};

/// All unordered pairs whose unmeasured factors overlap; only these pairs
/// constrain E. Precondition: pairwise orthogonal set.
inline std::vector<ActivePair> active_pairs(const StateSet& set, const MeasuredSubset& measured,
                                            const Tolerances& tol = {}) {
    check_measured(measured, static_cast<int>(set.dims.size()));
    std::pair<std::string, std::string> bad;
    if (!pairwise_orthogonal(set, tol.zero, &bad))
        throw std::invalid_argument("active_pairs: set not pairwise orthogonal: '" + bad.first +
                                    "' vs '" + bad.second + "'");
    const auto unmeas = unmeasured_parties(measured, static_cast<int>(set.dims.size()));
    std::vector<ActivePair> out;
    for (std::size_t a = 0; a < set.states.size(); ++a)
        for (std::size_t b = a + 1; b < set.states.size(); ++b) {
            Complex ov(1.0, 0.0);
            double nn = 1.0;
            for (int x : unmeas) {
                ov *= inner(set.states[a].factors[x], set.states[b].factors[x]);
                nn *= set.states[a].factors[x].norm() * set.states[b].factors[x].norm();
            }
            if (std::abs(ov) > tol.zero * nn)
                out.push_back({static_cast<int>(a), static_cast<int>(b), ov});
        }
    return out;
}

/// Real linear system over the Hermitian parameter vector, two rows per
/// active pair, each complex constraint annotated with its generating pair.
struct ConstraintSystem {
    int m = 0;     ///< measured operator dimension
    RMatrix rows;  ///< (2 * #pairs) x m^2
    struct Provenance {
        std::string label_a, label_b;
        Complex unmeasured_overlap;
    };
    std::vector<Provenance> provenance;  ///< one entry per complex constraint
};

namespace detail {

/// Expand <u|E|v> = 0 over the Hermitian parameter layout into two real rows.
inline void constraint_rows(const CVector& u, const CVector& v, RMatrix& rows, Eigen::Index at) {
    const int m = static_cast<int>(u.size());
    rows.row(at).setZero();
    rows.row(at + 1).setZero();
    // C(i,j) = conj(u_i) v_j; coefficient of a_ii is C(i,i); for i<j the
    // coefficients of (Re a_ij, Im a_ij) are C(i,j)+C(j,i) and i*(C(i,j)-C(j,i)).
    const CVector uc = u.conjugate();
    int off = m;
    for (int i = 0; i < m; ++i) {
        const Complex cii = uc(i) * v(i);
        rows(at, i) = cii.real();
        rows(at + 1, i) = cii.imag();
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const Complex cij = uc(i) * v(j);
            const Complex cji = uc(j) * v(i);
            const Complex s = cij + cji;
            const Complex d = cij - cji;  // coeff of Im a_ij is i*d
            rows(at, off) = s.real();
            rows(at, off + 1) = -d.imag();
            rows(at + 1, off) = s.imag();
            rows(at + 1, off + 1) = d.real();
            off += 2;
        }
}

}  // namespace detail

inline ConstraintSystem build_constraints(const StateSet& set, const MeasuredSubset& measured,
                                          const Tolerances& tol = {}) {
    const auto pairs = active_pairs(set, measured, tol);
    ConstraintSystem cs;
    long m = 1;
    for (int x : measured.parties) m *= set.dims[x];
    cs.m = static_cast<int>(m);
    cs.rows.resize(2 * static_cast<Eigen::Index>(pairs.size()), m * m);
    cs.provenance.reserve(pairs.size());

    std::vector<CVector> meas(set.states.size());
    auto measured_vector = [&](int idx) -> const CVector& {
        if (meas[idx].size() == 0) {
            std::vector<CVector> fs;
            for (int x : measured.parties) fs.push_back(set.states[idx].factors[x]);
            meas[idx] = kron(fs);
        }
        return meas[idx];
    };
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        detail::constraint_rows(measured_vector(pairs[p].a), measured_vector(pairs[p].b), cs.rows,
                                2 * static_cast<Eigen::Index>(p));
        cs.provenance.push_back({set.states[pairs[p].a].label, set.states[pairs[p].b].label,
                                 pairs[p].unmeasured_overlap});
    }
    return cs;
}

/// Nullspace of the constraint rows as a Hermitian solution space. The
/// identity direction must be inside the computed space; if it is not, the
/// rank tolerance failed and the result would be meaningless.
inline SolutionSpace solution_space(const ConstraintSystem& cs, const Tolerances& tol = {}) {
    const auto ns = nullspace_real(cs.rows, tol.rank);
    SolutionSpace space;
    space.dim = static_cast<int>(ns.basis.cols());
    space.gap_ratio = ns.gap_ratio;
    space.basis.reserve(space.dim);
    for (int c = 0; c < space.dim; ++c)
        space.basis.push_back({cs.m, ns.basis.col(c)});

    RVector id = RVector::Zero(static_cast<Eigen::Index>(cs.m) * cs.m);
    id.head(cs.m).setConstant(1.0);
    const RVector resid = id - ns.basis * (ns.basis.transpose() * id);
    if (resid.norm() > 1e-8 * id.norm())
        throw std::runtime_error(
            "solution_space: identity not contained in the computed space (tolerance failure)");
    return space;
}

enum class Triviality { TRIVIAL, NONTRIVIAL, INCONCLUSIVE };

inline const char* to_string(Triviality t) {
    switch (t) {
        case Triviality::TRIVIAL: return "TRIVIAL";
        case Triviality::NONTRIVIAL: return "NONTRIVIAL";
        default: return "INCONCLUSIVE";
    }
}

struct OpmVerdict {
    Triviality kind = Triviality::INCONCLUSIVE;
    int dim = 0;
    double gap_ratio = 0.0;
    SolutionSpace space;
};

/// Verdict mapping: TRIVIAL iff the space is one-dimensional (necessarily the
/// identity ray) with a confident gap; NONTRIVIAL iff dim >= 2 with a
/// confident gap; INCONCLUSIVE when the gap is below gap_min or the single
/// direction fails the identity alignment check.
inline OpmVerdict opm_verdict_from(SolutionSpace space, const Tolerances& tol = {}) {
    OpmVerdict v;
    v.dim = space.dim;
    v.gap_ratio = space.gap_ratio;
    v.space = std::move(space);
    if (v.gap_ratio < tol.gap_min) {
        v.kind = Triviality::INCONCLUSIVE;
    } else if (v.dim == 1) {
        RVector id = RVector::Zero(v.space.basis[0].params.size());
        id.head(v.space.basis[0].m).setConstant(1.0);
        id.normalize();
        const double align = std::abs(id.dot(v.space.basis[0].params));
        v.kind = align >= 1.0 - 1e-8 ? Triviality::TRIVIAL : Triviality::INCONCLUSIVE;
    } else {
        v.kind = Triviality::NONTRIVIAL;
    }
    return v;
}

inline OpmVerdict is_trivial_opm(const StateSet& set, const MeasuredSubset& measured,
                                 const Tolerances& tol = {}) {
    return opm_verdict_from(solution_space(build_constraints(set, measured, tol), tol), tol);
}

/// True iff the cyclic relabeling (a,b,c) -> (b,c,a) maps the set onto itself
/// as a set of rays. False (not an error) for sets where the relabeling does
/// not even typecheck, e.g. unequal dims or a different party count.
inline bool cyclic_invariant(const StateSet& set, double tol = 1e-9) {
    if (set.dims.size() != 3 || set.dims[0] != set.dims[1] || set.dims[1] != set.dims[2])
        return false;
    std::vector<bool> used(set.states.size(), false);
    for (const auto& s : set.states) {
        ProductState rotated{{s.factors[1], s.factors[2], s.factors[0]}, s.label};
        bool found = false;
        for (std::size_t j = 0; j < set.states.size(); ++j) {
            if (used[j]) continue;
            if (proportional_states(rotated, set.states[j], tol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

/// Verdicts for the three 2-party measured subsets BC, CA, AB of a tripartite
/// set. When use_symmetry is set and the set is cyclically invariant, only BC
/// is computed and the other two inherit its verdict; the provenance string
/// records which happened. The overall verdict is TRIVIAL only if all three
/// are.
struct BipartitionReport {
    std::array<OpmVerdict, 3> verdicts;    ///< order: BC, CA, AB
    std::array<std::string, 3> provenance;
    std::array<std::string, 3> cut_names{"BC", "CA", "AB"};
    bool all_trivial = false;
    bool any_inconclusive = false;
};

inline BipartitionReport strongest_nonlocality(const StateSet& set, bool use_symmetry,
                                               const Tolerances& tol = {}, int jobs = 1) {
    detail::require(set.dims.size() == 3, "strongest_nonlocality: three parties required");
    const std::array<MeasuredSubset, 3> cuts{MeasuredSubset{{1, 2}}, MeasuredSubset{{0, 2}},
                                             MeasuredSubset{{0, 1}}};
    BipartitionReport rep;
    const bool symmetric = use_symmetry && cyclic_invariant(set, tol.zero);
    if (symmetric) {
        rep.verdicts[0] = is_trivial_opm(set, cuts[0], tol);
        rep.provenance[0] = "computed";
        for (int c : {1, 2}) {
            rep.verdicts[c] = rep.verdicts[0];
            rep.provenance[c] = "inherited: cyclic invariance makes all three cuts equivalent";
        }
    } else {
        if (jobs > 1) {
            std::array<std::future<OpmVerdict>, 3> fut;
            for (int c = 0; c < 3; ++c)
                fut[c] = std::async(std::launch::async,
                                    [&, c] { return is_trivial_opm(set, cuts[c], tol); });
            for (int c = 0; c < 3; ++c) rep.verdicts[c] = fut[c].get();
        } else {
            for (int c = 0; c < 3; ++c) rep.verdicts[c] = is_trivial_opm(set, cuts[c], tol);
        }
        for (int c = 0; c < 3; ++c) rep.provenance[c] = "computed";
    }
    rep.all_trivial = true;
    for (const auto& v : rep.verdicts) {
        rep.all_trivial = rep.all_trivial && v.kind == Triviality::TRIVIAL;
        rep.any_inconclusive = rep.any_inconclusive || v.kind == Triviality::INCONCLUSIVE;
    }
    return rep;
}

}  // namespace upbv
