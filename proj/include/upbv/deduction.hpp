// Deduction engine over the zero pattern of an unknown Hermitian measurement
// operator, replaying block-structure proofs into human-readable
// certificates.
//
// Rules:
//   R1 BlockZeros    given orthogonal sets spanning disjoint coordinate
//                    blocks S and T with all cross zero conditions, the S x T
//                    submatrix vanishes.
//   R2 BlockTrivial  given an orthogonal basis of block S with pairwise zero
//                    conditions, and a pivot coordinate whose row is already
//                    zero against the rest of S and which overlaps every
//                    basis vector, E restricted to S is proportional to the
//                    identity.
//   R3 Restrict      drop from a condition's left vector every row whose
//                    couplings into the right vector's support are all known
//                    zero; the shrunken condition often lands in a single
//                    block where R1 applies.
//   R4 Merge         two resolved blocks that share a coordinate share their
//                    diagonal constant.
//   R5 ResidualSolve numeric nullspace for whatever the rules above left
//                    open; records the residual dimension.
//
// The engine is deliberately incomplete: conclusions that need genuine linear
// elimination (not just block bookkeeping) are left to R5, and the
// certificate shows exactly where that happened. certify() re-validates every
// derived zero and diagonal merge against the numeric solution space, so an
// unsound step cannot go unnoticed.

#pragma once

#include "upbv/families.hpp"
#include "upbv/opm.hpp"

#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace upbv {

/// Union-find over diagonal indices; entries in one class are known equal.
struct DiagClasses {
    std::vector<int> parent;
    explicit DiagClasses(int n = 0) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    bool unite(int i, int j) {
        i = find(i);
        j = find(j);
        if (i == j) return false;
        if (j < i) std::swap(i, j);
        parent[j] = i;
        return true;
    }
    int classes() {
        int c = 0;
        for (std::size_t i = 0; i < parent.size(); ++i)
            if (find(static_cast<int>(i)) == static_cast<int>(i)) ++c;
        return c;
    }
};

struct ResolvedBlock {
    std::vector<int> indices;  ///< ascending
};

/// The evolving zero-pattern / diagonal-equality state of the unknown E.
/// known-zero is symmetric (E is Hermitian) and the diagonal is never marked
/// zero, only merged into equality classes.
struct Knowledge {
    int m = 0;
    std::vector<std::uint8_t> zero;  ///< m*m symmetric flags
    DiagClasses classes;
    std::vector<ResolvedBlock> resolved;

    explicit Knowledge(int m_ = 0) : m(m_), zero(static_cast<std::size_t>(m_) * m_, 0), classes(m_) {}
    bool known_zero(int i, int j) const {
        return i != j && zero[static_cast<std::size_t>(i) * m + j] != 0;
    }
    bool mark_zero(int i, int j) {
        if (i == j || known_zero(i, j)) return false;
        zero[static_cast<std::size_t>(i) * m + j] = 1;
        zero[static_cast<std::size_t>(j) * m + i] = 1;
        return true;
    }
    std::size_t zero_count() const {
        std::size_t c = 0;
        for (auto z : zero) c += z;
        return c;
    }
};

enum class RuleId { R1, R2, R3, R4, R5 };

inline const char* to_string(RuleId r) {
    switch (r) {
        case RuleId::R1: return "R1";
        case RuleId::R2: return "R2";
        case RuleId::R3: return "R3";
        case RuleId::R4: return "R4";
        default: return "R5";
    }
}

struct CertStep {
    RuleId rule = RuleId::R1;
    std::vector<std::string> states;            ///< cited state labels
    std::vector<int> S, T;                      ///< affected index sets
    std::string note;                           ///< pivot, restriction, etc.
    std::vector<std::pair<int, int>> zeros;     ///< newly derived zero entries (i<j)
    std::vector<std::pair<int, int>> merges;    ///< newly merged diagonal pairs
    int residual_dim = -1;                      ///< R5 only
};

struct Certificate {
    std::string set_name;
    std::vector<int> dims;
    std::vector<int> measured;
    int m = 0;
    std::vector<CertStep> steps;
    std::vector<std::uint8_t> pattern_after_r1r3;  ///< zero-flag snapshot
    int residual_dim = -1;
    double residual_gap = 0.0;
    std::vector<std::string> notes;
};

namespace detail {

inline std::vector<int> support_of(const CVector& v, double tol) {
    std::vector<int> s;
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > tol * scale) s.push_back(static_cast<int>(i));
    return s;
}

inline bool supported_inside(const CVector& v, const std::vector<int>& S, double tol) {
    const double scale = v.norm();
    std::vector<bool> in(v.size(), false);
    for (int s : S) in[s] = true;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!in[i] && std::abs(v(i)) > tol * scale) return false;
    return true;
}

/// Rank of a family of vectors restricted to the coordinates in S.
inline int rank_on(const std::vector<CVector>& vs, const std::vector<int>& S, double rel_tol) {
    CMatrix m(static_cast<Eigen::Index>(vs.size()), static_cast<Eigen::Index>(S.size()));
    for (std::size_t r = 0; r < vs.size(); ++r)
        for (std::size_t c = 0; c < S.size(); ++c) m(r, c) = vs[r](S[c]);
    return rank(m, rel_tol);
}

/// Proportionality classes of a list of vectors; returns representative ids.
inline std::vector<int> prop_classes(const std::vector<CVector>& vs, double tol) {
    std::vector<int> cls(vs.size(), -1);
    std::vector<int> reps;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (int r : reps)
            if (proportional_kets(vs[i], vs[r], tol)) {
                cls[i] = r;
                break;
            }
        if (cls[i] < 0) {
            cls[i] = static_cast<int>(i);
            reps.push_back(static_cast<int>(i));
        }
    }
    return cls;
}

}  // namespace detail

/// R1 BlockZeros. Marks S x T (and its mirror) zero when the condition list
/// consists of left vectors spanning S, right vectors spanning T, with every
/// left/right combination present. Returns false (no mutation) when any
/// precondition fails.
inline bool r1_block_zeros(Knowledge& k, const std::vector<int>& S, const std::vector<int>& T,
                           const std::vector<std::pair<CVector, CVector>>& conditions,
                           CertStep* step = nullptr, double tol = 1e-9) {
    if (S.empty() || T.empty() || conditions.empty()) return false;
    std::set<int> ss(S.begin(), S.end()), ts(T.begin(), T.end());
    for (int s : ss)
        if (ts.count(s)) return false;  // must be disjoint

    std::vector<CVector> lefts, rights;
    for (const auto& [u, v] : conditions) {
        if (!detail::supported_inside(u, S, tol) || !detail::supported_inside(v, T, tol))
            return false;
        lefts.push_back(u);
        rights.push_back(v);
    }
    // all pairs of distinct left/right rays must carry a condition
    const auto lc = detail::prop_classes(lefts, tol);
    const auto rc = detail::prop_classes(rights, tol);
    std::set<int> lreps(lc.begin(), lc.end()), rreps(rc.begin(), rc.end());
    std::set<std::pair<int, int>> have;
    for (std::size_t i = 0; i < conditions.size(); ++i) have.insert({lc[i], rc[i]});
    if (have.size() != lreps.size() * rreps.size()) return false;

    std::vector<CVector> lrep, rrep;
    for (int r : lreps) lrep.push_back(lefts[r]);
    for (int r : rreps) rrep.push_back(rights[r]);
    if (detail::rank_on(lrep, S, tol) != static_cast<int>(S.size())) return false;
    if (detail::rank_on(rrep, T, tol) != static_cast<int>(T.size())) return false;

    for (int s : S)
        for (int t : T)
            if (k.mark_zero(s, t) && step) step->zeros.emplace_back(std::min(s, t), std::max(s, t));
    if (step) {
        step->rule = RuleId::R1;
        step->S = S;
        step->T = T;
    }
    return true;
}

/// R2 BlockTrivial. basis must be an orthogonal family spanning exactly the
/// coordinates S, with a zero condition available for every unordered basis
/// pair, and pivot must be a coordinate of S whose row is known zero against
/// the rest of S and whose overlap with every basis vector is nonzero.
inline bool r2_block_trivial(Knowledge& k, const std::vector<int>& S,
                             const std::vector<CVector>& basis, int pivot,
                             const std::vector<std::pair<CVector, CVector>>& available,
                             CertStep* step = nullptr, double tol = 1e-9) {
    if (S.empty() || basis.size() != S.size()) return false;
    if (std::find(S.begin(), S.end(), pivot) == S.end()) return false;
    for (const auto& v : basis)
        if (!detail::supported_inside(v, S, tol)) return false;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (std::abs(inner(basis[i], basis[j])) > tol * basis[i].norm() * basis[j].norm())
                return false;  // basis must be orthogonal
    // pairwise zero conditions must be present in the inventory
    auto condition_present = [&](const CVector& a, const CVector& b) {
        for (const auto& [u, v] : available) {
            if (proportional_kets(u, a, tol) && proportional_kets(v, b, tol)) return true;
            if (proportional_kets(u, b, tol) && proportional_kets(v, a, tol)) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (!condition_present(basis[i], basis[j])) return false;
    // pivot row zero against S \ {pivot}, pivot overlaps every basis vector
    for (int s : S)
        if (s != pivot && !k.known_zero(pivot, s)) return false;
    for (const auto& v : basis)
        if (std::abs(v(pivot)) <= tol * v.norm()) return false;

    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = i + 1; j < S.size(); ++j)
            if (k.mark_zero(S[i], S[j]) && step)
                step->zeros.emplace_back(std::min(S[i], S[j]), std::max(S[i], S[j]));
    for (std::size_t i = 1; i < S.size(); ++i)
        if (k.classes.unite(S[0], S[i]) && step) step->merges.emplace_back(S[0], S[i]);
    k.resolved.push_back({S});
    if (step) {
        step->rule = RuleId::R2;
        step->S = S;
        step->note = "pivot " + std::to_string(pivot);
    }
    return true;
}

/// R3 Restrict: zero out every row of x whose couplings into support(y) are
/// all known zero. The result may equal x (nothing learned) or be zero.
inline CVector r3_restrict(const Knowledge& k, const CVector& x, const CVector& y,
                           double tol = 1e-9) {
    const auto ysupp = detail::support_of(y, tol);
    CVector out = x;
    const double scale = x.cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < x.size(); ++r) {
        if (std::abs(x(r)) <= tol * scale) {
            out(r) = 0.0;
            continue;
        }
        bool live = false;
        for (int t : ysupp)
            if (t == static_cast<int>(r) || !k.known_zero(static_cast<int>(r), t)) {
                live = true;
                break;
            }
        if (!live) out(r) = 0.0;
    }
    return out;
}

/// R4 Merge: two resolved blocks sharing a coordinate share their constant.
inline bool r4_merge(Knowledge& k, const ResolvedBlock& s1, const ResolvedBlock& s2,
                     CertStep* step = nullptr) {
    std::set<int> a(s1.indices.begin(), s1.indices.end());
    bool overlap = false;
    for (int i : s2.indices)
        if (a.count(i)) {
            overlap = true;
            break;
        }
    if (!overlap || s1.indices.empty() || s2.indices.empty()) return false;
    const bool merged = k.classes.unite(s1.indices.front(), s2.indices.front());
    if (step) {
        step->rule = RuleId::R4;
        step->S = s1.indices;
        step->T = s2.indices;
        if (merged) step->merges.emplace_back(s1.indices.front(), s2.indices.front());
    }
    return true;
}

/// Re-execute a certificate's recorded deltas from an empty Knowledge.
inline Knowledge replay(const Certificate& cert) {
    Knowledge k(cert.m);
    for (const auto& step : cert.steps) {
        for (auto [i, j] : step.zeros) k.mark_zero(i, j);
        for (auto [i, j] : step.merges) k.classes.unite(i, j);
        if (step.rule == RuleId::R2) k.resolved.push_back({step.S});
    }
    return k;
}

struct CertifyResult {
    Certificate cert;
    SolutionSpace residual;
};

/// Replay the block-structure deduction for a tripartite set and a measured
/// party subset: R1/R3 to a fixed point (the snapshot the certificate
/// reports), then R2/R4 rounds, then the numeric residual solve. Every
/// derived fact is validated against the numeric solution space.
inline CertifyResult certify(const StateSet& set, const MeasuredSubset& measured,
                             const Tolerances& tol = {}) {
    detail::require(set.dims.size() == 3, "certify: three parties required");
    check_measured(measured, 3);
    const auto pairs = active_pairs(set, measured, tol);

    long ml = 1;
    for (int x : measured.parties) ml *= set.dims[x];
    const int m = static_cast<int>(ml);
    const int n = static_cast<int>(set.states.size());

    std::vector<CVector> w(n), u(n);
    const auto unmeas = unmeasured_parties(measured, 3);
    for (int i = 0; i < n; ++i) {
        std::vector<CVector> mf, uf;
        for (int x : measured.parties) mf.push_back(set.states[i].factors[x]);
        for (int x : unmeas) uf.push_back(set.states[i].factors[x]);
        w[i] = kron(mf);
        u[i] = kron(uf);
    }

    // tiles: states grouped by (unmeasured ray class, measured support)
    const auto ucls = detail::prop_classes(u, tol.zero);
    std::map<std::pair<int, std::vector<int>>, std::vector<int>> tile_map;
    for (int i = 0; i < n; ++i)
        tile_map[{ucls[i], detail::support_of(w[i], tol.zero)}].push_back(i);
    struct Tile {
        std::vector<int> members;
        std::vector<int> supp;
        int uray;
    };
    std::vector<Tile> tiles;
    for (auto& [key, members] : tile_map) tiles.push_back({members, key.second, key.first});
    auto tiles_active = [&](const Tile& a, const Tile& b) {
        const CVector& ua = u[a.members.front()];
        const CVector& ub = u[b.members.front()];
        return std::abs(inner(ua, ub)) > tol.zero * ua.norm() * ub.norm();
    };

    Knowledge k(m);
    Certificate cert;
    cert.set_name = set.name;
    cert.dims = set.dims;
    cert.measured = measured.parties;
    cert.m = m;
    cert.notes.push_back(kB1IndexReadingNote);

    auto cite = [&](const std::vector<int>& members) {
        std::vector<std::string> out;
        for (int i : members) out.push_back(set.states[i].label);
        return out;
    };

    // ---- phase 1: R1 and R3-derived R1 to a fixed point ----
    std::set<std::pair<int, int>> r1_done;
    auto r1_pass = [&]() {
        bool changed = false;
        for (std::size_t a = 0; a < tiles.size(); ++a)
            for (std::size_t b = 0; b < tiles.size(); ++b) {
                if (a == b || r1_done.count({static_cast<int>(a), static_cast<int>(b)})) continue;
                if (!tiles_active(tiles[a], tiles[b])) continue;
                std::vector<std::pair<CVector, CVector>> conds;
                for (int i : tiles[a].members)
                    for (int j : tiles[b].members) conds.emplace_back(w[i], w[j]);
                CertStep step;
                if (r1_block_zeros(k, tiles[a].supp, tiles[b].supp, conds, &step, tol.zero)) {
                    r1_done.insert({static_cast<int>(a), static_cast<int>(b)});
                    r1_done.insert({static_cast<int>(b), static_cast<int>(a)});  // mirror is implied
                    if (!step.zeros.empty()) {
                        step.states = cite(tiles[a].members);
                        const auto more = cite(tiles[b].members);
                        step.states.insert(step.states.end(), more.begin(), more.end());
                        cert.steps.push_back(std::move(step));
                        changed = true;
                    }
                }
            }
        return changed;
    };

    // derived conditions produced by R3, grouped by (source tile, target tile)
    struct Derived {
        std::vector<CVector> lefts;  // one per source member, restricted
        std::vector<int> supp;
        int src, dst;
    };
    std::vector<Derived> derived;
    std::set<std::tuple<int, int, std::vector<int>>> derived_seen;
    auto r3_pass = [&]() {
        bool changed = false;
        for (std::size_t a = 0; a < tiles.size(); ++a)
            for (std::size_t b = 0; b < tiles.size(); ++b) {
                if (a == b || !tiles_active(tiles[a], tiles[b])) continue;
                const CVector& y = w[tiles[b].members.front()];
                std::vector<CVector> lefts;
                std::vector<int> supp;
                bool shrunk = false;
                for (int i : tiles[a].members) {
                    CVector r = r3_restrict(k, w[i], y, tol.zero);
                    if (r.norm() <= tol.zero * w[i].norm()) {
                        shrunk = true;  // condition fully absorbed by known zeros
                        continue;
                    }
                    if (detail::support_of(r, tol.zero) != tiles[a].supp) shrunk = true;
                    lefts.push_back(std::move(r));
                }
                if (!shrunk || lefts.empty()) continue;
                supp = detail::support_of(lefts.front(), tol.zero);
                bool same = true;
                for (const auto& l : lefts) same = same && detail::support_of(l, tol.zero) == supp;
                if (!same) continue;
                auto key = std::make_tuple(static_cast<int>(a), static_cast<int>(b), supp);
                if (derived_seen.count(key)) continue;
                derived_seen.insert(key);
                derived.push_back({lefts, supp, static_cast<int>(a), static_cast<int>(b)});
                {
                    CertStep step;
                    step.rule = RuleId::R3;
                    step.states = cite(tiles[a].members);
                    const auto more = cite(tiles[b].members);
                    step.states.insert(step.states.end(), more.begin(), more.end());
                    step.S = supp;
                    step.T = tiles[b].supp;
                    step.note = "left vectors restricted to rows still coupled to the target support";
                    cert.steps.push_back(std::move(step));
                }
                // try R1 on the restricted conditions
                std::vector<std::pair<CVector, CVector>> conds;
                for (const auto& l : lefts)
                    for (int j : tiles[b].members) conds.emplace_back(l, w[j]);
                CertStep step;
                if (r1_block_zeros(k, supp, tiles[b].supp, conds, &step, tol.zero) &&
                    !step.zeros.empty()) {
                    step.states = cite(tiles[a].members);
                    const auto more = cite(tiles[b].members);
                    step.states.insert(step.states.end(), more.begin(), more.end());
                    step.note = "restricted conditions";
                    cert.steps.push_back(std::move(step));
                    changed = true;
                }
            }
        return changed;
    };

    while (r1_pass() | r3_pass()) {
    }
    cert.pattern_after_r1r3 = k.zero;

    // ---- phase 2: R2 / R4 rounds interleaved with further R1/R3 ----
    auto r2_pass = [&]() {
        bool changed = false;
        for (std::size_t t = 0; t < tiles.size(); ++t) {
            const auto& S = tiles[t].supp;
            if (S.size() < 2 || S.size() > tiles[t].members.size() + 1) continue;
            bool already = true;
            for (std::size_t i = 0; i < S.size() && already; ++i)
                for (std::size_t j = i + 1; j < S.size(); ++j)
                    if (!k.known_zero(S[i], S[j])) {
                        already = false;
                        break;
                    }
            if (already) continue;
            // basis: the tile's distinct measured rays, plus at most one
            // restricted vector from another tile landing inside S
            std::vector<CVector> basis;
            std::vector<std::string> cited = cite(tiles[t].members);
            for (int i : tiles[t].members) {
                bool dup = false;
                for (const auto& bvec : basis) dup = dup || proportional_kets(w[i], bvec, tol.zero);
                if (!dup) basis.push_back(w[i]);
            }
            std::vector<std::pair<CVector, CVector>> avail;
            for (int i : tiles[t].members)
                for (int j : tiles[t].members)
                    if (i != j) avail.emplace_back(w[i], w[j]);
            if (basis.size() + 1 == S.size()) {
                for (const auto& dv : derived) {
                    if (dv.dst != static_cast<int>(t)) continue;
                    if (!std::includes(S.begin(), S.end(), dv.supp.begin(), dv.supp.end()))
                        continue;
                    const CVector& extra = dv.lefts.front();
                    bool ok = true;
                    for (const auto& bvec : basis)
                        ok = ok && std::abs(inner(extra, bvec)) <= tol.zero * extra.norm() * bvec.norm();
                    if (!ok) continue;
                    basis.push_back(extra);
                    for (int j : tiles[t].members) {
                        avail.emplace_back(extra, w[j]);
                        avail.emplace_back(w[j], extra);
                    }
                    const auto more = cite(tiles[dv.src].members);
                    cited.insert(cited.end(), more.begin(), more.end());
                    break;
                }
            }
            if (basis.size() != S.size()) continue;
            for (int pivot : S) {
                CertStep step;
                if (r2_block_trivial(k, S, basis, pivot, avail, &step, tol.zero)) {
                    step.states = cited;
                    cert.steps.push_back(std::move(step));
                    changed = true;
                    break;
                }
            }
        }
        return changed;
    };
    auto r4_pass = [&]() {
        bool changed = false;
        for (std::size_t a = 0; a < k.resolved.size(); ++a)
            for (std::size_t b = a + 1; b < k.resolved.size(); ++b) {
                const auto s1 = k.resolved[a], s2 = k.resolved[b];
                if (k.classes.find(s1.indices.front()) == k.classes.find(s2.indices.front()))
                    continue;
                CertStep step;
                if (r4_merge(k, s1, s2, &step) && !step.merges.empty()) {
                    cert.steps.push_back(std::move(step));
                    changed = true;
                }
            }
        return changed;
    };
    while (r2_pass() | r4_pass() | r1_pass() | r3_pass()) {
    }

    // ---- R5: numeric residual, pattern completion, soundness validation ----
    const auto cs = build_constraints(set, measured, tol);
    const auto space = solution_space(cs, tol);
    double scale = 0.0;
    std::vector<CMatrix> elems;
    for (const auto& b : space.basis) {
        elems.push_back(params_to_hermitian(b));
        scale = std::max(scale, elems.back().cwiseAbs().maxCoeff());
    }
    auto zero_everywhere = [&](int i, int j) {
        for (const auto& e : elems)
            if (std::abs(e(i, j)) > 1e-8 * scale) return false;
        return true;
    };
    auto equal_everywhere = [&](int i, int j) {
        for (const auto& e : elems)
            if (std::abs(e(i, i) - e(j, j)) > 1e-8 * scale) return false;
        return true;
    };
    // soundness: every derived fact must hold across the whole solution space
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (k.known_zero(i, j) && !zero_everywhere(i, j))
                throw std::runtime_error("certify: unsound zero at (" + std::to_string(i) + "," +
                                         std::to_string(j) + ")");
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (k.classes.find(i) == k.classes.find(j) && !equal_everywhere(i, j))
                throw std::runtime_error("certify: unsound diagonal merge (" + std::to_string(i) +
                                         "," + std::to_string(j) + ")");

    CertStep r5;
    r5.rule = RuleId::R5;
    r5.residual_dim = space.dim;
    r5.note = "numeric nullspace over the parameters left unresolved";
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (!k.known_zero(i, j) && zero_everywhere(i, j) && k.mark_zero(i, j))
                r5.zeros.emplace_back(i, j);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (k.classes.find(i) != k.classes.find(j) && equal_everywhere(i, j) &&
                k.classes.unite(i, j))
                r5.merges.emplace_back(i, j);
    cert.steps.push_back(std::move(r5));
    cert.residual_dim = space.dim;
    cert.residual_gap = space.gap_ratio;

    return {std::move(cert), space};
}

// ---------------------------------------------------------------------------
// property-test oracles
// ---------------------------------------------------------------------------

struct OracleReport {
    int trials = 0;
    int violations = 0;
    double worst = 0.0;  ///< largest relative magnitude that should have vanished
};

namespace detail {

/// Hermitian nullspace element of a set of <u|E|v> = 0 conditions plus raw
/// parameter constraints, sampled with the given RNG.
inline CMatrix sample_constrained_hermitian(int m,
                                            const std::vector<std::pair<CVector, CVector>>& conds,
                                            const std::vector<RVector>& extra_rows,
                                            std::mt19937_64& rng) {
    RMatrix rows(2 * static_cast<Eigen::Index>(conds.size()) + static_cast<Eigen::Index>(extra_rows.size()),
                 static_cast<Eigen::Index>(m) * m);
    for (std::size_t c = 0; c < conds.size(); ++c)
        constraint_rows(conds[c].first, conds[c].second, rows, 2 * static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < extra_rows.size(); ++r)
        rows.row(2 * conds.size() + r) = extra_rows[r];
    const auto ns = nullspace_real(rows, 1e-9);
    std::normal_distribution<double> g;
    RVector mix(ns.basis.cols());
    for (Eigen::Index i = 0; i < mix.size(); ++i) mix(i) = g(rng);
    return params_to_hermitian({m, ns.basis * mix});
}

inline CMatrix random_orthonormal(int dim, int count, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix a(dim, count);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix> qr(a);
    return CMatrix(qr.householderQ()).leftCols(count);
}

}  // namespace detail

/// BlockZeros oracle: random disjoint S, T with random spanning orthogonal
/// sets; a random Hermitian E satisfying all cross zero conditions must have
/// vanishing S x T blocks.
inline OracleReport block_zeros_oracle(int trials, int n, std::uint64_t seed = 1) {
    detail::require(n >= 2 && n <= 12, "block_zeros_oracle: n must be in [2, 12]");
    std::mt19937_64 rng(seed);
    OracleReport rep;
    rep.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::uniform_int_distribution<int> s_size(1, n - 1);
        const int s = s_size(rng);
        std::uniform_int_distribution<int> t_size(1, n - s);
        const int t = t_size(rng);
        std::vector<int> S(perm.begin(), perm.begin() + s);
        std::vector<int> T(perm.begin() + s, perm.begin() + s + t);

        const CMatrix qs = detail::random_orthonormal(s, s, rng);
        const CMatrix qt = detail::random_orthonormal(t, t, rng);
        std::vector<CVector> psis(s, CVector::Zero(n)), phis(t, CVector::Zero(n));
        for (int c = 0; c < s; ++c)
            for (int r = 0; r < s; ++r) psis[c](S[r]) = qs(r, c);
        for (int c = 0; c < t; ++c)
            for (int r = 0; r < t; ++r) phis[c](T[r]) = qt(r, c);
        std::vector<std::pair<CVector, CVector>> conds;
        for (const auto& p : psis)
            for (const auto& q : phis) conds.emplace_back(p, q);
        const CMatrix e = detail::sample_constrained_hermitian(n, conds, {}, rng);
        const double scale = std::max(1e-30, e.cwiseAbs().maxCoeff());
        double worst = 0.0;
        for (int i : S)
            for (int j : T) worst = std::max(worst, std::abs(e(i, j)) / scale);
        rep.worst = std::max(rep.worst, worst);
        if (worst > 1e-9) ++rep.violations;
    }
    return rep;
}

/// BlockTrivial oracle: Fourier basis with random re-phasing on a random S,
/// pairwise zero conditions plus a pivot row vanishing against the rest of S;
/// the sampled Hermitian E must be proportional to the identity on S.
inline OracleReport block_trivial_oracle(int trials, int n, std::uint64_t seed = 2) {
    detail::require(n >= 1 && n <= 12, "block_trivial_oracle: n must be in [1, 12]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    OracleReport rep;
    rep.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::uniform_int_distribution<int> s_size(1, n);
        const int s = s_size(rng);
        std::vector<int> S(perm.begin(), perm.begin() + s);
        std::sort(S.begin(), S.end());
        // Fourier basis on S, each row re-phased: keeps orthogonality and
        // keeps every pivot overlap at unit modulus
        std::vector<Complex> phase(s);
        for (auto& p : phase) p = std::polar(1.0, angle(rng));
        std::vector<CVector> psis(s, CVector::Zero(n));
        for (int j = 0; j < s; ++j)
            for (int i = 0; i < s; ++i)
                psis[j](S[i]) = phase[i] * root_of_unity(s, static_cast<long>(i) * j);
        std::uniform_int_distribution<int> pick(0, s - 1);
        const int pivot = S[pick(rng)];

        std::vector<std::pair<CVector, CVector>> conds;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j)
                if (i != j) conds.emplace_back(psis[i], psis[j]);
        std::vector<RVector> extra;
        for (int sj : S) {
            if (sj == pivot) continue;
            const int i = std::min(pivot, sj), j = std::max(pivot, sj);
            const int off = herm_pair_offset(n, i, j);
            RVector re = RVector::Zero(static_cast<Eigen::Index>(n) * n);
            RVector im = RVector::Zero(static_cast<Eigen::Index>(n) * n);
            re(off) = 1.0;
            im(off + 1) = 1.0;
            extra.push_back(re);
            extra.push_back(im);
        }
        const CMatrix e = detail::sample_constrained_hermitian(n, conds, extra, rng);
        const double scale = std::max(1e-30, e.cwiseAbs().maxCoeff());
        double worst = 0.0;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                if (i == j) continue;
                worst = std::max(worst, std::abs(e(S[i], S[j])) / scale);
            }
        for (int i = 1; i < s; ++i)
            worst = std::max(worst, std::abs(e(S[i], S[i]) - e(S[0], S[0])) / scale);
        rep.worst = std::max(rep.worst, worst);
        if (worst > 1e-9) ++rep.violations;
    }
    return rep;
}

struct LayerOverlapReport {
    int d = 0;
    double min_modulus = kInf;
    bool all_nonzero = false;
};

/// Cross-layer overlaps of the window vectors: for every pair of valid layers
/// the xi/xi, eta/eta and xi/eta overlaps (at index 1) must be nonzero; the
/// minimum modulus found is reported.
inline LayerOverlapReport check_layer_overlaps(int d, double tol_zero = 1e-9) {
    detail::require(d >= 3, "check_layer_overlaps: d must be >= 3");
    LayerOverlapReport rep;
    rep.d = d;
    rep.all_nonzero = true;
    const int lmax = (d - 3) / 2;
    for (int l1 = 0; l1 <= lmax; ++l1)
        for (int l2 = 0; l2 <= lmax; ++l2) {
            const double o1 = std::abs(inner(xi(d, l1, 1), xi(d, l2, 1)));
            const double o2 = std::abs(inner(eta(d, l1, 1), eta(d, l2, 1)));
            const double o3 = std::abs(inner(xi(d, l1, 1), eta(d, l2, 1)));
            for (double o : {o1, o2, o3}) {
                rep.min_modulus = std::min(rep.min_modulus, o);
                if (o <= tol_zero) rep.all_nonzero = false;
            }
        }
    return rep;
}

}  // namespace upbv
