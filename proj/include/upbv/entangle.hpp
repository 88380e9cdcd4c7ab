// The complement mixed state of an orthogonal product set, its PPT report,
// and the range-criterion entanglement certificate.
//
// For a set of t orthogonal states spanning a subspace with projector P in a
// D-dimensional space, the complement state is rho = (I - P) / (D - t): the
// normalization is forced by trace(I - P) = D - t. When the defining set is a
// UPB, the range of rho contains no product state, so rho cannot be fully
// separable; nothing stronger is claimed by the certificate.

#pragma once

#include "upbv/unextend.hpp"

#include <string>
#include <utility>
#include <vector>

namespace upbv {

struct DensityMatrix {
    std::vector<int> dims;
    CMatrix rho;
};

/// Projector onto the span of a pairwise-orthogonal set: the sum of the
/// normalized member projectors. Hermitian, idempotent, rank = |set|.
inline CMatrix span_projector(const StateSet& set, const Tolerances& tol = {}) {
    std::pair<std::string, std::string> bad;
    if (!pairwise_orthogonal(set, tol.zero, &bad))
        throw std::invalid_argument("span_projector: set not pairwise orthogonal: '" + bad.first +
                                    "' vs '" + bad.second + "'");
    long side = 1;
    for (int d : set.dims) side *= d;
    CMatrix p = CMatrix::Zero(side, side);
    for (const auto& s : set.states) {
        const CVector v = state_vector(s);
        p.noalias() += (v * v.adjoint()) / v.squaredNorm();
    }
    return p;
}

/// rho = (I - P) / (D - t). Requires the set to be a UPB; pass assume_upb
/// when the caller has already established that (the check is a full cover
/// search).
inline DensityMatrix upb_mixed_state(const StateSet& set, bool assume_upb = false,
                                     const Tolerances& tol = {}) {
    if (!assume_upb) {
        const auto v = is_upb(set, tol);
        if (v.status != UpbStatus::UPB)
            throw std::invalid_argument("upb_mixed_state: defining set is not a UPB" +
                                        (v.diagnostic.empty() ? "" : " (" + v.diagnostic + ")"));
    }
    long side = 1;
    for (int d : set.dims) side *= d;
    const long t = static_cast<long>(set.states.size());
    detail::require(t < side, "upb_mixed_state: set already spans the whole space");
    DensityMatrix rho;
    rho.dims = set.dims;
    rho.rho = (CMatrix::Identity(side, side) - span_projector(set, tol)) /
              static_cast<double>(side - t);
    return rho;
}

/// Minimum eigenvalue of the partial transpose for each bipartition up to
/// complement symmetry (transposing the complement gives the transposed
/// matrix, which has the same spectrum). For three parties: A|BC, B|CA, C|AB.
inline std::vector<std::pair<std::string, double>> ppt_report(const DensityMatrix& rho) {
    const int n = static_cast<int>(rho.dims.size());
    detail::require(n >= 2, "ppt_report: at least two parties required");
    std::vector<std::pair<std::string, double>> out;
    auto name_of = [&](const std::vector<int>& mask) {
        std::string lhs, rhs;
        for (int x = 0; x < n; ++x) {
            const char c = static_cast<char>('A' + x);
            if (std::find(mask.begin(), mask.end(), x) != mask.end())
                lhs += c;
            else
                rhs += c;
        }
        return lhs + "|" + rhs;
    };
    if (n == 3) {
        for (int x : {0, 1, 2}) {
            std::vector<int> mask{(x + 0) % 3};
            // cyclic complement naming: A|BC, B|CA, C|AB
            std::string nm{static_cast<char>('A' + x)};
            nm += "|";
            nm += static_cast<char>('A' + (x + 1) % 3);
            nm += static_cast<char>('A' + (x + 2) % 3);
            const auto pt = partial_transpose(rho.rho, rho.dims, mask);
            out.emplace_back(nm, eig_hermitian(pt)(0));
        }
        return out;
    }
    // general case: one representative per complement class (subsets holding party 0)
    for (unsigned bits = 1; bits < (1u << n); ++bits) {
        if (!(bits & 1u) || bits == (1u << n) - 1) continue;
        std::vector<int> mask;
        for (int x = 0; x < n; ++x)
            if (bits >> x & 1) mask.push_back(x);
        const auto pt = partial_transpose(rho.rho, rho.dims, mask);
        out.emplace_back(name_of(mask), eig_hermitian(pt)(0));
    }
    return out;
}

struct RangeCertificate {
    bool certified = false;
    UpbVerdict upb;
    std::string statement;
};

/// Range criterion: if the defining set is a UPB, the range of the complement
/// state contains no product state, so the state is not fully separable. The
/// certificate states exactly that implication; separability questions across
/// individual bipartitions are outside its reach.
inline RangeCertificate range_entanglement_certificate(const StateSet& set,
                                                       const Tolerances& tol = {}) {
    RangeCertificate cert;
    cert.upb = is_upb(set, tol);
    if (cert.upb.status == UpbStatus::UPB) {
        cert.certified = true;
        cert.statement =
            "the defining set is a UPB, so the complement state's range contains no product "
            "state and the state is not fully separable; non-separability across individual "
            "bipartitions is not established by this check";
    } else {
        cert.certified = false;
        cert.statement = cert.upb.status == UpbStatus::EXTENDIBLE
                             ? "certificate refused: the set admits a product extension, so the "
                               "range criterion does not apply"
                             : "certificate refused: input is not a valid orthogonal product set";
    }
    return cert;
}

/// Rank of the vector reshaped along the given bipartition (cut parties form
/// the rows). Zero vector is a domain error.
inline int schmidt_rank(const CVector& v, const std::vector<int>& dims,
                        const std::vector<int>& cut_parties, double rel_tol = 1e-9) {
    long side = 1;
    for (int d : dims) side *= d;
    detail::require(v.size() == side, "schmidt_rank: vector length must match dims");
    detail::require(v.norm() > 0, "schmidt_rank: zero vector");
    const int n = static_cast<int>(dims.size());
    detail::require(!cut_parties.empty() && cut_parties.size() < static_cast<std::size_t>(n),
                    "schmidt_rank: cut must be a nonempty proper subset");
    std::vector<bool> in_cut(n, false);
    for (int p : cut_parties) {
        detail::require(p >= 0 && p < n, "schmidt_rank: invalid party in cut");
        in_cut[p] = true;
    }
    long rows = 1, cols = 1;
    for (int x = 0; x < n; ++x) (in_cut[x] ? rows : cols) *= dims[x];
    CMatrix mat(rows, cols);
    for (long idx = 0; idx < side; ++idx) {
        const auto digits = detail::unflatten(idx, dims);
        long r = 0, c = 0;
        for (int x = 0; x < n; ++x) {
            if (in_cut[x])
                r = r * dims[x] + digits[x];
            else
                c = c * dims[x] + digits[x];
        }
        mat(r, c) = v(idx);
    }
    return rank(mat, rel_tol);
}

}  // namespace upbv
