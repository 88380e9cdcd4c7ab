// Dense complex linear algebra with tolerance-disciplined rank, nullspace and
// spectral routines. Everything downstream (constraint solving, PPT checks,
// unextendibility search) sits on top of this header.
//
// Conventions fixed here and used throughout:
//   * inner products are conjugate-linear in the FIRST argument,
//   * multi-indices flatten with the LAST party fastest
//     (|i>_B |j>_C  <->  index i*d_C + j),
//   * rank/nullspace decisions are singular-value based and always carry a
//     gap ratio so callers can tell a confident decision from a marginal one.

#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace upbv {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Central tolerance record. All thresholds are relative; the defaults leave
/// several orders of magnitude of headroom for coefficient families built
/// from sums of roots of unity at the dimensions handled here.
struct Tolerances {
    double zero = 1e-9;      ///< scalar zero tests (relative to norms)
    double rank = 1e-9;      ///< SVD rank cutoff (relative to sigma_max)
    double psd = 1e-10;      ///< permitted negative slack in PSD checks
    double gap_min = 1e6;    ///< minimum gap ratio for a confident verdict
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

template <typename M>
void require_finite(const M& m, const char* what) {
    if (!m.allFinite()) throw std::domain_error(std::string(what) + ": non-finite entry");
}

}  // namespace detail

/// e^(2*pi*i*k/n). Domain error for n < 1.
inline Complex root_of_unity(long n, long k) {
    detail::require(n >= 1, "root_of_unity: n must be >= 1");
    long r = k % n;
    if (r < 0) r += n;
    if (r == 0) return {1.0, 0.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
}

/// Tensor product of local factors, last factor index fastest.
inline CVector kron(const std::vector<CVector>& factors) {
    detail::require(!factors.empty(), "kron: at least one factor required");
    CVector out = factors.front();
    detail::require_finite(out, "kron");
    for (std::size_t f = 1; f < factors.size(); ++f) {
        const CVector& v = factors[f];
        detail::require_finite(v, "kron");
        CVector next(out.size() * v.size());
        for (Eigen::Index i = 0; i < out.size(); ++i)
            next.segment(i * v.size(), v.size()) = out[i] * v;
        out.swap(next);
    }
    return out;
}

/// <u|v>, conjugate-linear in u.
inline Complex inner(const CVector& u, const CVector& v) {
    detail::require(u.size() == v.size(), "inner: dimension mismatch");
    detail::require_finite(u, "inner");
    detail::require_finite(v, "inner");
    return u.dot(v);  // Eigen's dot conjugates the left argument
}

/// Number of singular values above rel_tol * sigma_max. Zero matrix has rank 0.
/// Rank queries are all small-to-medium here, so the one-sided Jacobi SVD is
/// used throughout; Eigen 3.4's divide-and-conquer SVD miscomputes structured
/// rank-deficient inputs once past its small-matrix fallback.
inline int rank(const CMatrix& a, double rel_tol) {
    detail::require(rel_tol > 0, "rank: rel_tol must be positive");
    detail::require_finite(a, "rank");
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cut = rel_tol * sv(0);
    int r = 0;
    while (r < sv.size() && sv(r) > cut) ++r;
    return r;
}

/// Orthonormal nullspace basis (columns) of a real matrix plus the confidence
/// gap between the smallest retained and largest discarded singular value.
struct Nullspace {
    RMatrix basis;     ///< n x dim, orthonormal columns
    double gap_ratio;  ///< +inf when nothing was discarded above noise
};

inline Nullspace nullspace_real(const RMatrix& a, double rel_tol) {
    detail::require(rel_tol > 0, "nullspace_real: rel_tol must be positive");
    detail::require_finite(a, "nullspace_real");
    const Eigen::Index n = a.cols();
    if (a.rows() == 0 || a.size() == 0)
        return {RMatrix::Identity(n, n), kInf};

    // Tall systems (the large constraint solves) go through LAPACK's dgesvd
    // without accumulating U; wide ones through the one-sided Jacobi SVD.
    // Eigen 3.4's divide-and-conquer SVD is avoided entirely: its deflation
    // miscomputes structured rank-deficient inputs. Thin V equals full V for
    // rows >= cols.
    RVector sv;
    RMatrix v;
    if (a.rows() >= n) {
        RMatrix work = a;  // dgesvd overwrites its input
        sv.resize(n);
        RMatrix vt(n, n);
        std::vector<double> superb(static_cast<std::size_t>(n));
        const lapack_int info = LAPACKE_dgesvd(
            LAPACK_COL_MAJOR, 'N', 'A', static_cast<lapack_int>(a.rows()),
            static_cast<lapack_int>(n), work.data(), static_cast<lapack_int>(a.rows()),
            sv.data(), nullptr, static_cast<lapack_int>(a.rows()), vt.data(),
            static_cast<lapack_int>(n), superb.data());
        if (info != 0)
            throw std::runtime_error("nullspace_real: dgesvd failed to converge (info " +
                                     std::to_string(info) + ")");
        v = vt.transpose();
    } else {
        Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
        sv = svd.singularValues();
        v = svd.matrixV();
    }
    detail::require_finite(v, "nullspace_real: SVD output");
    for (Eigen::Index i = 1; i < sv.size(); ++i)
        if (sv(i) > sv(i - 1))
            throw std::runtime_error("nullspace_real: SVD returned unsorted singular values");
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax == 0.0)
        return {RMatrix::Identity(n, n), kInf};

    const double cut = rel_tol * smax;
    int kept = 0;
    while (kept < sv.size() && sv(kept) > cut) ++kept;

    Nullspace ns;
    ns.basis = v.rightCols(n - kept);
    double discarded = kept < sv.size() ? sv(kept) : 0.0;
    if (discarded < 1e-14 * smax)
        ns.gap_ratio = kInf;
    else
        ns.gap_ratio = sv(kept - 1) / discarded;
    return ns;
}

namespace detail {

/// Digits of a flattened multi-index, last party fastest.
inline std::vector<int> unflatten(long idx, const std::vector<int>& dims) {
    std::vector<int> digits(dims.size());
    for (std::size_t x = dims.size(); x-- > 0;) {
        digits[x] = static_cast<int>(idx % dims[x]);
        idx /= dims[x];
    }
    return digits;
}

inline long flatten(const std::vector<int>& digits, const std::vector<int>& dims) {
    long idx = 0;
    for (std::size_t x = 0; x < dims.size(); ++x) idx = idx * dims[x] + digits[x];
    return idx;
}

}  // namespace detail

/// Transpose the indices of the masked parties. Involution, preserves
/// Hermiticity and trace. The mask must be a nonempty proper subset.
inline CMatrix partial_transpose(const CMatrix& rho, const std::vector<int>& dims,
                                 const std::vector<int>& party_mask) {
    long side = 1;
    for (int d : dims) {
        detail::require(d >= 1, "partial_transpose: dims must be positive");
        side *= d;
    }
    detail::require(rho.rows() == side && rho.cols() == side,
                    "partial_transpose: matrix side must equal product of dims");
    detail::require(!party_mask.empty() && party_mask.size() < dims.size(),
                    "partial_transpose: mask must be a nonempty proper subset");
    std::vector<bool> masked(dims.size(), false);
    for (int p : party_mask) {
        detail::require(p >= 0 && p < static_cast<int>(dims.size()),
                        "partial_transpose: party index out of range");
        masked[p] = true;
    }
    detail::require_finite(rho, "partial_transpose");

    CMatrix out(side, side);
    for (long i = 0; i < side; ++i) {
        auto di = detail::unflatten(i, dims);
        for (long j = 0; j < side; ++j) {
            auto dj = detail::unflatten(j, dims);
            auto ri = di, rj = dj;
            for (std::size_t x = 0; x < dims.size(); ++x)
                if (masked[x]) std::swap(ri[x], rj[x]);
            out(detail::flatten(ri, dims), detail::flatten(rj, dims)) = rho(i, j);
        }
    }
    return out;
}

/// Real spectrum of a Hermitian matrix, ascending. Rejects inputs that are
/// not Hermitian to within 1e-10 of the largest entry.
inline RVector eig_hermitian(const CMatrix& h) {
    detail::require(h.rows() == h.cols(), "eig_hermitian: square matrix required");
    detail::require_finite(h, "eig_hermitian");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    detail::require(dev <= 1e-10 * scale, "eig_hermitian: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Real parameter vector of a Hermitian m x m operator. Layout: the m diagonal
/// entries first, then (Re a_ij, Im a_ij) for each pair i < j in lexicographic
/// order, m^2 reals in total.
struct HermitianParams {
    int m = 0;
    RVector params;
};

/// Parameter offset of the (Re, Im) slot for the off-diagonal pair i < j.
inline int herm_pair_offset(int m, int i, int j) {
    // pairs (0,1),(0,2),...,(0,m-1),(1,2),... ; two slots per pair after the diagonal block
    int before = i * m - i * (i + 1) / 2 + (j - i - 1);
    return m + 2 * before;
}

inline HermitianParams hermitian_to_params(const CMatrix& h) {
    detail::require(h.rows() == h.cols(), "hermitian_to_params: square matrix required");
    detail::require_finite(h, "hermitian_to_params");
    const int m = static_cast<int>(h.rows());
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    detail::require((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
                    "hermitian_to_params: input is not Hermitian");
    HermitianParams p;
    p.m = m;
    p.params.resize(static_cast<Eigen::Index>(m) * m);
    for (int i = 0; i < m; ++i) p.params(i) = h(i, i).real();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const int off = herm_pair_offset(m, i, j);
            p.params(off) = h(i, j).real();
            p.params(off + 1) = h(i, j).imag();
        }
    return p;
}

inline CMatrix params_to_hermitian(const HermitianParams& p) {
    const long total = p.params.size();
    long m = p.m;
    if (m == 0) {
        m = static_cast<long>(std::llround(std::sqrt(static_cast<double>(total))));
    }
    detail::require(m * m == total, "params_to_hermitian: params length is not a perfect square");
    detail::require_finite(p.params, "params_to_hermitian");
    CMatrix h(m, m);
    for (long i = 0; i < m; ++i) h(i, i) = Complex(p.params(i), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < static_cast<int>(m); ++j) {
            const int off = herm_pair_offset(static_cast<int>(m), i, j);
            const Complex z(p.params(off), p.params(off + 1));
            h(i, j) = z;
            h(j, i) = std::conj(z);  // symmetric by construction, exactly Hermitian
        }
    return h;
}

/// Hermitian solution space of a homogeneous constraint system: dimension,
/// orthonormal parameter-vector basis and the rank-decision gap ratio.
struct SolutionSpace {
    int dim = 0;
    std::vector<HermitianParams> basis;
    double gap_ratio = kInf;
};

}  // namespace upbv
