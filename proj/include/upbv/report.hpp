// Check runners shared by the CLI: each produces verdict strings in
// {PASS, FAIL, INCONCLUSIVE, SKIPPED} with timing and tolerance context, and
// the CSV report writer with the fixed column order
//   d,family,size,expected,orth,upb,opm_bc_dim,opm_ca_dim,opm_ab_dim,min_gap,ppt_min,secs

#pragma once

#include "upbv/entangle.hpp"
#include "upbv/families.hpp"
#include "upbv/io.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace upbv {

inline constexpr const char* kToolVersion = "upbv 1.0.0";

struct CheckResult {
    std::string name;
    std::string verdict;  ///< PASS / FAIL / INCONCLUSIVE / SKIPPED
    std::string detail;
    double seconds = 0.0;
};

struct RunReport {
    std::string set_name;
    std::vector<int> dims;
    Tolerances tol;
    std::vector<CheckResult> checks;
    std::string version = kToolVersion;

    /// 0 all pass, 1 any fail, 2 inconclusive without fail
    int exit_code() const {
        bool fail = false, inconclusive = false;
        for (const auto& c : checks) {
            fail = fail || c.verdict == "FAIL";
            inconclusive = inconclusive || c.verdict == "INCONCLUSIVE";
        }
        return fail ? 1 : (inconclusive ? 2 : 0);
    }

    json to_json() const {
        json j;
        j["set"] = set_name;
        j["dims"] = dims;
        j["version"] = version;
        j["tolerances"] = {{"zero", tol.zero}, {"rank", tol.rank}, {"psd", tol.psd},
                           {"gap_min", tol.gap_min}};
        j["checks"] = json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"name", c.name}, {"verdict", c.verdict},
                                   {"detail", c.detail}, {"seconds", c.seconds}});
        return j;
    }
};

namespace detail {

class Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

}  // namespace detail

inline CheckResult run_orth_check(const StateSet& set, const Tolerances& tol) {
    detail::Stopwatch sw;
    CheckResult r;
    r.name = "orth";
    const double worst = max_gram_offdiag(set);
    r.verdict = worst <= 1e-10 ? "PASS" : "FAIL";
    r.detail = "max off-diagonal Gram magnitude " + detail::fmt(worst) + " (tol 1e-10)";
    r.seconds = sw.seconds();
    return r;
}

inline CheckResult run_upb_check(const StateSet& set, const Tolerances& tol) {
    detail::Stopwatch sw;
    CheckResult r;
    r.name = "upb";
    const auto v = is_upb(set, tol);
    switch (v.status) {
        case UpbStatus::UPB:
            r.verdict = "PASS";
            r.detail = "no product extension exists";
            break;
        case UpbStatus::EXTENDIBLE:
            r.verdict = "FAIL";
            r.detail = "product extension found, witness residual " +
                       detail::fmt(v.witness->residual);
            break;
        default:
            r.verdict = "FAIL";
            r.detail = "invalid input: " + v.diagnostic;
    }
    r.seconds = sw.seconds();
    return r;
}

/// Strong-nonlocality check. Tripartite sets use the three 2-party measured
/// subsets (with the cyclic shortcut when applicable); bipartite sets are
/// checked with single-party measurements.
inline std::vector<CheckResult> run_strong_check(const StateSet& set, const Tolerances& tol,
                                                 bool use_symmetry, int jobs) {
    std::vector<CheckResult> out;
    if (set.dims.size() == 3) {
        detail::Stopwatch sw;
        const auto rep = strongest_nonlocality(set, use_symmetry, tol, jobs);
        for (int c = 0; c < 3; ++c) {
            CheckResult r;
            r.name = "strong_" + rep.cut_names[c];
            const auto& v = rep.verdicts[c];
            r.verdict = v.kind == Triviality::TRIVIAL
                            ? "PASS"
                            : (v.kind == Triviality::NONTRIVIAL ? "FAIL" : "INCONCLUSIVE");
            r.detail = "solution dim " + std::to_string(v.dim) + ", gap ratio " +
                       detail::fmt(v.gap_ratio) + ", " + rep.provenance[c];
            r.seconds = sw.seconds();
            out.push_back(std::move(r));
        }
        return out;
    }
    for (int party = 0; party < static_cast<int>(set.dims.size()); ++party) {
        detail::Stopwatch sw;
        CheckResult r;
        r.name = "strong_";
        r.name += static_cast<char>('A' + party);
        const auto v = is_trivial_opm(set, MeasuredSubset{{party}}, tol);
        r.verdict = v.kind == Triviality::TRIVIAL
                        ? "PASS"
                        : (v.kind == Triviality::NONTRIVIAL ? "FAIL" : "INCONCLUSIVE");
        r.detail = "solution dim " + std::to_string(v.dim) + ", gap ratio " +
                   detail::fmt(v.gap_ratio) + ", computed";
        r.seconds = sw.seconds();
        out.push_back(std::move(r));
    }
    return out;
}

inline CheckResult run_ppt_check(const StateSet& set, const Tolerances& tol, bool assume_upb) {
    detail::Stopwatch sw;
    CheckResult r;
    r.name = "ppt";
    try {
        const auto rho = upb_mixed_state(set, assume_upb, tol);
        const auto rep = ppt_report(rho);
        double worst = kInf;
        std::string parts;
        for (const auto& [cut, mineig] : rep) {
            worst = std::min(worst, mineig);
            parts += (parts.empty() ? "" : ", ") + cut + ": " + detail::fmt(mineig);
        }
        r.verdict = worst >= -tol.psd ? "PASS" : "FAIL";
        r.detail = "min partial-transpose eigenvalues { " + parts + " }, slack " +
                   detail::fmt(tol.psd) +
                   "; state normalized by 1/(D - t), the complement dimension";
    } catch (const std::exception& e) {
        r.verdict = "FAIL";
        r.detail = e.what();
    }
    r.seconds = sw.seconds();
    return r;
}

/// One CSV row of the sweep report.
struct ReportRow {
    int d = 0;
    std::string family;
    long long size = 0, expected = 0;
    std::string orth, upb;
    std::string opm_bc, opm_ca, opm_ab;  ///< dims or SKIPPED
    double min_gap = kInf;
    double ppt_min = kInf;
    double secs = 0.0;
};

inline std::string csv_header() {
    return "d,family,size,expected,orth,upb,opm_bc_dim,opm_ca_dim,opm_ab_dim,min_gap,ppt_min,secs";
}

inline std::string csv_line(const ReportRow& r) {
    std::ostringstream os;
    os << r.d << "," << r.family << "," << r.size << "," << r.expected << "," << r.orth << ","
       << r.upb << "," << r.opm_bc << "," << r.opm_ca << "," << r.opm_ab << ",";
    if (r.min_gap == kInf)
        os << "inf";
    else
        os << detail::fmt(r.min_gap);
    os << "," << std::setprecision(6) << r.ppt_min << "," << std::fixed << std::setprecision(3)
       << r.secs;
    return os.str();
}

}  // namespace upbv
