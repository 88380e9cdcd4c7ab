// upbv: construct the product-state families, verify their claimed
// properties, and emit proof-replay certificates and sweep reports.
//
// Exit codes: 0 all checks pass, 1 any check fails, 2 inconclusive results
// only, 3 usage or input errors.

#include "upbv/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace upbv;

int jobs_from_env_or_flag(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("UPBV_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

StateSet construct_family(const std::string& family, int d) {
    if (family == "333") return upb_333();
    if (family == "444") return upb_444();
    if (family == "ddd") return upb_ddd(d);
    if (family == "tiles34") return tiles_34();
    throw std::invalid_argument("unknown family: " + family);
}

int cmd_construct(const std::string& family, int d, const std::string& out_path) {
    if (family == "phi3") {
        json j;
        j["name"] = "complement_phi_3";
        j["dims"] = {3, 3, 3};
        j["convention"] = kFlattenConvention;
        j["vectors"] = json::array();
        for (const auto& cv : complement_phi_3()) {
            json jv;
            jv["label"] = cv.label;
            jv["product_cut_party"] = cv.product_cut_party;
            json coeffs = json::array();
            for (Eigen::Index i = 0; i < cv.vec.size(); ++i)
                coeffs.push_back({cv.vec(i).real(), cv.vec(i).imag()});
            jv["coeffs"] = std::move(coeffs);
            j["vectors"].push_back(std::move(jv));
        }
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
        out << j.dump(1) << "\n";
        std::cout << "wrote 3 complement vectors to " << out_path << "\n";
        return 0;
    }
    const StateSet set = construct_family(family, d);
    save_state_set(out_path, set);
    std::cout << "wrote " << set.states.size() << " states (" << set.name << ") to " << out_path
              << "\n";
    return 0;
}

void print_report(const RunReport& rep) {
    std::cout << rep.version << " | set " << rep.set_name << " | dims [";
    for (std::size_t i = 0; i < rep.dims.size(); ++i)
        std::cout << (i ? "," : "") << rep.dims[i];
    std::cout << "] | tol_zero " << rep.tol.zero << " tol_rank " << rep.tol.rank << " gap_min "
              << rep.tol.gap_min << "\n";
    for (const auto& c : rep.checks)
        std::cout << "  " << c.verdict << "  " << c.name << "  [" << std::fixed
                  << std::setprecision(3) << c.seconds << "s]  " << c.detail << "\n";
    std::cout.unsetf(std::ios::fixed);
}

int cmd_verify(const std::string& in_path, std::vector<std::string> checks, const Tolerances& tol,
               int upb_max_d, int opm_max_d, bool no_symmetry, int jobs,
               const std::string& json_out) {
    const StateSet set = load_state_set(in_path);
    const int dmax = *std::max_element(set.dims.begin(), set.dims.end());
    RunReport rep;
    rep.set_name = set.name;
    rep.dims = set.dims;
    rep.tol = tol;

    bool upb_passed = false;
    for (const auto& check : checks) {
        if (check == "orth") {
            rep.checks.push_back(run_orth_check(set, tol));
        } else if (check == "upb") {
            if (dmax > upb_max_d) {
                rep.checks.push_back({"upb", "SKIPPED",
                                      "local dim " + std::to_string(dmax) + " over the cover-check cap " +
                                          std::to_string(upb_max_d) + " (raise with --upb-max-d)",
                                      0.0});
            } else {
                rep.checks.push_back(run_upb_check(set, tol));
                upb_passed = rep.checks.back().verdict == "PASS";
            }
        } else if (check == "strong") {
            if (dmax > opm_max_d) {
                rep.checks.push_back({"strong", "SKIPPED",
                                      "local dim over the measurement-check cap " +
                                          std::to_string(opm_max_d) + " (raise with --opm-max-d)",
                                      0.0});
            } else {
                for (auto& r : run_strong_check(set, tol, !no_symmetry, jobs))
                    rep.checks.push_back(std::move(r));
            }
        } else if (check == "ppt") {
            rep.checks.push_back(run_ppt_check(set, tol, upb_passed));
        } else {
            throw CLI::ValidationError("--checks", "unknown check: " + check);
        }
    }
    print_report(rep);
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw std::runtime_error("cannot open for writing: " + json_out);
        out << rep.to_json().dump(1) << "\n";
    }
    return rep.exit_code();
}

int cmd_certify(const std::string& in_path, const std::string& cut, const std::string& out_prefix,
                const Tolerances& tol) {
    const StateSet set = load_state_set(in_path);
    if (set.dims.size() != 3)
        throw std::invalid_argument("certify requires a tripartite state set");
    MeasuredSubset measured;
    if (cut == "bc") measured.parties = {1, 2};
    else if (cut == "ca") measured.parties = {0, 2};
    else if (cut == "ab") measured.parties = {0, 1};
    else throw std::invalid_argument("unknown cut: " + cut + " (use bc, ca or ab)");

    const auto result = certify(set, measured, tol);
    {
        std::ofstream out(out_prefix + ".txt");
        if (!out) throw std::runtime_error("cannot open for writing: " + out_prefix + ".txt");
        out << certificate_to_text(result.cert);
    }
    {
        std::ofstream out(out_prefix + ".json");
        if (!out) throw std::runtime_error("cannot open for writing: " + out_prefix + ".json");
        out << certificate_to_json(result.cert).dump(1) << "\n";
    }
    std::cout << certificate_to_text(result.cert);
    if (result.cert.residual_dim == 1 && result.residual.gap_ratio >= tol.gap_min) return 0;
    return result.residual.gap_ratio < tol.gap_min ? 2 : 1;
}

int cmd_report(int dmin, int dmax, const std::string& out_path, const Tolerances& tol,
               int upb_max_d, int opm_max_d, bool no_symmetry, int jobs) {
    if (dmin < 3 || dmin > dmax) throw std::invalid_argument("need 3 <= dmin <= dmax");
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << csv_header() << "\n";
    std::cout << csv_header() << "\n";
    for (int d = dmin; d <= dmax; ++d) {
        detail::Stopwatch sw;
        ReportRow row;
        row.d = d;
        row.family = "ddd";
        const StateSet set = upb_ddd(d);
        row.size = static_cast<long long>(set.states.size());
        row.expected = expected_size(d);
        row.orth = run_orth_check(set, tol).verdict;
        row.upb = d <= upb_max_d ? run_upb_check(set, tol).verdict : "SKIPPED";
        if (d <= opm_max_d) {
            const auto rep = strongest_nonlocality(set, !no_symmetry, tol, jobs);
            row.opm_bc = std::to_string(rep.verdicts[0].dim);
            row.opm_ca = std::to_string(rep.verdicts[1].dim);
            row.opm_ab = std::to_string(rep.verdicts[2].dim);
            for (const auto& v : rep.verdicts) row.min_gap = std::min(row.min_gap, v.gap_ratio);
        } else {
            row.opm_bc = row.opm_ca = row.opm_ab = "SKIPPED";
        }
        const auto rho = upb_mixed_state(set, /*assume_upb=*/true, tol);
        row.ppt_min = kInf;
        for (const auto& [cut, mineig] : ppt_report(rho))
            row.ppt_min = std::min(row.ppt_min, mineig);
        row.secs = sw.seconds();
        out << csv_line(row) << "\n";
        std::cout << csv_line(row) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"construct and verify strongly nonlocal unextendible product bases"};
    app.require_subcommand(1);
    app.fallthrough();  // tolerance and jobs flags may follow the subcommand

    Tolerances tol;
    int jobs_flag = 0;
    app.add_option("--tol-zero", tol.zero, "relative scalar zero threshold")->capture_default_str();
    app.add_option("--tol-rank", tol.rank, "relative SVD rank cutoff")->capture_default_str();
    app.add_option("--gap-min", tol.gap_min, "minimum gap ratio for a confident verdict")
        ->capture_default_str();
    app.add_option("--jobs", jobs_flag, "worker threads (or env UPBV_JOBS)");

    auto* c = app.add_subcommand("construct", "build a family and write it to a JSON file");
    std::string family, out_path;
    int d = 3;
    c->add_option("--family", family, "333, 444, ddd, tiles34 or phi3")->required();
    c->add_option("-d,--dim", d, "local dimension (family ddd)");
    c->add_option("-o,--out", out_path, "output path")->required();

    auto* v = app.add_subcommand("verify", "run checks against a state-set file");
    std::string in_path, json_out, checks_csv = "orth,upb,strong,ppt";
    int upb_max_d = 5, opm_max_d = 6;
    bool no_symmetry = false;
    v->add_option("-i,--in", in_path, "state-set JSON file")->required();
    v->add_option("--checks", checks_csv, "comma-separated subset of orth,upb,strong,ppt")
        ->capture_default_str();
    v->add_option("--upb-max-d", upb_max_d, "largest local dim for the cover check")
        ->capture_default_str();
    v->add_option("--opm-max-d", opm_max_d, "largest local dim for measurement checks")
        ->capture_default_str();
    v->add_flag("--no-symmetry", no_symmetry, "compute every bipartition, no cyclic shortcut");
    v->add_option("--json", json_out, "also write the report as JSON");

    auto* ce = app.add_subcommand("certify", "replay the block-structure proof for one cut");
    std::string cert_in, cut = "bc", cert_out;
    ce->add_option("-i,--in", cert_in, "state-set JSON file")->required();
    ce->add_option("--cut", cut, "measured pair: bc, ca or ab")->capture_default_str();
    ce->add_option("-o,--out", cert_out, "output prefix (.txt and .json)")->required();

    auto* r = app.add_subcommand("report", "sweep d and write a CSV summary");
    int dmin = 3, dmax = 5;
    std::string csv_out;
    r->add_option("--dmin", dmin, "first d")->capture_default_str();
    r->add_option("--dmax", dmax, "last d")->capture_default_str();
    r->add_option("-o,--out", csv_out, "CSV output path")->required();
    int rep_upb_max_d = 5, rep_opm_max_d = 6;
    bool rep_no_symmetry = false;
    r->add_option("--upb-max-d", rep_upb_max_d, "largest d for the cover check")
        ->capture_default_str();
    r->add_option("--opm-max-d", rep_opm_max_d, "largest d for measurement checks")
        ->capture_default_str();
    r->add_flag("--no-symmetry", rep_no_symmetry, "compute every bipartition, no cyclic shortcut");

    try {
        app.parse(argc, argv);
        const int jobs = jobs_from_env_or_flag(jobs_flag);
        if (*c) return cmd_construct(family, d, out_path);
        if (*v) {
            std::vector<std::string> checks;
            std::stringstream ss(checks_csv);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) checks.push_back(item);
            return cmd_verify(in_path, checks, tol, upb_max_d, opm_max_d, no_symmetry, jobs,
                              json_out);
        }
        if (*ce) return cmd_certify(cert_in, cut, cert_out, tol);
        if (*r)
            return cmd_report(dmin, dmax, csv_out, tol, rep_upb_max_d, rep_opm_max_d,
                              rep_no_symmetry, jobs);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
