// JSON schemas for state sets and certificates, plus the line-oriented text
// rendering of certificates.
//
// State-set files are self-describing:
//   {"name": str, "dims": [int...], "convention": "last-party-fastest",
//    "states": [{"label": str, "factors": [[[re,im],...], ...]}, ...]}
// Complex numbers are two-element arrays; doubles round-trip losslessly at
// JSON's 17-significant-digit printing.

#pragma once

#include "upbv/deduction.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace upbv {

using nlohmann::json;

inline constexpr const char* kFlattenConvention = "last-party-fastest";

inline json state_set_to_json(const StateSet& set) {
    json j;
    j["name"] = set.name;
    j["dims"] = set.dims;
    j["convention"] = kFlattenConvention;
    j["states"] = json::array();
    for (const auto& s : set.states) {
        json js;
        js["label"] = s.label;
        js["factors"] = json::array();
        for (const auto& f : s.factors) {
            json jf = json::array();
            for (Eigen::Index i = 0; i < f.size(); ++i)
                jf.push_back({f(i).real(), f(i).imag()});
            js["factors"].push_back(std::move(jf));
        }
        j["states"].push_back(std::move(js));
    }
    return j;
}

inline StateSet state_set_from_json(const json& j) {
    StateSet set;
    try {
        set.name = j.at("name").get<std::string>();
        set.dims = j.at("dims").get<std::vector<int>>();
        if (j.contains("convention") &&
            j.at("convention").get<std::string>() != kFlattenConvention)
            throw std::invalid_argument("unsupported flattening convention");
        for (const auto& js : j.at("states")) {
            ProductState s;
            s.label = js.at("label").get<std::string>();
            for (const auto& jf : js.at("factors")) {
                CVector f(jf.size());
                for (std::size_t i = 0; i < jf.size(); ++i)
                    f(static_cast<Eigen::Index>(i)) =
                        Complex(jf[i][0].get<double>(), jf[i][1].get<double>());
                s.factors.push_back(std::move(f));
            }
            set.states.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("state set schema error: ") + e.what());
    }
    check_valid(set);
    return set;
}

inline void save_state_set(const std::string& path, const StateSet& set) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << state_set_to_json(set).dump(1) << "\n";
}

inline StateSet load_state_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return state_set_from_json(j);
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

inline json certificate_to_json(const Certificate& cert) {
    json j;
    j["set"] = cert.set_name;
    j["dims"] = cert.dims;
    j["measured"] = cert.measured;
    j["m"] = cert.m;
    j["notes"] = cert.notes;
    j["residual_dim"] = cert.residual_dim;
    j["residual_gap"] = cert.residual_gap;
    j["pattern_after_r1r3"] = cert.pattern_after_r1r3;
    j["steps"] = json::array();
    for (const auto& s : cert.steps) {
        json js;
        js["rule"] = to_string(s.rule);
        js["states"] = s.states;
        js["S"] = s.S;
        js["T"] = s.T;
        js["note"] = s.note;
        js["zeros"] = s.zeros;
        js["merges"] = s.merges;
        if (s.residual_dim >= 0) js["residual_dim"] = s.residual_dim;
        j["steps"].push_back(std::move(js));
    }
    return j;
}

inline Certificate certificate_from_json(const json& j) {
    Certificate cert;
    try {
        cert.set_name = j.at("set").get<std::string>();
        cert.dims = j.at("dims").get<std::vector<int>>();
        cert.measured = j.at("measured").get<std::vector<int>>();
        cert.m = j.at("m").get<int>();
        cert.notes = j.at("notes").get<std::vector<std::string>>();
        cert.residual_dim = j.at("residual_dim").get<int>();
        cert.residual_gap = j.at("residual_gap").get<double>();
        cert.pattern_after_r1r3 = j.at("pattern_after_r1r3").get<std::vector<std::uint8_t>>();
        for (const auto& js : j.at("steps")) {
            CertStep s;
            const auto rule = js.at("rule").get<std::string>();
            if (rule == "R1") s.rule = RuleId::R1;
            else if (rule == "R2") s.rule = RuleId::R2;
            else if (rule == "R3") s.rule = RuleId::R3;
            else if (rule == "R4") s.rule = RuleId::R4;
            else s.rule = RuleId::R5;
            s.states = js.at("states").get<std::vector<std::string>>();
            s.S = js.at("S").get<std::vector<int>>();
            s.T = js.at("T").get<std::vector<int>>();
            s.note = js.at("note").get<std::string>();
            s.zeros = js.at("zeros").get<std::vector<std::pair<int, int>>>();
            s.merges = js.at("merges").get<std::vector<std::pair<int, int>>>();
            if (js.contains("residual_dim")) s.residual_dim = js.at("residual_dim").get<int>();
            cert.steps.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("certificate schema error: ") + e.what());
    }
    return cert;
}

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

inline std::string join_strings(const std::vector<std::string>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

}  // namespace detail

/// One step per line: `R<k> | states: ... | S: ... | T/basis: ... | delta: ...`
inline std::string certificate_to_text(const Certificate& cert) {
    std::ostringstream os;
    os << "# certificate for " << cert.set_name << ", measured parties {"
       << detail::join_ints(cert.measured) << "}, operator dim " << cert.m << "\n";
    for (const auto& note : cert.notes) os << "# note: " << note << "\n";
    for (const auto& s : cert.steps) {
        os << to_string(s.rule) << " | states: " << detail::join_strings(s.states)
           << " | S: " << detail::join_ints(s.S) << " | T/basis: " << detail::join_ints(s.T);
        if (!s.note.empty()) os << " (" << s.note << ")";
        os << " | delta: " << s.zeros.size() << " zeros, " << s.merges.size() << " merges";
        if (s.residual_dim >= 0) os << ", residual dim " << s.residual_dim;
        os << "\n";
    }
    os << "# residual dimension " << cert.residual_dim << ", gap ratio " << cert.residual_gap
       << "\n";
    return os.str();
}

}  // namespace upbv
