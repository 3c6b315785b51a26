#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "continuation.hpp"
#include "finite_gap.hpp"
#include "potential.hpp"
#include "spectrum.hpp"

namespace zsnorm::io {

using nlohmann::json;

// Malformed or missing input.
class SchemaError : public Error {
public:
    using Error::Error;
};

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(what + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T field(const json& j, const char* key, const std::string& what) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(what + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(what + ": bad field '" + key + "': " + e.what());
    }
}

// ---- potential

inline json potential_to_json(const Potential& p) {
    json modes = json::array();
    for (const auto& [j, m] : p.modes())
        modes.push_back({{"j", j}, {"c1", to_json(m.c1)}, {"c2", to_json(m.c2)}});
    return {{"real_type", p.real_type()}, {"modes", modes}};
}

inline Potential potential_from_json(const json& j) {
    Potential p;
    const auto modes = field<json>(j, "modes", "potential");
    if (!modes.is_array()) throw SchemaError("potential: 'modes' must be an array");
    for (const auto& m : modes)
        p.set_mode(field<int>(m, "j", "potential mode"), cplx_from(m.at("c1"), "potential c1"),
                   cplx_from(m.at("c2"), "potential c2"));
    if (j.contains("real_type")) p.set_real_type(field<bool>(j, "real_type", "potential"));
    if (p.real_type() && !p.satisfies_real_type(1e-14))
        throw SchemaError("potential: real_type set but c1_j != conj(c2_-j)");
    return p;
}

// ---- spectrum

inline json spectrum_to_json(const PeriodicSpectrum& s) {
    json pairs = json::array();
    for (int k = -s.M(); k <= s.M(); ++k)
        pairs.push_back({{"k", k}, {"minus", to_json(s.pair(k).minus)}, {"plus", to_json(s.pair(k).plus)}});
    json gaps = json::array();
    for (int k : detect_gaps(s).J) gaps.push_back(k);
    return {{"N0", s.N0()},
            {"M", s.M()},
            {"mult_tol", s.mult_tol()},
            {"count", 2 * (2 * s.M() + 1)},
            {"l2_tail", s.l2_tail()},
            {"gaps", gaps},
            {"pairs", pairs}};
}

inline PeriodicSpectrum spectrum_from_json(const json& j) {
    const int N0 = field<int>(j, "N0", "spectrum");
    const int M = field<int>(j, "M", "spectrum");
    const double tol = j.contains("mult_tol") ? field<double>(j, "mult_tol", "spectrum") : 1e-7;
    const auto pairs = field<json>(j, "pairs", "spectrum");
    if (!pairs.is_array() || static_cast<int>(pairs.size()) != 2 * M + 1)
        throw SchemaError("spectrum: 'pairs' must hold 2M+1 entries");
    std::map<int, EigenPair> m;
    for (const auto& p : pairs) {
        const int k = field<int>(p, "k", "spectrum pair");
        if (std::abs(k) > M || m.count(k)) throw SchemaError("spectrum: bad or repeated index");
        m[k] = {cplx_from(p.at("minus"), "spectrum minus"), cplx_from(p.at("plus"), "spectrum plus")};
    }
    if (N0 < 0 || M < N0) throw SchemaError("spectrum: need 0 <= N0 <= M");
    return PeriodicSpectrum::from_pairs(N0, M, m, tol);
}

inline std::string spectrum_csv(const PeriodicSpectrum& s) {
    std::ostringstream o;
    o << std::setprecision(17);
    o << "k,minus_re,minus_im,plus_re,plus_im,tau_re,tau_im,gap_abs\n";
    for (int k = -s.M(); k <= s.M(); ++k) {
        const auto& p = s.pair(k);
        o << k << ',' << p.minus.real() << ',' << p.minus.imag() << ',' << p.plus.real() << ','
          << p.plus.imag() << ',' << p.tau().real() << ',' << p.tau().imag() << ','
          << std::abs(p.gamma()) << '\n';
    }
    return o.str();
}

// ---- zeta / continuation

inline json zeta_to_json(const ZetaFunction& z) {
    json poly = json::array();
    for (const auto& a : z.a()) poly.push_back(to_json(a));
    json tail = json::array();
    for (const auto& [k, s] : z.tail_roots) tail.push_back({{"k", k}, {"re", s.real()}, {"im", s.imag()}});
    return {{"n", z.n},
            {"N", z.N},
            {"M", z.M},
            {"poly", poly},
            {"tail_roots", tail},
            {"closure", {{"M", z.closure.M}, {"b", to_json(z.closure.b)}}},
            {"residual_matrix_max", z.residual_matrix_max}};
}

inline ZetaFunction zeta_from_json(const json& j) {
    ZetaFunction z;
    z.n = field<int>(j, "n", "zeta");
    z.N = field<int>(j, "N", "zeta");
    z.M = field<int>(j, "M", "zeta");
    std::vector<cplx> a;
    for (const auto& c : field<json>(j, "poly", "zeta")) a.push_back(cplx_from(c, "zeta poly"));
    z.Q = ZetaFunction::poly_from_a(a);
    for (const auto& t : field<json>(j, "tail_roots", "zeta"))
        z.tail_roots[field<int>(t, "k", "zeta tail")] = {field<double>(t, "re", "zeta tail"),
                                                         field<double>(t, "im", "zeta tail")};
    if (j.contains("closure")) {
        z.closure.M = field<int>(j["closure"], "M", "zeta closure");
        z.closure.b = cplx_from(j["closure"].at("b"), "zeta closure b");
    } else {
        z.closure.M = z.M;
        z.closure.b = 0.0;
    }
    z.residual_matrix_max = field<double>(j, "residual_matrix_max", "zeta");
    const int expect = std::abs(z.n) <= z.N ? 2 * z.N : 2 * z.N + 1;
    if (z.degree() != expect) throw SchemaError("zeta: poly has the wrong length");
    return z;
}

inline json state_to_json(const ContinuationState& st, const TailClosure& closure) {
    ZetaFunction z = st.params.to_zeta(closure);
    z.residual_matrix_max = st.residual;
    json j = zeta_to_json(z);
    j["residual"] = st.residual;
    j["iterations"] = st.iterations;
    j["homotopy_steps"] = st.homotopy_steps;
    j["status"] = to_string(st.status);
    j["potential"] = potential_to_json(st.potential);
    json steps = json::array();
    for (double s : st.step_norms) steps.push_back(s);
    j["step_norms"] = steps;
    return j;
}

inline std::string residual_csv(const std::map<int, std::map<int, cplx>>& rows) {
    std::ostringstream o;
    o << std::setprecision(17) << "n,m,re,im,abs\n";
    for (const auto& [n, r] : rows)
        for (const auto& [m, v] : r) o << n << ',' << m << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
    return o.str();
}

// ---- files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    out << text;
    if (!out) throw SchemaError("write failed for " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace zsnorm::io
