// Batch front end: spectrum, zeta, continue, verify.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "zsnorm/io.hpp"
#include "zsnorm/zsnorm.hpp"

namespace fs = std::filesystem;
using namespace zsnorm;
using io::json;

namespace {

enum Exit { Ok = 0, VerifyFailed = 1, Guard = 2, IoSchema = 3 };

struct RunConfig {
    std::string potential;
    std::string base = "zero";
    std::string spectrum_file;
    int N0 = 1;
    int N = 2;
    int M = 16;
    std::string nlist = "default";
    int steps = 4;
    std::string out;
    unsigned long long seed = 1;
    double tol_ode = 1e-12;
    double quad_tol = 1e-12;
    double norm_tol = 1e-6;
    double newton_tol = 1e-10;
    double mult_tol = 1e-7;

    SpectrumOptions spectrum_options() const {
        SpectrumOptions o;
        o.tol_ode = tol_ode;
        o.quad_tol = quad_tol;
        o.mult_tol = mult_tol;
        return o;
    }
    FiniteGapOptions finite_gap_options() const {
        FiniteGapOptions o;
        o.norm_tol = norm_tol;
        return o;
    }
};

void validate(const RunConfig& c, bool need_window) {
    if (c.N0 < 1) throw io::SchemaError("config: need N0 >= 1");
    if (need_window && c.N < c.N0) throw io::SchemaError("config: need N >= N0");
    if (c.M < (need_window ? c.N + 1 : c.N0)) throw io::SchemaError("config: M too small");
    for (double t : {c.tol_ode, c.quad_tol, c.norm_tol, c.newton_tol, c.mult_tol})
        if (!(t > 0.0)) throw io::SchemaError("config: tolerances must be positive");
}

std::vector<int> parse_nlist(const RunConfig& c) {
    std::vector<int> ns;
    if (c.nlist == "default") {
        for (int n = -c.N; n <= c.N; ++n) ns.push_back(n);
        return ns;
    }
    std::stringstream ss(c.nlist);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            const int n = std::stoi(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            if (std::abs(n) > c.M) throw io::SchemaError("nlist: |n| must not exceed M");
            ns.push_back(n);
        } catch (const std::logic_error&) {
            throw io::SchemaError("nlist: cannot parse '" + item + "'");
        }
    }
    return ns;
}

Potential load_potential(const std::string& what) {
    if (what.empty()) throw io::SchemaError("no potential given");
    if (what == "zero") return Potential::zero();
    return io::potential_from_json(io::read_json_file(what));
}

fs::path out_dir(const RunConfig& c) {
    std::string d = c.out;
    if (d.empty()) {
        const char* env = std::getenv("ZSNORM_OUT");
        d = env && *env ? env : ".";
    }
    fs::path p(d);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw io::SchemaError("cannot create output directory " + d);
    return p;
}

int cmd_spectrum(const RunConfig& c) {
    validate(c, false);
    const Potential p = load_potential(c.potential);
    const PeriodicSpectrum s = locate_spectrum(p, c.N0, c.M, c.spectrum_options());
    const fs::path o = out_dir(c);
    io::write_text_file((o / "spectrum.csv").string(), io::spectrum_csv(s));
    io::write_json_file((o / "spectrum.json").string(), io::spectrum_to_json(s));
    const GapSet g = detect_gaps(s);
    std::cout << "eigenvalues " << 2 * (2 * s.M() + 1) << ", open gaps " << g.l() << ", l2 tail "
              << s.l2_tail() << "\n";
    return Ok;
}

int cmd_zeta(const RunConfig& c) {
    validate(c, true);
    const std::vector<int> ns = parse_nlist(c);
    if (ns.empty()) {
        std::cout << "empty n list, nothing to do\n";
        return Ok;
    }
    const Potential p = load_potential(c.potential);
    const FiniteGapContext ctx(locate_spectrum(p, c.N0, c.M, c.spectrum_options()),
                               c.finite_gap_options());
    const fs::path o = out_dir(c);
    std::map<int, std::map<int, cplx>> rows;
    int status = Ok;
    for (int n : ns) {
        ZetaFunction z;
        try {
            z = zeta(ctx, n, c.N, false);
        } catch (const NormalizationError& e) {
            std::cerr << "n=" << n << ": " << e.what() << " (" << e.residual() << ")\n";
            status = VerifyFailed;
            continue;
        }
        rows[n] = zeta_residuals(ctx, z);
        double r = 0.0;
        for (const auto& [m, v] : rows[n]) r = std::max(r, std::abs(v));
        z.residual_matrix_max = r;
        io::write_json_file((o / ("zeta_n" + std::to_string(n) + ".json")).string(), io::zeta_to_json(z));
        const auto roots = z.central_roots(ctx.spectrum());
        std::cout << "n=" << n << " residual " << r;
        if (roots.count(0)) std::cout << " root[0] " << roots.at(0).real() << (roots.at(0).imag() < 0 ? "" : "+") << roots.at(0).imag() << "i";
        std::cout << "\n";
        if (r > c.norm_tol) status = VerifyFailed;
    }
    io::write_text_file((o / "residual_matrix.csv").string(), io::residual_csv(rows));
    return status;
}

int cmd_continue(const RunConfig& c) {
    validate(c, true);
    const std::vector<int> ns = parse_nlist(c);
    const Potential base = load_potential(c.base);
    const Potential target = load_potential(c.potential);
    HomotopyOptions ho;
    ho.steps = c.steps;
    ho.N0 = c.N0;
    ho.N = c.N;
    ho.M = c.M;
    ho.newton.tol = c.newton_tol;
    ho.spectrum = c.spectrum_options();
    ho.finite_gap = c.finite_gap_options();
    const HomotopyResult r = continue_homotopy(base, target, ns, ho);
    const fs::path o = out_dir(c);
    std::ostringstream log;
    log << std::setprecision(17) << "t,accepted,iterations,residual\n";
    for (const auto& s : r.log) log << s.t << ',' << (s.accepted ? 1 : 0) << ',' << s.iterations << ',' << s.residual << '\n';
    io::write_text_file((o / "homotopy_log.csv").string(), log.str());
    TailClosure closure;
    if (!ns.empty()) {
        const Potential reached = Potential::interpolate(base, target, r.last_good_t);
        closure = make_closure(locate_spectrum(reached, c.N0, c.M, c.spectrum_options()), ClosureKind::Fitted);
    }
    for (const auto& [n, st] : r.states)
        io::write_json_file((o / ("state_n" + std::to_string(n) + ".json")).string(), io::state_to_json(st, closure));
    io::write_json_file((o / "continue.json").string(),
                        {{"success", r.success}, {"last_good_t", r.last_good_t}, {"halvings", r.halvings},
                         {"message", r.message}, {"steps", r.log.size()}});
    if (!r.success) {
        std::cerr << "continuation diverged; last good t = " << r.last_good_t << " (" << r.message << ")\n";
        return VerifyFailed;
    }
    std::cout << "continuation reached t = 1 in " << r.log.size() << " steps, " << r.halvings << " halvings\n";
    return Ok;
}

struct Check {
    std::string name;
    bool pass;
    double value;
    double threshold;
    std::string note;
};

int cmd_verify(const RunConfig& c) {
    validate(c, true);
    std::vector<Check> checks;
    auto add = [&](std::string name, double value, double thr, std::string note = {}) {
        checks.push_back({std::move(name), value < thr, value, thr, std::move(note)});
    };
    auto fail = [&](std::string name, const std::string& why) {
        checks.push_back({std::move(name), false, std::numeric_limits<double>::quiet_NaN(), 0.0, why});
    };
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> ure(-(c.N0 + 0.5) * pi, (c.N0 + 0.5) * pi), uim(-2.0, 2.0);
    std::vector<cplx> sample;
    for (int i = 0; i < 12; ++i) sample.push_back({ure(rng), uim(rng)});

    if (!c.spectrum_file.empty()) {
        try {
            io::spectrum_from_json(io::read_json_file(c.spectrum_file));
            add("spectrum_file.schema", 0.0, 0.5);
        } catch (const Error& e) {
            fail("spectrum_file.schema", e.what());
        }
    }

    Potential p;
    try {
        p = load_potential(c.potential.empty() ? "zero" : c.potential);
    } catch (const Error& e) {
        fail("potential.schema", e.what());
    }

    double det = 0.0;
    for (const auto& l : sample) det = std::max(det, std::abs(monodromy(p, l, c.tol_ode).det() - 1.0));
    add("monodromy.det", det, 1e-9);

    std::optional<FiniteGapContext> ctx;
    try {
        ctx.emplace(locate_spectrum(p, c.N0, c.M, c.spectrum_options()), c.finite_gap_options());
        add("spectrum.guards", 0.0, 0.5);
    } catch (const Error& e) {
        fail("spectrum.guards", e.what());
    }

    if (ctx) {
        const auto& s = ctx->spectrum();
        const Discriminant disc(p, c.tol_ode);
        double worst = 0.0;
        for (int k = -s.M(); k <= s.M(); ++k)
            for (cplx l : {s.pair(k).minus, s.pair(k).plus}) {
                const cplx d = disc(l).first;
                worst = std::max(worst, std::min(std::abs(d - 2.0), std::abs(d + 2.0)));
            }
        add("spectrum.discriminant_at_eigenvalues", worst, 1e-7);
        double rel = 0.0;
        for (const auto& l : sample) {
            const cplx g = std::pow(disc(l).first, 2) - 4.0;
            rel = std::max(rel, std::abs(std::pow(ctx->canonical()(l), 2) - g) / std::abs(g));
        }
        add("product.identity", rel, 1e-6);
        add("contours.valid", ctx->contours().disjoint() && ctx->contours().cuts_inside() ? 0.0 : 1.0, 0.5);

        const std::vector<int> ns = parse_nlist(c);
        double norm = 0.0, closed = 0.0, local = 0.0, res = 0.0, stokes = 0.0, F = 0.0, jac = 0.0;
        bool zeta_ok = true;
        std::optional<Frame> fr;
        try {
            fr.emplace(p, *ctx);
        } catch (const Error& e) {
            fail("frame", e.what());
        }
        for (int n : ns) {
            try {
                const ZetaFunction z = zeta(*ctx, n, c.N, false);
                for (const auto& [m, v] : zeta_residuals(*ctx, z)) norm = std::max(norm, std::abs(v));
                for (int k = -s.M(); k <= s.M(); ++k)
                    if (k != n && !ctx->gaps().contains(k)) closed = std::max(closed, std::abs(z(s.tau(k))));
                for (const auto& r : z.Q.roots()) local = std::max(local, std::abs(r) - (c.N + 0.25) * pi);
                if (ctx->gaps().l() > 0) {
                    const auto d = ctx->gaps().contains(n) ? chi_open_gap(*ctx, n, false) : chi_closed_gap(*ctx, n, INT_MIN, false);
                    const auto rr = residues(*ctx, d);
                    res = std::max({res, std::abs(rr.inf_plus - I), std::abs(rr.inf_minus + I)});
                    if (!d.open) res = std::max({res, std::abs(rr.tau_plus + I), std::abs(rr.tau_minus - I)});
                    stokes = std::max(stokes, std::abs(rr.stokes));
                }
                if (fr) {
                    const AnsatzParams a = AnsatzParams::from_zeta(z);
                    F = std::max(F, max_abs(F_map(a, *fr)));
                    jac = std::max(jac, (jacobian_fd(a, *fr) - jacobian_analytic_base(*fr, z)).cwiseAbs().maxCoeff());
                }
                const json j = io::zeta_to_json(z);
                const std::string once = j.dump();
                if (io::zeta_to_json(io::zeta_from_json(json::parse(once))).dump() != once)
                    fail("io.roundtrip.zeta", "n=" + std::to_string(n));
            } catch (const Error& e) {
                zeta_ok = false;
                fail("zeta.n" + std::to_string(n), e.what());
            }
        }
        if (!ns.empty() && zeta_ok) {
            add("zeta.normalization", norm, c.norm_tol);
            add("zeta.closed_gap_roots", closed, c.norm_tol);
            add("zeta.root_localization", local, 1e-12, "excess over (N+1/4) pi");
            if (ctx->gaps().l() > 0) {
                add("chi.residues", res, 1e-8);
                add("chi.stokes", stokes, 1e-8);
            }
            add("F.base_point", F, 1e-8);
            add("jacobian.consistency", jac, 1e-6);
        }
        const std::string once = io::spectrum_to_json(s).dump();
        add("io.roundtrip.spectrum",
            io::spectrum_to_json(io::spectrum_from_json(json::parse(once))).dump() == once ? 0.0 : 1.0, 0.5);
    }

    json report = json::array();
    int failures = 0;
    for (const auto& ch : checks) {
        if (!ch.pass) ++failures;
        std::printf("%s %-40s %.3e (< %.1e)%s%s\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.value,
                    ch.threshold, ch.note.empty() ? "" : "  ", ch.note.c_str());
        report.push_back({{"name", ch.name}, {"pass", ch.pass}, {"value", std::isnan(ch.value) ? json(nullptr) : json(ch.value)},
                          {"threshold", ch.threshold}, {"note", ch.note}});
    }
    io::write_json_file((out_dir(c) / "verify.json").string(), {{"failures", failures}, {"checks", report}});
    return std::min(failures, 100);
}

void add_common(CLI::App* sc, RunConfig& c, bool window) {
    sc->add_option("--potential", c.potential, "potential JSON file, or 'zero'");
    sc->add_option("--n0", c.N0, "central window N0")->capture_default_str();
    if (window) {
        sc->add_option("--n", c.N, "central half-width N")->capture_default_str();
        sc->add_option("--nlist", c.nlist, "comma separated indices n (default: |n| <= N)");
    }
    sc->add_option("--m", c.M, "truncation half-width M")->capture_default_str();
    sc->add_option("--out", c.out, "output directory (default $ZSNORM_OUT or .)");
    sc->add_option("--tol-ode", c.tol_ode)->capture_default_str();
    sc->add_option("--tol-quad", c.quad_tol)->capture_default_str();
    sc->add_option("--tol-norm", c.norm_tol)->capture_default_str();
    sc->add_option("--tol-newton", c.newton_tol)->capture_default_str();
    sc->add_option("--tol-mult", c.mult_tol)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normalized differentials for the periodic Zakharov-Shabat spectrum"};
    app.require_subcommand(1);
    RunConfig c;
    auto* sp = app.add_subcommand("spectrum", "locate periodic eigenvalues");
    add_common(sp, c, false);
    auto* ze = app.add_subcommand("zeta", "construct zeta_n for a finite-gap potential");
    add_common(ze, c, true);
    auto* co = app.add_subcommand("continue", "Newton continuation from a finite-gap base");
    add_common(co, c, true);
    co->add_option("--base", c.base, "base potential JSON file, or 'zero'")->capture_default_str();
    co->add_option("--steps", c.steps, "initial homotopy steps")->capture_default_str();
    auto* ve = app.add_subcommand("verify", "run the invariant suite");
    add_common(ve, c, true);
    ve->add_option("--seed", c.seed, "seed for sampled points")->capture_default_str();
    ve->add_option("--spectrum", c.spectrum_file, "spectrum JSON file to validate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : IoSchema;
    }
    try {
        if (*sp) return cmd_spectrum(c);
        if (*ze) return cmd_zeta(c);
        if (*co) return cmd_continue(c);
        if (*ve) return cmd_verify(c);
    } catch (const io::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return IoSchema;
    } catch (const CountingError& e) {
        std::cerr << "guard: " << e.what() << " (disk " << e.disk() << ")\n";
        return Guard;
    } catch (const MultiplicityError& e) {
        std::cerr << "guard: " << e.what() << "\n";
        return Guard;
    } catch (const ContourError& e) {
        std::cerr << "guard: " << e.what() << "\n";
        return Guard;
    } catch (const NormalizationError& e) {
        std::cerr << "verification: " << e.what() << " (" << e.residual() << ")\n";
        return VerifyFailed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Guard;
    }
    return Ok;
}
