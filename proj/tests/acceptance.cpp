// Acceptance run: one line per criterion, exit status 0 only if all selected pass.
//   acceptance            all criteria
//   acceptance --only N   criterion N
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>

#include "zsnorm/zsnorm.hpp"

using namespace zsnorm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<cplx> off_spectrum_samples(int count, double re, double im, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(-re, re), ui(-im, im);
    std::vector<cplx> out;
    while (static_cast<int>(out.size()) < count) {
        const cplx z{ur(rng), ui(rng)};
        // keep away from the real axis near k pi, where both sides vanish
        const double k = std::round(z.real() / pi);
        if (std::abs(z - k * pi) < 0.3) continue;
        out.push_back(z);
    }
    return out;
}

// 1: free closed forms
Outcome c1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pts = off_spectrum_samples(200, 20.0, 2.0, 11);
    const Potential zero = Potential::zero();
    double ed = 0.0;
    for (const auto& l : pts) ed = std::max(ed, std::abs(discriminant(zero, l).first - 2.0 * std::cos(l)));
    const CanonicalRoot root(locate_spectrum(zero, 1, 8));
    double er = 0.0;
    for (const auto& l : pts) er = std::max(er, std::abs(root(l) + 2.0 * I * std::sin(l)));
    const double t = seconds_since(t0);
    return {ed < 1e-10 && er < 1e-10 && t < 5.0,
            fmt("max|Delta-2cos|=%.2e max|sqrt_c+2i sin|=%.2e (tol 1e-10), %.2fs (limit 5s)", ed, er, t)};
}

// 2: constant-potential spectra
Outcome c2() {
    const auto t0 = std::chrono::steady_clock::now();
    double err = 0.0;
    for (double c : {0.1, 0.5}) {
        const auto s = locate_spectrum(Potential::constant(c, c), 1, 16);
        for (int k = -16; k <= 16; ++k) {
            const double mag = std::sqrt(k * k * pi * pi + c * c);
            const cplx em = k == 0 ? -c : (k > 0 ? mag : -mag);
            const cplx ep = k == 0 ? c : em;
            err = std::max({err, std::abs(s.pair(k).minus - em), std::abs(s.pair(k).plus - ep)});
        }
    }
    const double t = seconds_since(t0);
    return {err < 1e-9 && t < 30.0, fmt("max eigenvalue error %.2e (tol 1e-9), %.2fs (limit 30s)", err, t)};
}

// 3: discriminant product with the tail closure
Outcome c3() {
    bool pass = true;
    std::string d;
    const auto pts = off_spectrum_samples(20, 10.0, 1.0, 3);
    for (double c : {0.1, 0.5}) {
        const Potential p = Potential::constant(c, c);
        const auto s = locate_spectrum(p, 1, 32);
        std::vector<cplx> g;
        for (const auto& l : pts) {
            const cplx D = discriminant(p, l).first;
            g.push_back(D * D - 4.0);
        }
        double prev = std::numeric_limits<double>::infinity();
        d += fmt("c=%.1f:", c);
        for (int M : {8, 16, 32}) {
            const CanonicalRoot r(s.truncated(M));
            double e = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                e = std::max(e, std::abs(std::pow(r(pts[i]), 2) - g[i]) / std::abs(g[i]));
            d += fmt(" M=%d %.2e", M, e);
            if (!(e < prev)) pass = false;
            prev = e;
        }
        if (!(prev < 1e-6)) pass = false;
        d += "; ";
    }
    return {pass, d + "(tol 1e-6 at M=32, decreasing in M)"};
}

// 4: normalization of zeta_n for the constant base
Outcome c4() {
    const auto t0 = std::chrono::steady_clock::now();
    const FiniteGapContext ctx(locate_spectrum(Potential::constant(0.5, 0.5), 1, 16));
    double worst = 0.0;
    for (int n = -8; n <= 8; ++n) {
        const ZetaFunction z = zeta(ctx, n, 2, false);
        for (const auto& [m, v] : zeta_residuals(ctx, z))
            if (std::abs(m) <= 8) worst = std::max(worst, std::abs(v));
    }
    const double t = seconds_since(t0);
    return {worst < 1e-6 && t < 120.0, fmt("max residual over |m|,|n|<=8: %.2e (tol 1e-6), %.2fs", worst, t)};
}

// 5: residues by quadrature
Outcome c5() {
    double err = 0.0;
    const FiniteGapContext ctx(locate_spectrum(Potential::constant(0.5, 0.5), 1, 16));
    {
        const auto d = chi_open_gap(ctx, 0);
        const auto r = residues(ctx, d);
        err = std::max({err, std::abs(r.inf_plus - I), std::abs(r.inf_minus + I)});
    }
    for (int n : {-3, -1, 1, 2, 5}) {
        const auto d = chi_closed_gap(ctx, n);
        const auto r = residues(ctx, d);
        err = std::max({err, std::abs(r.inf_plus - I), std::abs(r.inf_minus + I),
                        std::abs(r.tau_plus + I), std::abs(r.tau_minus - I)});
    }
    // two open gaps
    std::map<int, EigenPair> pr;
    for (int k = -8; k <= 8; ++k) pr[k] = {k * pi, k * pi};
    pr[0] = {-0.5, 0.5};
    pr[1] = {pi - 0.5, pi + 0.5};
    const FiniteGapContext c2(PeriodicSpectrum::from_pairs(1, 8, pr));
    for (int n : {0, 1}) {
        const auto r = residues(c2, chi_open_gap(c2, n));
        err = std::max({err, std::abs(r.inf_plus - I), std::abs(r.inf_minus + I)});
    }
    for (int n : {-1, 2}) {
        const auto r = residues(c2, chi_closed_gap(c2, n));
        err = std::max({err, std::abs(r.inf_plus - I), std::abs(r.inf_minus + I),
                        std::abs(r.tau_plus + I), std::abs(r.tau_minus - I)});
    }
    return {err < 1e-8, fmt("max residue error %.2e (tol 1e-8)", err)};
}

// 6: epsilon_n
Outcome c6() {
    const FiniteGapContext ctx(locate_spectrum(Potential::constant(0.5, 0.5), 1, 32));
    const double closed = std::sqrt(pi * pi + 0.25) - pi;
    const double e1 = std::abs(epsilon_n(ctx, 1).first - closed);
    double head = 0.0, all = 0.0, last = 0.0;
    for (int n = 2; n <= 32; ++n) {
        const double v = n * std::abs(epsilon_n(ctx, n).first);
        if (n <= 8) head = std::max(head, v);
        all = std::max(all, v);
        last = v;
    }
    // bounded: no growth beyond the values seen at small n
    const bool bounded = all <= 1.5 * head;
    return {e1 < 1e-10 && bounded,
            fmt("|eps_1 - closed form|=%.2e (tol 1e-10); max n|eps_n| n=2..32 %.4e, n<=8 %.4e, n=32 %.4e",
                e1, all, head, last)};
}

// 7: base-point consistency
Outcome c7() {
    const int N = 2;
    const Frame fr = Frame::build(Potential::constant(0.5, 0.5), 1, 16);
    double F = 0.0, J = 0.0;
    for (int n = -(N + 4); n <= N + 4; ++n) {
        const ZetaFunction z = zeta(fr.context(), n, N, false);
        const AnsatzParams a = AnsatzParams::from_zeta(z);
        F = std::max(F, max_abs(F_map(a, fr)));
        J = std::max(J, (jacobian_fd(a, fr) - jacobian_analytic_base(fr, z)).cwiseAbs().maxCoeff());
    }
    return {F < 1e-8 && J < 1e-6, fmt("max|F|=%.2e (tol 1e-8), max|J_analytic-J_fd|=%.2e (tol 1e-6)", F, J)};
}

// 8: structure of the Jacobian and the limit matrix
Outcome c8() {
    const int N = 2;
    const Frame fr = Frame::build(Potential::constant(0.5, 0.5), 1, 32);
    double zero = 0.0, off = 0.0, central_dev = 0.0;
    bool trend = true;
    double first_dev = 0.0, last_dev = 0.0;
    for (int n : {-3, 0, 3, 5}) {
        const ZetaFunction z = zeta(fr.context(), n, N, false);
        const AnsatzParams a = AnsatzParams::from_zeta(z);
        const Layout L = a.layout();
        const Eigen::MatrixXcd Ja = jacobian_analytic_base(fr, z);
        for (const auto& J : {Ja, jacobian_fd(a, fr)}) {
            const BlockReport b = block_structure(J, L);
            zero = std::max(zero, b.zero_block);
            off = std::max(off, b.lateral_offdiag);
        }
        const BlockReport b = block_structure(Ja, L);
        if (std::abs(n) <= N) {
            // central n: the diagonal is 2 identically, nothing to trend
            for (const auto& [m, v] : b.diagonal) central_dev = std::max(central_dev, std::abs(v - 2.0));
            continue;
        }
        // |D_mm - 2| non-increasing in |m| = N+1..M on each side
        for (int side : {-1, 1}) {
            std::vector<std::pair<int, double>> dev;
            for (const auto& [m, v] : b.diagonal)
                if (m * side > 0) dev.push_back({std::abs(m), std::abs(v - 2.0)});
            std::sort(dev.begin(), dev.end());
            for (std::size_t i = 1; i < dev.size(); ++i)
                if (dev[i].second > dev[i - 1].second + 1e-12) trend = false;
            if (n == 3 && side == 1 && !dev.empty()) {
                first_dev = dev.front().second;
                last_dev = dev.back().second;
            }
        }
    }
    const ZetaFunction base = zeta(fr.context(), N + 1, N, false);
    std::vector<double> diffs;
    for (int n : {4, 8, 16, 32}) diffs.push_back(limit_difference(fr, n, N, base.a()));
    bool decreasing = true;
    for (std::size_t i = 1; i < diffs.size(); ++i) decreasing = decreasing && diffs[i] < diffs[i - 1];
    const LimitMatrix lm = limit_matrix(fr, N, base.a());
    return {zero < 1e-8 && off < 1e-8 && trend && central_dev < 1e-8 && decreasing && !lm.singular,
            fmt("zero block %.2e, lateral off-diagonal %.2e (tol 1e-8); |D_mm-2| for n=3 falls from %.2e "
                "(m=4) to %.2e (m=32), monotone over |m|=3..32 for n=-3,3,5: %s; central n=0 |D_mm-2| %.1e; "
                "limit differences n=4,8,16,32: %.3e %.3e %.3e %.3e; smallest singular value %.2e",
                zero, off, first_dev, last_dev, trend ? "yes" : "no", central_dev, diffs[0], diffs[1],
                diffs[2], diffs[3], lm.smallest_singular)};
}

// 9: continuation reproduces the direct construction
Outcome c9() {
    const Potential target = Potential::constant(0.5, 0.5);
    HomotopyOptions ho;
    ho.steps = 4;
    const HomotopyResult hr = continue_homotopy(Potential::zero(), target, {0, 1, 2}, ho);
    if (!hr.success) return {false, "homotopy failed at t=" + std::to_string(hr.last_good_t) + ": " + hr.message};
    const FiniteGapContext ctx(locate_spectrum(target, ho.N0, ho.M));
    double da = 0.0, ds = 0.0;
    int worst_it = 0;
    for (int n : {0, 1, 2}) {
        const ZetaFunction z = zeta(ctx, n, ho.N, false);
        const auto& st = hr.states.at(n);
        const auto a = z.a();
        for (std::size_t i = 0; i < a.size(); ++i) da = std::max(da, std::abs(a[i] - st.params.a[i]));
        for (const auto& [k, s] : z.tail_roots) ds = std::max(ds, std::abs(s - st.params.shifted(k)));
        worst_it = std::max(worst_it, st.iterations);
    }
    return {da < 1e-6 && ds < 1e-6,
            fmt("max coefficient diff %.2e, max tail-root diff %.2e (tol 1e-6); %zu homotopy steps, "
                "at most %d Newton iterations per n in total",
                da, ds, hr.log.size(), worst_it)};
}

// 10: quadratic asymptotics of the central root
Outcome c10() {
    std::vector<std::pair<double, double>> pts;
    std::string d;
    for (double c : {0.4, 0.2, 0.1, 0.05}) {
        const Potential target = Potential::constant(c, c);
        HomotopyOptions ho;
        ho.steps = 1;
        const HomotopyResult hr = continue_homotopy(Potential::zero(), target, {1}, ho);
        if (!hr.success) return {false, fmt("continuation to c=%.2f failed", c)};
        const auto s = locate_spectrum(target, ho.N0, ho.M);
        const ZetaFunction z = hr.states.at(1).params.to_zeta(make_closure(s, ClosureKind::Fitted));
        const cplx sigma0 = z.central_roots(s).at(0);
        pts.push_back({std::abs(s.gamma(0)), std::abs(sigma0 - s.tau(0))});
        d += fmt("c=%.2f dev %.3e; ", c, pts.back().second);
    }
    const SlopeResult r = asymptotics_slope(pts);
    return {!r.inconclusive && r.slope >= 1.8 && r.slope <= 2.2,
            d + fmt("slope %.4f (accept [1.8, 2.2])%s", r.slope, r.inconclusive ? " inconclusive" : "")};
}

// 11: product inequalities and the period matrix
Outcome c11() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> len(1, 40), mi(2, 20), sgn(0, 1);
    int bad1 = 0, bad2 = 0;
    for (int t = 0; t < 10000; ++t) {
        std::vector<cplx> a(len(rng));
        double n1 = 0.0;
        for (auto& x : a) {
            x = {u(rng), u(rng)};
            n1 += std::abs(x);
        }
        const double target = std::abs(u(rng));  // rescale to ||a||_1 <= 1
        for (auto& x : a) x *= target / n1;
        if (std::abs(product_minus_one(a)) > l1_product_bound(a) * (1.0 + 1e-12)) ++bad1;
    }
    for (int t = 0; t < 10000; ++t) {
        std::map<int, cplx> sigma;
        const int L = len(rng);
        double n2 = 0.0;
        for (int i = 0; i < L; ++i) {
            int j = static_cast<int>(u(rng) * 30);
            const cplx x{u(rng), u(rng)};
            sigma[j] = x;
        }
        for (const auto& [j, x] : sigma) n2 += std::norm(x);
        const double target = std::abs(u(rng));  // ||sigma|| <= 1
        for (auto& [j, x] : sigma) x *= target / std::sqrt(n2);
        const int m = (sgn(rng) ? 1 : -1) * mi(rng);
        if (std::abs(r_m_value(sigma, m)) > r_m_bound(sigma, m) * (1.0 + 1e-12)) ++bad2;
    }
    const FiniteGapContext ctx(locate_spectrum(Potential::constant(0.5, 0.5), 1, 8));
    const PeriodSetup ps = period_setup(ctx, 3, 2);
    const PeriodMatrixResult pm = period_matrix_nondegeneracy(ps.cycles, ps.etas, ps.k0);
    return {bad1 == 0 && bad2 == 0 && pm.rel_det >= 1e-12,
            fmt("l1 product violations %d/10000, r_m violations %d/10000; period matrix %dx%d |det|=%.3e, "
                "relative to row norms %.3e (fail below 1e-12), cond %.2e",
                bad1, bad2, static_cast<int>(pm.X.rows()), static_cast<int>(pm.X.cols()), pm.abs_det,
                pm.rel_det, pm.condition)};
}

// 12: multiplicity guard
Outcome c12() {
    std::string d;
    bool pass = true;
    auto expect = [&](const char* where, auto&& run) {
        try {
            run();
            d += std::string(where) + ": accepted (wrong); ";
            pass = false;
        } catch (const MultiplicityError& e) {
            const bool msg = std::strstr(e.what(), "outside L2_bullet") != nullptr;
            pass = pass && msg;
            d += std::string(where) + ": rejected \"" + e.what() + "\"; ";
        } catch (const Error& e) {
            d += std::string(where) + ": wrong error \"" + e.what() + "\"; ";
            pass = false;
        }
    };
    // triple zero of Delta - 2 at 0; the central disk still holds 4 N0 + 2 zeros
    auto central = [](cplx l) { return std::pair<cplx, cplx>{2.0 + l * l * l, 3.0 * l * l}; };
    expect("central disk", [&] { locate_spectrum_with(central, 1, 1); });
    // triple zero at 2 pi inside the lateral disk k = 2
    auto lateral = [](cplx l) {
        const cplx u = l - 2.0 * pi;
        return std::pair<cplx, cplx>{2.0 + u * u * u, 3.0 * u * u};
    };
    expect("lateral disk", [&] { lateral_zeros(lateral, 2, SpectrumOptions{}); });
    return {pass, d};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 2;
        }
    }
    const std::vector<std::function<Outcome()>> all = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};
    if (only < 0 || only > static_cast<int>(all.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    int failed = 0;
    for (int i = 1; i <= static_cast<int>(all.size()); ++i) {
        if (only && i != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = all[i - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2d %s: %s [%.1fs]\n", i, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
