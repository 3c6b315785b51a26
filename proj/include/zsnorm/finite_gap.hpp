#pragma once

#include <climits>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "canonical.hpp"
#include "contours.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"
#include "spectrum.hpp"

namespace zsnorm {

struct GapSet {
    std::vector<int> J;  // ascending
    int l() const { return static_cast<int>(J.size()); }
    int genus() const { return l() - 1; }
    bool contains(int k) const { return std::binary_search(J.begin(), J.end(), k); }
};

inline GapSet detect_gaps(const PeriodicSpectrum& s) {
    GapSet g;
    for (int k = -s.M(); k <= s.M(); ++k)
        if (!s.pair(k).is_double()) g.J.push_back(k);
    return g;
}

struct FiniteGapOptions {
    double quad_tol = 1e-13;
    double norm_tol = 1e-6;
    double basis_tol = 1e-8;
    int k_star = INT_MIN;  // INT_MIN selects min(J)
    ClosureKind closure = ClosureKind::Fitted;
    ContourPolicy contours{};
};

// Shared data for all constructions over one spectrum.
class FiniteGapContext {
public:
    FiniteGapContext(const PeriodicSpectrum& s, const FiniteGapOptions& opt = {})
        : spectrum_(s), contours_(build_contours(s, opt.contours)), gaps_(detect_gaps(s)),
          root_(s, opt.closure), opt_(opt) {
        for (int k : gaps_.J) wroots_.push_back({s.pair(k).minus, s.pair(k).plus});
    }

    const PeriodicSpectrum& spectrum() const noexcept { return spectrum_; }
    const ContourSet& contours() const noexcept { return contours_; }
    const GapSet& gaps() const noexcept { return gaps_; }
    const CanonicalRoot& canonical() const noexcept { return root_; }
    const FiniteGapOptions& options() const noexcept { return opt_; }

    // w_J(lambda) = prod_{k in J} sqrt_s((lambda - lambda_k^-)(lambda - lambda_k^+)).
    cplx wJ(cplx lambda) const {
        cplx p = 1.0;
        for (const auto& r : wroots_) p *= r(lambda);
        return p;
    }

    template <class F>
    auto cycle(F&& f, int m) const {
        QuadratureOptions q;
        q.tol = opt_.quad_tol;
        return trapezoid(std::forward<F>(f), contours_.gamma(m), q).value;
    }

    template <class F>
    auto on_circle(F&& f, const Circle& c) const {
        QuadratureOptions q;
        q.tol = opt_.quad_tol;
        return trapezoid(std::forward<F>(f), c, q).value;
    }

    // Circle enclosing every branch point of J and the point z.
    Circle big_circle(cplx z = 0.0) const {
        double r = std::max(1.0, std::abs(z));
        for (const auto& w : wroots_) r = std::max({r, std::abs(w.a), std::abs(w.b)});
        return {0.0, 2.0 * r + 1.0};
    }

    // Small circle around z that stays clear of all cuts of J.
    Circle small_circle(cplx z) const {
        double d = 0.25;
        for (const auto& w : wroots_) d = std::min(d, 0.5 * w.distance_to_cut(z));
        return {z, d};
    }

private:
    PeriodicSpectrum spectrum_;
    ContourSet contours_;
    GapSet gaps_;
    CanonicalRoot root_;
    FiniteGapOptions opt_;
    std::vector<StandardRoot> wroots_;
};

// omega_s = P_s dlambda / w_J, s in J \ {excluded}, with A-periods delta.
struct HolomorphicBasis {
    int excluded = 0;
    std::vector<int> index;
    std::vector<Poly> P;
    double residual = 0.0;
    double condition = 1.0;

    const Poly& at(int s) const {
        for (std::size_t i = 0; i < index.size(); ++i)
            if (index[i] == s) return P[i];
        throw Error("HolomorphicBasis: index not in basis");
    }
};

inline double condition_number(const Eigen::MatrixXcd& A) {
    if (A.size() == 0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / smin;
}

inline HolomorphicBasis normalized_basis(const FiniteGapContext& ctx, int excluded) {
    const auto& J = ctx.gaps().J;
    HolomorphicBasis b;
    b.excluded = excluded;
    for (int k : J)
        if (k != excluded) b.index.push_back(k);
    const int d = static_cast<int>(b.index.size());
    if (d == 0 || d != ctx.gaps().l() - 1) {
        if (d != 0) throw Error("normalized_basis: excluded index must lie in J");
        return b;
    }
    Eigen::MatrixXcd A(d, d);
    for (int i = 0; i < d; ++i) {
        auto f = [&](cplx z) {
            Eigen::VectorXcd v(d);
            const cplx w = 1.0 / ctx.wJ(z);
            cplx zp = 1.0;
            for (int p = 0; p < d; ++p) {
                v(p) = zp * w;
                zp *= z;
            }
            return v;
        };
        A.row(i) = ctx.cycle(f, b.index[i]).transpose();
    }
    b.condition = condition_number(A);
    if (!(b.condition < 1e12))
        throw SingularMatrixError("normalized_basis: singular period matrix", b.condition);
    Eigen::MatrixXcd C = A.fullPivLu().solve(Eigen::MatrixXcd::Identity(d, d));
    for (int s = 0; s < d; ++s) {
        std::vector<cplx> c(d);
        for (int p = 0; p < d; ++p) c[p] = C(p, s);
        b.P.emplace_back(std::move(c));
    }
    // re-integrate the assembled differentials
    double res = 0.0;
    for (int i = 0; i < d; ++i)
        for (int s = 0; s < d; ++s) {
            const Poly& P = b.P[s];
            cplx v = ctx.cycle([&](cplx z) { return P(z) / ctx.wJ(z); }, b.index[i]);
            res = std::max(res, std::abs(v - (i == s ? 1.0 : 0.0)));
        }
    b.residual = res;
    if (res > ctx.options().basis_tol)
        throw NormalizationError("normalized_basis: A-period residual above basis_tol", res);
    return b;
}

// chi_n = -P(lambda) dlambda / (i w_J(lambda) D(lambda)), D = 1 for n in J and
// D = tau_n - lambda otherwise.
struct NormalizedDifferential {
    int n = 0;
    bool open = true;
    Poly P;          // corrected numerator P_n
    Poly P_tilde;    // numerator before the holomorphic corrections
    cplx eps{0.0};   // closed kind only
    int e = 0;       // closed kind only
    cplx tau{0.0};   // pole location (closed kind)
    int k_star = 0;  // closed kind only
    std::map<int, cplx> corrections;  // c_s or c_m^n
    double residual = 0.0;

    // Non-leading coefficients of P_n.
    std::vector<cplx> alpha() const {
        const auto& c = P.coeffs();
        return std::vector<cplx>(c.begin(), c.end() - 1);
    }

    cplx denominator(cplx lambda) const { return open ? cplx{1.0} : tau - lambda; }
};

inline cplx chi_eval(const FiniteGapContext& ctx, const NormalizedDifferential& d, cplx lambda,
                     bool corrected = true) {
    const Poly& P = corrected ? d.P : d.P_tilde;
    return -P(lambda) / (I * ctx.wJ(lambda) * d.denominator(lambda));
}

// (1/2 pi) contour integral of chi_n over Gamma_m for every |m| <= M.
inline std::map<int, cplx> chi_periods(const FiniteGapContext& ctx,
                                       const NormalizedDifferential& d) {
    std::map<int, cplx> out;
    const int M = ctx.spectrum().M();
    for (int m = -M; m <= M; ++m)
        out[m] = ctx.cycle([&](cplx z) { return chi_eval(ctx, d, z); }, m) / (2.0 * pi);
    return out;
}

inline double chi_residual(const FiniteGapContext& ctx, const NormalizedDifferential& d) {
    double r = 0.0;
    for (const auto& [m, v] : chi_periods(ctx, d)) r = std::max(r, std::abs(v - (m == d.n ? 1.0 : 0.0)));
    return r;
}

inline NormalizedDifferential chi_open_gap(const FiniteGapContext& ctx, int n,
                                           bool verify = true) {
    const auto& g = ctx.gaps();
    if (!g.contains(n)) throw Error("chi_open_gap: n must be an open gap");
    const int l = g.l();
    NormalizedDifferential d;
    d.n = n;
    d.open = true;
    d.P_tilde = Poly::neg_power(l - 1);
    d.P = d.P_tilde;
    HolomorphicBasis basis = normalized_basis(ctx, n);
    for (std::size_t i = 0; i < basis.index.size(); ++i) {
        const int s = basis.index[i];
        const cplx cs =
            ctx.cycle([&](cplx z) { return chi_eval(ctx, d, z, false); }, s);
        d.corrections[s] = cs;
    }
    for (std::size_t i = 0; i < basis.index.size(); ++i)
        d.P = d.P + basis.P[i] * (I * d.corrections[basis.index[i]]);
    if (verify) {
        d.residual = chi_residual(ctx, d);
        if (d.residual > ctx.options().norm_tol)
            throw NormalizationError("chi_open_gap: normalization residual above norm_tol",
                                     d.residual);
    }
    return d;
}

// e_n and eps_n making the residue of the closed-gap differential at tau_n^+ equal -i.
inline std::pair<cplx, int> epsilon_n(const FiniteGapContext& ctx, int n) {
    const auto& g = ctx.gaps();
    if (g.contains(n)) throw Error("epsilon_n: n must be a closed gap");
    const int l = g.l();
    const cplx t = ctx.spectrum().tau(n);
    const int e = std::abs(t) < 1e-8 ? 1 : 0;
    const cplx w = ctx.wJ(t);
    const cplx base = std::pow(t + double(e), l - 1);
    if (base == 0.0) throw Error("epsilon_n: tau_n + e_n vanishes");
    const cplx eps = (w - Poly::neg_power(l)(t)) / base;
    return {eps, e};
}

inline NormalizedDifferential chi_closed_gap(const FiniteGapContext& ctx, int n,
                                             int k_star = INT_MIN, bool verify = true) {
    const auto& g = ctx.gaps();
    if (g.contains(n)) throw Error("chi_closed_gap: n must be a closed gap");
    if (g.l() == 0) throw Error("chi_closed_gap: J is empty, use the free construction");
    if (k_star == INT_MIN) k_star = ctx.options().k_star;
    if (k_star == INT_MIN) k_star = g.J.front();
    if (!g.contains(k_star)) throw Error("chi_closed_gap: k_* must lie in J");
    const int l = g.l();
    NormalizedDifferential d;
    d.n = n;
    d.open = false;
    d.tau = ctx.spectrum().tau(n);
    d.k_star = k_star;
    auto [eps, e] = epsilon_n(ctx, n);
    d.eps = eps;
    d.e = e;
    // chi~_n = ((-lambda)^l + eps (lambda + e)^{l-1}) / ((lambda - tau_n) i w_J)
    Poly shift({double(e), 1.0});
    Poly pw = Poly::constant(1.0);
    for (int i = 0; i < l - 1; ++i) pw = pw * shift;
    d.P_tilde = Poly::neg_power(l) + pw * eps;
    d.P = d.P_tilde;
    HolomorphicBasis basis = normalized_basis(ctx, k_star);
    for (int m : basis.index)
        d.corrections[m] = ctx.cycle([&](cplx z) { return chi_eval(ctx, d, z, false); }, m);
    const Poly lin({-d.tau, 1.0});  // lambda - tau_n
    for (std::size_t i = 0; i < basis.index.size(); ++i)
        d.P = d.P - lin * basis.P[i] * (I * d.corrections[basis.index[i]]);
    if (verify) {
        d.residual = chi_residual(ctx, d);
        if (d.residual > ctx.options().norm_tol)
            throw NormalizationError("chi_closed_gap: normalization residual above norm_tol",
                                     d.residual);
    }
    return d;
}

struct ResidueReport {
    cplx inf_plus{0.0};
    cplx inf_minus{0.0};
    cplx tau_plus{0.0};   // closed kind
    cplx tau_minus{0.0};  // closed kind
    cplx stokes{0.0};     // sum of A-periods over J plus 2 pi i times residues on the sheet
};

// Residues by circle quadrature; `corrected` selects chi_n instead of the
// uncorrected chi (open) or chi~_n (closed).
inline ResidueReport residues(const FiniteGapContext& ctx, const NormalizedDifferential& d,
                              bool corrected = false) {
    ResidueReport r;
    auto f = [&](cplx z) { return chi_eval(ctx, d, z, corrected); };
    auto fm = [&](cplx z) { return -chi_eval(ctx, d, z, corrected); };  // other sheet
    const Circle big = ctx.big_circle(d.open ? cplx{0.0} : d.tau);
    r.inf_plus = -ctx.on_circle(f, big) / (2.0 * pi * I);
    r.inf_minus = -ctx.on_circle(fm, big) / (2.0 * pi * I);
    cplx total = 2.0 * pi * I * r.inf_plus;
    if (!d.open) {
        const Circle sm = ctx.small_circle(d.tau);
        r.tau_plus = ctx.on_circle(f, sm) / (2.0 * pi * I);
        r.tau_minus = ctx.on_circle(fm, sm) / (2.0 * pi * I);
        total += 2.0 * pi * I * r.tau_plus;
    }
    for (int m : ctx.gaps().J) total += ctx.cycle(f, m);
    r.stokes = total;
    return r;
}

// zeta_n(lambda) = -(2/pi_n) (prod_{|j|<=N, j!=n} pi_j)^{-1} Q(lambda)
//                  * prod_{N<|j|<=M, j!=n} (s_j - lambda)/pi_j * closure(lambda)
struct ZetaFunction {
    int n = 0, N = 0, M = 0;
    Poly Q;
    std::map<int, cplx> tail_roots;
    TailClosure closure;
    double residual_matrix_max = 0.0;

    int degree() const { return Q.degree(); }

    // a_1..a_D with Q = (-lambda)^D + a_1 lambda^{D-1} + ... + a_D.
    std::vector<cplx> a() const {
        const int D = Q.degree();
        std::vector<cplx> out(D);
        for (int i = 1; i <= D; ++i) out[i - 1] = Q[D - i];
        return out;
    }

    static Poly poly_from_a(const std::vector<cplx>& a) {
        const int D = static_cast<int>(a.size());
        std::vector<cplx> c(D + 1);
        c[D] = D % 2 ? -1.0 : 1.0;
        for (int i = 1; i <= D; ++i) c[D - i] = a[i - 1];
        return Poly(std::move(c));
    }

    cplx prefactor() const {
        cplx p = -2.0 / pi_k(n);
        for (int j = -N; j <= N; ++j)
            if (j != n) p /= pi_k(j);
        return p;
    }

    cplx tail(cplx lambda) const {
        cplx p = closure(lambda);
        for (const auto& [k, s] : tail_roots) p *= (s - lambda) / pi_k(k);
        return p;
    }

    cplx operator()(cplx lambda) const { return prefactor() * Q(lambda) * tail(lambda); }

    // Roots of Q labelled by greedy nearest-midpoint matching with |k| <= N.
    std::map<int, cplx> central_roots(const PeriodicSpectrum& s) const {
        auto r = Q.roots();
        std::vector<int> labels;
        for (int k = -N; k <= N; ++k)
            if (!(k == n && std::abs(n) <= N)) labels.push_back(k);
        std::map<int, cplx> out;
        std::vector<bool> used(r.size(), false);
        std::set<int> done;
        while (out.size() < std::min(labels.size(), r.size())) {
            double best = std::numeric_limits<double>::infinity();
            int bk = 0;
            std::size_t bi = 0;
            for (int k : labels) {
                if (done.count(k)) continue;
                for (std::size_t i = 0; i < r.size(); ++i) {
                    if (used[i]) continue;
                    const double d = std::abs(r[i] - s.tau(k));
                    if (d < best) {
                        best = d;
                        bk = k;
                        bi = i;
                    }
                }
            }
            out[bk] = r[bi];
            used[bi] = true;
            done.insert(bk);
        }
        return out;
    }
};

// (1/2 pi) contour integral of zeta_n / sqrt_c over Gamma_m minus delta_mn, |m| <= M.
inline std::map<int, cplx> zeta_residuals(const FiniteGapContext& ctx, const ZetaFunction& z) {
    std::map<int, cplx> out;
    const int M = ctx.spectrum().M();
    const auto& root = ctx.canonical();
    for (int m = -M; m <= M; ++m) {
        cplx v = ctx.cycle([&](cplx x) { return z(x) / root(x); }, m) / (2.0 * pi);
        out[m] = v - (m == z.n ? 1.0 : 0.0);
    }
    return out;
}

namespace detail {

inline void check_window(const FiniteGapContext& ctx, int n, int N) {
    const auto& s = ctx.spectrum();
    if (N < s.N0() || N >= s.M()) throw Error("zeta: need N0 <= N < M");
    if (std::abs(n) > s.M()) throw Error("zeta: need |n| <= M");
    const double R = (N + 0.25) * pi;
    for (int k : ctx.gaps().J) {
        if (std::abs(k) > N) throw Error("zeta: open gap outside the central window, increase N");
        if (std::abs(s.pair(k).minus) > R || std::abs(s.pair(k).plus) > R)
            throw Error("zeta: branch point outside (N + 1/4) pi, increase N");
    }
}

inline ZetaFunction finish_zeta(const FiniteGapContext& ctx, int n, int N, const Poly& P,
                                bool verify) {
    const auto& s = ctx.spectrum();
    ZetaFunction z;
    z.n = n;
    z.N = N;
    z.M = s.M();
    z.closure = ctx.canonical().closure();
    Poly Q = P;
    for (int j = -N; j <= N; ++j)
        if (j != n && !ctx.gaps().contains(j)) Q = Q * Poly::root_factor(s.tau(j));
    z.Q = Q;
    const int D = Q.degree();
    const int expect = std::abs(n) <= N ? 2 * N : 2 * N + 1;
    if (D != expect) throw StructuralError("zeta: unexpected degree of Q_n^N");
    const double lead = D % 2 ? -1.0 : 1.0;
    if (std::abs(Q.leading() - lead) > 1e-10)
        throw NormalizationError("zeta: leading coefficient deviates from (-1)^deg",
                                 std::abs(Q.leading() - lead));
    for (int k = N + 1; k <= s.M(); ++k)
        for (int kk : {-k, k})
            if (kk != n) z.tail_roots[kk] = s.tau(kk);
    if (verify) {
        double r = 0.0;
        for (const auto& [m, v] : zeta_residuals(ctx, z)) r = std::max(r, std::abs(v));
        z.residual_matrix_max = r;
        if (r > ctx.options().norm_tol)
            throw NormalizationError("zeta: normalization residual above norm_tol", r);
    }
    return z;
}

}  // namespace detail

inline ZetaFunction assemble_zeta(const FiniteGapContext& ctx, const NormalizedDifferential& d,
                                  int N, bool verify = true) {
    detail::check_window(ctx, d.n, N);
    // zeta_n = -(2/pi_n) P_n prod_{j notin J, j != n}(tau_j - lambda)/pi_j / prod_{J\{n}} pi_j
    return detail::finish_zeta(ctx, d.n, N, d.P, verify);
}

// Direct construction of zeta_n for the spectrum in ctx.
inline ZetaFunction zeta(const FiniteGapContext& ctx, int n, int N, bool verify = true,
                         int k_star = INT_MIN) {
    detail::check_window(ctx, n, N);
    const auto& g = ctx.gaps();
    if (g.l() == 0) return detail::finish_zeta(ctx, n, N, Poly::constant(1.0), verify);
    NormalizedDifferential d =
        g.contains(n) ? chi_open_gap(ctx, n, verify) : chi_closed_gap(ctx, n, k_star, verify);
    return assemble_zeta(ctx, d, N, verify);
}

struct CoefficientBox {
    double T = 0.0;      // max |alpha_j^(n)|
    int N_rec = 0;       // all probed roots inside (N_rec + 1/4) pi
    double radius = 0.0; // r with every coefficient vector inside B_{r/2}
    double max_root = 0.0;
};

inline CoefficientBox coefficient_box(const std::vector<NormalizedDifferential>& diffs,
                                      const std::vector<ZetaFunction>& zetas, int N0) {
    CoefficientBox b;
    for (const auto& d : diffs)
        for (const auto& a : d.alpha()) b.T = std::max(b.T, std::abs(a));
    double anorm = 0.0;
    for (const auto& z : zetas) {
        double s = 0.0;
        for (const auto& a : z.a()) s += std::norm(a);
        anorm = std::max(anorm, std::sqrt(s));
        for (const auto& r : z.Q.roots()) b.max_root = std::max(b.max_root, std::abs(r));
    }
    b.N_rec = N0;
    while ((b.N_rec + 0.25) * pi <= b.max_root) ++b.N_rec;
    b.radius = 2.0 * anorm;
    return b;
}

struct PeriodMatrixResult {
    Eigen::MatrixXcd X;
    double abs_det = 0.0;
    double rel_det = 0.0;  // |det| / prod of row norms
    double condition = 0.0;
    bool singular = false;
};

// X_{k0} = (contour integral of eta_j over C_m), m != k0.
inline PeriodMatrixResult period_matrix_nondegeneracy(
    const std::vector<Circle>& cycles, const std::vector<std::function<cplx(cplx)>>& etas,
    int k0, double quad_tol = 1e-12, double threshold = 1e-12) {
    const int g = static_cast<int>(etas.size());
    if (static_cast<int>(cycles.size()) != g + 1 || k0 < 0 || k0 > g)
        throw Error("period_matrix_nondegeneracy: need g+s+1 cycles, g+s differentials");
    PeriodMatrixResult r;
    r.X.resize(g, g);
    QuadratureOptions q;
    q.tol = quad_tol;
    for (int j = 0; j < g; ++j) {
        int col = 0;
        for (int m = 0; m <= g; ++m) {
            if (m == k0) continue;
            r.X(j, col++) = trapezoid(etas[j], cycles[m], q).value;
        }
    }
    r.abs_det = std::abs(r.X.fullPivLu().determinant());
    double rows = 1.0;
    for (int j = 0; j < g; ++j) rows *= r.X.row(j).norm();
    r.rel_det = rows > 0.0 ? r.abs_det / rows : 0.0;
    r.condition = condition_number(r.X);
    r.singular = !(r.rel_det >= threshold);
    return r;
}

struct PeriodSetup {
    std::vector<Circle> cycles;
    std::vector<std::function<cplx(cplx)>> etas;
    int k0 = 0;
};

// Differentials eta_l = i lambda^{2N-l+1} dlambda / ((tau_n - lambda)
// prod_{|k|<=N, k notin J}(tau_k - lambda) w_J), l = 1..2N+1, for |n| > N; the
// cycles are the gap contours of J, circles around the central closed
// midpoints, and finally a circle around tau_n, which is the dropped one.
inline PeriodSetup period_setup(const FiniteGapContext& ctx, int n, int N) {
    const auto& s = ctx.spectrum();
    const auto& g = ctx.gaps();
    if (std::abs(n) <= N || std::abs(n) > s.M()) throw Error("period_setup: need N < |n| <= M");
    PeriodSetup p;
    for (int k : g.J) p.cycles.push_back(ctx.contours().gamma(k));
    std::vector<cplx> closed;
    for (int k = -N; k <= N; ++k)
        if (!g.contains(k)) {
            closed.push_back(s.tau(k));
            p.cycles.push_back(ctx.contours().gamma(k));
        }
    p.cycles.push_back(ctx.contours().gamma(n));
    p.k0 = static_cast<int>(p.cycles.size()) - 1;
    const cplx tn = s.tau(n);
    for (int l = 1; l <= 2 * N + 1; ++l) {
        const int pw = 2 * N - l + 1;
        p.etas.push_back([&ctx, closed, tn, pw](cplx z) {
            cplx den = (tn - z) * ctx.wJ(z);
            for (const auto& t : closed) den *= t - z;
            return I * std::pow(z, pw) / den;
        });
    }
    return p;
}

}  // namespace zsnorm
