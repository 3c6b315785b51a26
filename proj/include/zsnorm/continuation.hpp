#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "finite_gap.hpp"

namespace zsnorm {

// Index bookkeeping for v = (v_k)_{k != n, |k| <= M}: central slots carry the
// coefficients a, lateral slots the shifts sigma_k.
class Layout {
public:
    Layout(int n, int N, int M) : n_(n), N_(N), M_(M) {
        if (N < 0 || M <= N || std::abs(n) > M) throw Error("Layout: need 0 <= N < M and |n| <= M");
        for (int k = -M; k <= M; ++k)
            if (k != n) ks_.push_back(k);
    }

    int n() const noexcept { return n_; }
    int N() const noexcept { return N_; }
    int M() const noexcept { return M_; }
    bool central_n() const noexcept { return std::abs(n_) <= N_; }
    int degree() const noexcept { return central_n() ? 2 * N_ : 2 * N_ + 1; }
    int size() const noexcept { return static_cast<int>(ks_.size()); }
    const std::vector<int>& indices() const noexcept { return ks_; }
    int position(int k) const { return k < n_ ? k + M_ : k + M_ - 1; }
    bool is_coefficient(int k) const { return std::abs(k) <= N_; }

    // 0-based position in a = (a_1, ..., a_D).
    int coefficient_index(int k) const {
        if (!central_n() || k < n_) return N_ + k;
        return N_ + k - 1;
    }

    // Power of lambda multiplying the coefficient in slot k.
    int power(int k) const { return degree() - 1 - coefficient_index(k); }

private:
    int n_, N_, M_;
    std::vector<int> ks_;
};

struct AnsatzParams {
    int n = 0, N = 0, M = 0;
    std::map<int, cplx> sigma;  // N+1 <= |k| <= M, k != n
    std::vector<cplx> a;        // length 2N or 2N+1

    Layout layout() const { return Layout(n, N, M); }

    Poly Q() const { return ZetaFunction::poly_from_a(a); }
    cplx shifted(int k) const { return k * pi + sigma.at(k); }

    Eigen::VectorXcd to_v() const {
        Layout L = layout();
        Eigen::VectorXcd v(L.size());
        for (int k : L.indices())
            v(L.position(k)) = L.is_coefficient(k) ? a.at(L.coefficient_index(k)) : sigma.at(k);
        return v;
    }

    void set_v(const Eigen::VectorXcd& v) {
        Layout L = layout();
        a.assign(L.degree(), 0.0);
        for (int k : L.indices()) {
            if (L.is_coefficient(k))
                a[L.coefficient_index(k)] = v(L.position(k));
            else
                sigma[k] = v(L.position(k));
        }
    }

    double sigma_norm() const {
        double s = 0.0;
        for (const auto& [k, x] : sigma) s += std::norm(x);
        return std::sqrt(s);
    }
    double a_norm() const {
        double s = 0.0;
        for (const auto& x : a) s += std::norm(x);
        return std::sqrt(s);
    }

    static AnsatzParams from_zeta(const ZetaFunction& z) {
        AnsatzParams p;
        p.n = z.n;
        p.N = z.N;
        p.M = z.M;
        p.a = z.a();
        for (const auto& [k, s] : z.tail_roots) p.sigma[k] = s - k * pi;
        return p;
    }

    ZetaFunction to_zeta(const TailClosure& closure) const {
        ZetaFunction z;
        z.n = n;
        z.N = N;
        z.M = M;
        z.Q = Q();
        z.closure = closure;
        for (const auto& [k, s] : sigma) z.tail_roots[k] = k * pi + s;
        return z;
    }

    // Finite-gap solution of the zero potential: a from prod_{|j|<=N, j!=n}(j pi - lambda).
    static AnsatzParams free(int n, int N, int M) {
        Poly q = Poly::constant(1.0);
        for (int j = -N; j <= N; ++j)
            if (j != n) q = q * Poly::root_factor(j * pi);
        ZetaFunction z;
        z.n = n;
        z.N = N;
        z.M = M;
        z.Q = q;
        AnsatzParams p;
        p.n = n;
        p.N = N;
        p.M = M;
        p.a = z.a();
        for (int k = N + 1; k <= M; ++k)
            for (int kk : {-k, k})
                if (kk != n) p.sigma[kk] = 0.0;
        return p;
    }
};

// f_n with the tail beyond M closed by `closure` (the free sine closure by default).
inline cplx f_n_eval(const AnsatzParams& p, cplx lambda, const TailClosure& closure) {
    return p.to_zeta(closure)(lambda);
}

inline cplx f_n_eval(const AnsatzParams& p, cplx lambda) {
    TailClosure c;
    c.M = p.M;
    c.b = 0.0;
    return f_n_eval(p, lambda, c);
}

// Node count for the trapezoid rule on c given the singular points of the
// integrand: geometric convergence with ratio max(|inside|/r, r/|outside|).
inline int geometric_nodes(const Circle& c, const std::vector<cplx>& sing, double eps = 1e-16) {
    double q = 0.0;
    for (const auto& p : sing) {
        const double d = std::abs(p - c.center);
        q = std::max(q, d < c.radius ? d / c.radius : c.radius / d);
    }
    if (q <= 0.0) return 32;
    if (q >= 0.995) throw QuadratureError("geometric_nodes: singularity on the contour", q, q);
    int n = static_cast<int>(std::ceil(std::log(eps) / std::log(q))) + 8;
    n = ((n + 15) / 16) * 16;
    return std::clamp(n, 32, 8192);
}

// Everything needed to evaluate F^n for one potential: spectrum, contours,
// canonical root and, per contour, nodes with cached 1/sqrt_c weights.
class Frame {
public:
    Frame(const Potential& p, FiniteGapContext ctx) : potential_(p), ctx_(std::move(ctx)) {
        const auto& s = ctx_.spectrum();
        const int M = s.M();
        std::vector<cplx> sing;
        for (int k = -M; k <= M; ++k) {
            sing.push_back(s.pair(k).minus);
            if (!s.pair(k).is_double()) sing.push_back(s.pair(k).plus);
        }
        nodes_.resize(2 * M + 1);
        for (int m = -M; m <= M; ++m) {
            const Circle& c = ctx_.contours().gamma(m);
            const int n = geometric_nodes(c, sing);
            auto& nd = nodes_[m + M];
            nd.z.resize(n);
            nd.w.resize(n);
            const double h = 2.0 * pi / n;
            for (int i = 0; i < n; ++i) {
                const double t = i * h;
                nd.z[i] = c.at(t);
                nd.w[i] = h * c.tangent(t) / (2.0 * I * ctx_.canonical().window_product(nd.z[i]));
            }
        }
    }

    static Frame build(const Potential& p, int N0, int M, const SpectrumOptions& so = {},
                       const FiniteGapOptions& fo = {}) {
        return Frame(p, FiniteGapContext(locate_spectrum(p, N0, M, so), fo));
    }

    struct Nodes {
        std::vector<cplx> z, w;
    };

    const Potential& potential() const noexcept { return potential_; }
    const FiniteGapContext& context() const noexcept { return ctx_; }
    const PeriodicSpectrum& spectrum() const noexcept { return ctx_.spectrum(); }
    const Nodes& nodes(int m) const { return nodes_.at(m + spectrum().M()); }

private:
    Potential potential_;
    FiniteGapContext ctx_;
    std::vector<Nodes> nodes_;
};

// F^n_m = (n - m) contour integral over Gamma_m of f_n / sqrt_c, for m != n in layout order.
// The closure is shared by f_n and sqrt_c and cancels.
inline Eigen::VectorXcd F_map(const AnsatzParams& p, const Frame& fr) {
    if (p.M != fr.spectrum().M()) throw Error("F_map: truncation differs from the frame");
    Layout L = p.layout();
    const Poly Q = p.Q();
    cplx pref = -2.0 / pi_k(p.n);
    for (int j = -p.N; j <= p.N; ++j)
        if (j != p.n) pref /= pi_k(j);
    std::vector<std::pair<cplx, cplx>> tail;  // (sigma~_k, pi_k)
    for (const auto& [k, s] : p.sigma) tail.push_back({k * pi + s, pi_k(k)});
    Eigen::VectorXcd F(L.size());
    for (int m : L.indices()) {
        const auto& nd = fr.nodes(m);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < nd.z.size(); ++i) {
            const cplx z = nd.z[i];
            cplx v = Q(z);
            for (const auto& [st, pk] : tail) v *= (st - z) / pk;
            acc += v * nd.w[i];
        }
        F(L.position(m)) = double(p.n - m) * pref * acc;
    }
    return F;
}

inline double max_abs(const Eigen::VectorXcd& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

// Central differences with h_j = scale (1 + |v_j|), columns in layout order.
inline Eigen::MatrixXcd jacobian_fd(const AnsatzParams& p, const Frame& fr, double scale = 1e-6) {
    const Eigen::VectorXcd v0 = p.to_v();
    const int d = static_cast<int>(v0.size());
    Eigen::MatrixXcd J(d, d);
    AnsatzParams q = p;
    for (int j = 0; j < d; ++j) {
        const double h = scale * (1.0 + std::abs(v0(j)));
        Eigen::VectorXcd v = v0;
        v(j) = v0(j) + h;
        q.set_v(v);
        const Eigen::VectorXcd fp = F_map(q, fr);
        v(j) = v0(j) - h;
        q.set_v(v);
        const Eigen::VectorXcd fm = F_map(q, fr);
        J.col(j) = (fp - fm) / (2.0 * h);
    }
    return J;
}

namespace detail {

inline cplx central_root_product(const FiniteGapContext& ctx, int N, cplx z) {
    cplx p = 1.0;
    for (int k = -N; k <= N; ++k) p *= ctx.canonical().root(k)(z);
    return p;
}

template <class G>
cplx fixed_cycle(const Frame& fr, int m, G&& g) {
    // same nodes as F_map but without the cached 1/sqrt_c weights
    const Circle& c = fr.context().contours().gamma(m);
    const int n = static_cast<int>(fr.nodes(m).z.size());
    return trapezoid_fixed(std::forward<G>(g), c, n);
}

}  // namespace detail

// The base-point Jacobian of F^n from the displayed formulas: closed-form
// lateral diagonal, central and mixed entries by quadrature of their
// integrands. Entries of the vanishing blocks are integrated as well so that
// the block structure is measured rather than imposed.
inline Eigen::MatrixXcd jacobian_formula(const Frame& fr, int n, int N,
                                         const std::vector<cplx>& a) {
    const auto& ctx = fr.context();
    const auto& s = ctx.spectrum();
    Layout L(n, N, s.M());
    if (static_cast<int>(a.size()) != L.degree()) throw Error("jacobian_formula: wrong length of a");
    const Poly Q = ZetaFunction::poly_from_a(a);
    const bool central = L.central_n();
    const cplx tn = central ? cplx{0.0} : s.tau(n);
    auto inv_den = [&](cplx z) {
        cplx d = detail::central_root_product(ctx, N, z);
        if (!central) d *= (tn - z);
        return 1.0 / d;
    };
    const int d = L.size();
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(d, d);
    for (int m : L.indices()) {
        const double nm = double(n - m);
        for (int j : L.indices()) {
            cplx val;
            if (std::abs(m) > N && std::abs(j) > N && m == j) {
                const cplx tj = s.tau(j);
                val = 2.0 * pi * nm * Q(tj) / detail::central_root_product(ctx, N, tj);
                if (!central) val /= (tn - tj);
            } else if (std::abs(j) <= N) {
                const int pw = L.power(j);
                val = nm * detail::fixed_cycle(fr, m, [&](cplx z) {
                          return I * std::pow(z, pw) * inv_den(z);
                      });
            } else {
                const cplx tj = s.tau(j);
                val = nm * detail::fixed_cycle(fr, m, [&](cplx z) {
                          return I * Q(z) * inv_den(z) / (tj - z);
                      });
            }
            J(L.position(m), L.position(j)) = val;
        }
    }
    return J;
}

inline Eigen::MatrixXcd jacobian_analytic_base(const Frame& fr, const ZetaFunction& base) {
    const auto& s = fr.spectrum();
    for (int j = -s.M(); j <= s.M(); ++j) {
        if (std::abs(j) <= base.N || j == base.n) continue;
        if (std::abs(base.Q(s.tau(j))) < 1e-12 * std::max(1.0, std::abs(s.tau(j))))
            throw StructuralError("jacobian_analytic_base: tau_" + std::to_string(j) +
                                  " is a zero of Q_n^N; increase N");
    }
    return jacobian_formula(fr, base.n, base.N, base.a());
}

struct BlockReport {
    double zero_block = 0.0;      // max over |j| <= N, |m| >= N+1
    double lateral_offdiag = 0.0; // max over |m|, |j| >= N+1, m != j
    std::vector<std::pair<int, cplx>> diagonal;  // (m, entry) for |m| >= N+1
};

inline BlockReport block_structure(const Eigen::MatrixXcd& J, const Layout& L) {
    BlockReport r;
    const int N = L.N();
    for (int m : L.indices()) {
        if (std::abs(m) <= N) continue;
        for (int j : L.indices()) {
            const double v = std::abs(J(L.position(m), L.position(j)));
            if (std::abs(j) <= N)
                r.zero_block = std::max(r.zero_block, v);
            else if (j != m)
                r.lateral_offdiag = std::max(r.lateral_offdiag, v);
        }
        r.diagonal.push_back({m, J(L.position(m), L.position(m))});
    }
    return r;
}

struct LimitMatrix {
    std::vector<int> index;  // |k| <= M
    Eigen::MatrixXcd F;
    double smallest_singular = 0.0;
    bool singular = false;

    int position(int k) const { return k + (static_cast<int>(index.size()) - 1) / 2; }
};

inline double smallest_singular_value(const Eigen::MatrixXcd& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// The limit matrix F^infinity(a), a of length 2N+1, truncated to |m|, |j| <= M.
inline LimitMatrix limit_matrix(const Frame& fr, int N, const std::vector<cplx>& a,
                                double singular_tol = 1e-10) {
    const auto& ctx = fr.context();
    const auto& s = ctx.spectrum();
    const int M = s.M();
    if (static_cast<int>(a.size()) != 2 * N + 1) throw Error("limit_matrix: need 2N+1 coefficients");
    const Poly Q = ZetaFunction::poly_from_a(a);
    LimitMatrix lm;
    for (int k = -M; k <= M; ++k) lm.index.push_back(k);
    const int d = 2 * M + 1;
    lm.F = Eigen::MatrixXcd::Zero(d, d);
    for (int m = -M; m <= M; ++m) {
        if (std::abs(m) > N) {
            const cplx tm = s.tau(m);
            lm.F(m + M, m + M) = 2.0 * Q(tm) / detail::central_root_product(ctx, N, tm);
            continue;
        }
        for (int j = -M; j <= M; ++j) {
            cplx val;
            if (std::abs(j) <= N) {
                const int pw = N - j;
                val = detail::fixed_cycle(fr, m, [&](cplx z) {
                    return std::pow(z, pw) / detail::central_root_product(ctx, N, z);
                });
            } else {
                const cplx tj = s.tau(j);
                val = detail::fixed_cycle(fr, m, [&](cplx z) {
                    return Q(z) / ((tj - z) * detail::central_root_product(ctx, N, z));
                });
            }
            lm.F(m + M, j + M) = I / pi * val;
        }
    }
    lm.smallest_singular = smallest_singular_value(lm.F);
    lm.singular = lm.smallest_singular < singular_tol * std::max(1.0, lm.F.norm());
    return lm;
}

// || F^n(a) - F^infinity_{,n}(a) ||_2 on the truncated index set, |n| >= N+1.
inline double limit_difference(const Frame& fr, int n, int N, const std::vector<cplx>& a) {
    const LimitMatrix lm = limit_matrix(fr, N, a);
    const Eigen::MatrixXcd Fn = jacobian_formula(fr, n, N, a);
    Layout L(n, N, fr.spectrum().M());
    Eigen::MatrixXcd D(L.size(), L.size());
    for (int m : L.indices())
        for (int j : L.indices())
            D(L.position(m), L.position(j)) =
                Fn(L.position(m), L.position(j)) - lm.F(lm.position(m), lm.position(j));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
    return svd.singularValues()(0);
}

// |F_m| / (|sigma_m| + |m pi - tau_m| + |gamma_m|) over |m| >= N+1; entries
// with a vanishing denominator are reported when F_m itself is not zero.
inline double f_bound_ratio(const AnsatzParams& p, const Frame& fr, const Eigen::VectorXcd& F) {
    const auto& s = fr.spectrum();
    Layout L = p.layout();
    double worst = 0.0;
    for (int m : L.indices()) {
        if (std::abs(m) <= p.N) continue;
        const double den = std::abs(p.sigma.at(m)) + std::abs(m * pi - s.tau(m)) + std::abs(s.gamma(m));
        const double f = std::abs(F(L.position(m)));
        if (den > 0.0)
            worst = std::max(worst, f / den);
        else if (f > 1e-12)
            worst = std::numeric_limits<double>::infinity();
    }
    return worst;
}

enum class NewtonStatus { Converged, Stagnated, SingularJacobian, LeftNeighborhood, MaxIterations };

inline const char* to_string(NewtonStatus s) {
    switch (s) {
        case NewtonStatus::Converged: return "converged";
        case NewtonStatus::Stagnated: return "stagnated";
        case NewtonStatus::SingularJacobian: return "singular_jacobian";
        case NewtonStatus::LeftNeighborhood: return "left_certified_neighborhood";
        case NewtonStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 30;
    int max_halvings = 8;
    double fd_scale = 1e-6;
    double R = std::numeric_limits<double>::infinity();  // bound on ||sigma||
    double r = std::numeric_limits<double>::infinity();  // bound on |a|
    double max_condition = 1e14;
};

struct ContinuationState {
    AnsatzParams params;
    Potential potential;
    double residual = 0.0;
    int iterations = 0;
    int homotopy_steps = 0;
    std::vector<double> step_norms;
    NewtonStatus status = NewtonStatus::Converged;
    double f_bound = 0.0;
    double condition = 0.0;

    bool ok() const { return status == NewtonStatus::Converged; }
};

inline ContinuationState newton_solve(const AnsatzParams& start, const Frame& fr,
                                      const NewtonOptions& opt = {}) {
    ContinuationState st;
    st.params = start;
    st.potential = fr.potential();
    Eigen::VectorXcd F = F_map(st.params, fr);
    st.residual = max_abs(F);
    auto inside = [&](const AnsatzParams& p) { return p.sigma_norm() <= opt.R && p.a_norm() <= opt.r; };
    while (st.residual >= opt.tol) {
        if (st.iterations >= opt.max_iter) {
            st.status = NewtonStatus::MaxIterations;
            break;
        }
        const Eigen::MatrixXcd J = jacobian_fd(st.params, fr, opt.fd_scale);
        st.condition = condition_number(J);
        if (!(st.condition < opt.max_condition)) {
            st.status = NewtonStatus::SingularJacobian;
            break;
        }
        const Eigen::VectorXcd dv = J.partialPivLu().solve(-F);
        const Eigen::VectorXcd v0 = st.params.to_v();
        double lam = 1.0;
        bool accepted = false;
        AnsatzParams trial = st.params;
        Eigen::VectorXcd Ft;
        for (int h = 0; h <= opt.max_halvings; ++h, lam *= 0.5) {
            trial.set_v(v0 + lam * dv);
            Ft = F_map(trial, fr);
            if (max_abs(Ft) < st.residual) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            st.status = NewtonStatus::Stagnated;
            break;
        }
        st.params = trial;
        F = Ft;
        st.residual = max_abs(F);
        st.step_norms.push_back(lam * dv.norm());
        ++st.iterations;
        if (!inside(st.params)) {
            st.status = NewtonStatus::LeftNeighborhood;
            break;
        }
    }
    if (st.residual < opt.tol && st.status != NewtonStatus::LeftNeighborhood)
        st.status = NewtonStatus::Converged;
    st.f_bound = f_bound_ratio(st.params, fr, F);
    return st;
}

// Working box of the base family: R = 2 (|| (tau_j - j pi)_{|j|>N} || + 1)
// and r = 2 times the coefficient-box radius.
inline std::pair<double, double> working_box(const PeriodicSpectrum& base, int N,
                                             const std::vector<ZetaFunction>& zetas) {
    double t = 0.0;
    for (int j = N + 1; j <= base.M(); ++j)
        for (int jj : {-j, j}) t += std::norm(base.tau(jj) - jj * pi);
    const double R = 2.0 * (std::sqrt(t) + 1.0);
    const CoefficientBox box = coefficient_box({}, zetas, base.N0());
    return {R, 2.0 * box.radius};
}

struct HomotopyOptions {
    int steps = 4;
    int max_halvings = 6;
    int N0 = 1;
    int N = 2;
    int M = 16;
    NewtonOptions newton{};
    SpectrumOptions spectrum{};
    FiniteGapOptions finite_gap{};
    bool enforce_box = true;
};

struct HomotopyStep {
    double t = 0.0;
    bool accepted = false;
    int iterations = 0;  // summed over n
    double residual = 0.0;
};

struct HomotopyResult {
    std::map<int, ContinuationState> states;
    std::vector<HomotopyStep> log;
    bool success = false;
    double last_good_t = 0.0;
    int halvings = 0;
    std::string message;
};

// Linear homotopy from base to target; the base must be finite gap. Newton is
// restarted from the last accepted states with half the step whenever any n fails.
inline HomotopyResult continue_homotopy(const Potential& base, const Potential& target,
                                        const std::vector<int>& ns, const HomotopyOptions& opt) {
    HomotopyResult res;
    if (ns.empty()) {
        res.success = true;
        res.last_good_t = 1.0;
        return res;
    }
    Frame f0 = Frame::build(base, opt.N0, opt.M, opt.spectrum, opt.finite_gap);
    std::vector<ZetaFunction> zs;
    for (int n : ns) zs.push_back(zeta(f0.context(), n, opt.N));
    NewtonOptions nopt = opt.newton;
    if (opt.enforce_box) {
        auto [R, r] = working_box(f0.spectrum(), opt.N, zs);
        nopt.R = R;
        nopt.r = r;
    }
    std::map<int, ContinuationState> cur;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        ContinuationState st;
        st.params = AnsatzParams::from_zeta(zs[i]);
        st.potential = base;
        st.residual = max_abs(F_map(st.params, f0));
        cur[ns[i]] = st;
    }
    double t = 0.0;
    double dt = 1.0 / std::max(1, opt.steps);
    const bool same = base == target;
    if (same) {
        res.states = cur;
        res.success = true;
        res.last_good_t = 1.0;
        res.log.push_back({1.0, true, 0, 0.0});
        return res;
    }
    int halvings = 0;
    while (t < 1.0) {
        const double tn = std::min(1.0, t + dt);
        const Potential pt = Potential::interpolate(base, target, tn);
        std::optional<Frame> fr;
        try {
            fr.emplace(Frame::build(pt, opt.N0, opt.M, opt.spectrum, opt.finite_gap));
        } catch (const Error& e) {
            res.message = e.what();
            fr.reset();
        }
        HomotopyStep step;
        step.t = tn;
        std::map<int, ContinuationState> next;
        bool ok = fr.has_value();
        if (ok) {
            for (int n : ns) {
                ContinuationState st = newton_solve(cur.at(n).params, *fr, nopt);
                step.iterations += st.iterations;
                step.residual = std::max(step.residual, st.residual);
                st.homotopy_steps = cur.at(n).homotopy_steps + 1;
                st.iterations += cur.at(n).iterations;
                if (!st.ok()) {
                    ok = false;
                    res.message = std::string("n=") + std::to_string(n) + ": " + to_string(st.status);
                    next[n] = st;
                    break;
                }
                next[n] = st;
            }
        }
        step.accepted = ok;
        res.log.push_back(step);
        if (ok) {
            cur = next;
            t = tn;
            res.last_good_t = t;
        } else {
            if (++halvings > opt.max_halvings) {
                res.states = cur;
                res.halvings = halvings - 1;
                res.success = false;
                return res;
            }
            dt *= 0.5;
        }
    }
    res.states = cur;
    res.halvings = halvings;
    res.success = true;
    res.message.clear();
    return res;
}

struct SlopeResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of the fit
    int used = 0;
    bool inconclusive = false;
};

// Least-squares slope of log|deviation| against log|gap|; pairs with zero
// deviation or gap below `floor` are dropped.
// Fewer than four points or a gap range under `min_decades` is inconclusive.
inline SlopeResult asymptotics_slope(const std::vector<std::pair<double, double>>& gap_dev,
                                     double floor = 1e-12, double min_decades = 0.5) {
    std::vector<double> x, y;
    for (const auto& [g, d] : gap_dev) {
        if (!(g > floor) || !(d > 0.0)) continue;
        x.push_back(std::log(g));
        y.push_back(std::log(d));
    }
    SlopeResult r;
    r.used = static_cast<int>(x.size());
    if (r.used < 4) {
        r.inconclusive = true;
        return r;
    }
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    if ((*xmax - *xmin) / std::log(10.0) < min_decades) r.inconclusive = true;
    Eigen::MatrixXd A(r.used, 2);
    Eigen::VectorXd b(r.used);
    for (int i = 0; i < r.used; ++i) {
        A(i, 0) = x[i];
        A(i, 1) = 1.0;
        b(i) = y[i];
    }
    Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    r.slope = c(0);
    r.intercept = c(1);
    r.residual = std::sqrt((A * c - b).squaredNorm() / r.used);
    return r;
}

}  // namespace zsnorm
