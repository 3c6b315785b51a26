#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "monodromy.hpp"
#include "quadrature.hpp"

namespace zsnorm {

struct SpectrumOptions {
    double tol_ode = 1e-12;
    double quad_tol = 1e-12;  // on normalized moments
    double mult_tol = 1e-7;   // relative clustering radius for doubles
    double order_tol = 1e-9;  // real parts this close count as equal in the order
    int max_nodes = 4096;
};

struct EigenPair {
    cplx minus{0.0};
    cplx plus{0.0};

    cplx tau() const { return 0.5 * (minus + plus); }
    cplx gamma() const { return plus - minus; }
    bool is_double() const { return minus == plus; }
};

class PeriodicSpectrum {
public:
    PeriodicSpectrum() = default;
    PeriodicSpectrum(int N0, int M, double mult_tol) : N0_(N0), M_(M), mult_tol_(mult_tol) {
        if (N0 < 0 || M < N0) throw Error("PeriodicSpectrum: need 0 <= N0 <= M");
        pairs_.resize(2 * M + 1);
    }

    // Spectrum given directly by its pairs, e.g. for synthetic branch points.
    static PeriodicSpectrum from_pairs(int N0, int M, const std::map<int, EigenPair>& pairs,
                                       double mult_tol = 1e-7) {
        PeriodicSpectrum s(N0, M, mult_tol);
        for (int k = -M; k <= M; ++k) {
            auto it = pairs.find(k);
            if (it == pairs.end()) throw Error("from_pairs: missing index");
            s.set_pair(k, it->second);
        }
        return s;
    }

    // The free spectrum: lambda_k^+- = k pi.
    static PeriodicSpectrum free(int N0, int M) {
        std::map<int, EigenPair> p;
        for (int k = -M; k <= M; ++k) p[k] = {k * pi, k * pi};
        return from_pairs(N0, M, p);
    }

    int N0() const noexcept { return N0_; }
    int M() const noexcept { return M_; }
    double mult_tol() const noexcept { return mult_tol_; }

    const EigenPair& pair(int k) const { return pairs_.at(check(k)); }
    void set_pair(int k, EigenPair p) { pairs_.at(check(k)) = p; }
    cplx tau(int k) const { return pair(k).tau(); }
    cplx gamma(int k) const { return pair(k).gamma(); }

    // sqrt of sum over N0+1 <= |k| <= M of |lambda_k^+- - k pi|^2.
    double l2_tail() const {
        double s = 0.0;
        for (int k = -M_; k <= M_; ++k) {
            if (std::abs(k) <= N0_) continue;
            s += std::norm(pair(k).minus - k * pi) + std::norm(pair(k).plus - k * pi);
        }
        return std::sqrt(s);
    }

    // Same data restricted to |k| <= M.
    PeriodicSpectrum truncated(int M) const {
        if (M > M_ || M < N0_) throw Error("truncated: need N0 <= M <= current M");
        PeriodicSpectrum s(N0_, M, mult_tol_);
        for (int k = -M; k <= M; ++k) s.set_pair(k, pair(k));
        return s;
    }

private:
    int check(int k) const {
        if (std::abs(k) > M_) throw Error("PeriodicSpectrum: index outside window");
        return k + M_;
    }

    int N0_ = 0, M_ = 0;
    double mult_tol_ = 1e-7;
    std::vector<EigenPair> pairs_;
};

// A zero of Delta^2 - 4 with its multiplicity (1 or 2).
struct SpectralZero {
    cplx value{0.0};
    int mult = 1;
};

namespace detail {

// Integrand vector [(z-c)/rho]^p * g'/g / (2 pi i), p = 0..order, g = Delta^2 - 4.
template <class Disc>
auto moment_integrand(const Disc& disc, cplx c, double rho, int order) {
    return [&disc, c, rho, order](cplx z) {
        auto [d, dd] = disc(z);
        const cplx g = d * d - 4.0;
        const double gscale = std::max(1.0, std::norm(d));
        if (std::abs(g) < 1e-13 * gscale)
            throw ContourError("count_zeros: Delta^2 - 4 vanishes on the contour");
        const cplx w = 2.0 * d * dd / g / (2.0 * pi * I);
        Eigen::VectorXcd v(order + 1);
        const cplx u = (z - c) / rho;
        cplx up{1.0};
        for (int p = 0; p <= order; ++p) {
            v(p) = w * up;
            up *= u;
        }
        return v;
    };
}

// Roots of a monic polynomial from power sums p_1..p_m (Newton identities).
inline std::vector<cplx> roots_from_power_sums(const std::vector<cplx>& p) {
    const int m = static_cast<int>(p.size());
    if (m == 0) return {};
    if (m == 1) return {p[0]};
    if (m == 2) {
        const cplx s = std::sqrt(2.0 * p[1] - p[0] * p[0]);
        return {0.5 * (p[0] - s), 0.5 * (p[0] + s)};
    }
    std::vector<cplx> e(m + 1);
    e[0] = 1.0;
    for (int k = 1; k <= m; ++k) {
        cplx acc{0.0};
        for (int i = 1; i <= k; ++i) acc += ((i % 2) ? 1.0 : -1.0) * e[k - i] * p[i - 1];
        e[k] = acc / double(k);
    }
    // z^m - e1 z^{m-1} + e2 z^{m-2} - ...
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 1; i < m; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) {
        const cplx coef = ((m - i) % 2 ? -1.0 : 1.0) * e[m - i];  // coefficient of z^i
        C(i, m - 1) = -coef;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> r(m);
    for (int i = 0; i < m; ++i) r[i] = es.eigenvalues()(i);
    return r;
}

// Clusters of more than two zeros within mult_tol^(2/m) * scale.
inline void check_high_multiplicity(const std::vector<cplx>& z, double mult_tol) {
    const int m = static_cast<int>(z.size());
    if (m < 3) return;
    for (int i = 0; i < m; ++i) {
        const double scale = std::max(1.0, std::abs(z[i]));
        for (int size = m; size >= 3; --size) {
            const double rad = std::pow(mult_tol, 2.0 / size) * scale;
            int close = 0;
            for (int j = 0; j < m; ++j)
                if (std::abs(z[j] - z[i]) < rad) ++close;
            if (close >= size)
                throw MultiplicityError(
                    "periodic eigenvalue of multiplicity > 2: potential outside L2_bullet");
        }
    }
}

template <class Disc>
cplx newton_polish(const Disc& disc, cplx z, int iters = 30) {
    for (int it = 0; it < iters; ++it) {
        auto [d, dd] = disc(z);
        const cplx g = d * d - 4.0;
        const cplx dg = 2.0 * d * dd;
        if (dg == 0.0) break;
        const cplx step = g / dg;
        z -= step;
        if (std::abs(step) < 4e-16 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

// Half-gap of a near-double pair from pointwise data at the centroid m:
// Delta -+ 2 ~ C((lambda - m)^2 - h^2) with C = Delta''(m)/2.
template <class Disc>
cplx pointwise_half_gap(const Disc& disc, cplx m, double delta) {
    auto [d, dd] = disc(m);
    const double s = d.real() >= 0.0 ? 2.0 : -2.0;
    const cplx dp = disc(m + delta).second;
    const cplx dm = disc(m - delta).second;
    const cplx C = (dp - dm) / (4.0 * delta);
    if (C == 0.0) return 0.0;
    return std::sqrt(-(d - s) / C);
}

// Turns the (at most two) roots obtained from moments into clustered,
// polished spectral zeros.
template <class Disc>
std::vector<SpectralZero> classify_pair(const Disc& disc, const std::vector<cplx>& roots,
                                        double mult_tol, double region_size) {
    if (roots.size() == 1) {
        cplx z = newton_polish(disc, roots[0]);
        if (std::abs(z - roots[0]) > 0.25 * region_size) z = roots[0];
        return {{z, 1}};
    }
    cplx a = roots[0], b = roots[1];
    const cplx mid = 0.5 * (a + b);
    const double scale = std::max(1.0, std::abs(mid));
    if (std::abs(a - b) < 1e-3 * scale) {
        // moments fix the split only to sqrt(eps); redo it from point values
        cplx h = pointwise_half_gap(disc, mid, std::max(1e-3, 4.0 * std::abs(a - b)));
        if (std::abs(2.0 * h) < mult_tol * scale) return {{mid, 2}};
        if (std::abs(h - 0.5 * (b - a)) > std::abs(h + 0.5 * (b - a))) h = -h;
        a = mid - h;
        b = mid + h;
    }
    cplx pa = newton_polish(disc, a), pb = newton_polish(disc, b);
    const double sep = std::abs(a - b);
    if (std::abs(pa - a) > 0.25 * sep || std::abs(pb - b) > 0.25 * sep) {
        pa = a;
        pb = b;
    }
    return {{pa, 1}, {pb, 1}};
}

inline int rounded_count(cplx s0, double dev_tol = 0.1) {
    const double r = std::round(s0.real());
    if (std::abs(s0 - r) > dev_tol) return -1;
    return static_cast<int>(r);
}

}  // namespace detail

// Number of zeros of Delta^2 - 4 inside a circle.
template <class Disc>
int count_zeros(const Disc& disc, const Circle& c, double quad_tol = 1e-10) {
    QuadratureOptions opt;
    opt.tol = quad_tol;
    auto res = trapezoid(detail::moment_integrand(disc, c.center, c.radius, 0), c, opt);
    const int n = detail::rounded_count(res.value(0));
    if (n < 0)
        throw ContourError("count_zeros: non-integer winding number, contour misplaced");
    return n;
}

inline int count_zeros(const Potential& p, const Circle& c, double quad_tol = 1e-10,
                       double tol_ode = 1e-12) {
    return count_zeros(Discriminant(p, tol_ode), c, quad_tol);
}

// Pairs 4N0+2 central eigenvalues (doubles listed twice) into 2N0+1 pairs
// ordered by their lambda^- values.
inline std::vector<EigenPair> order_central(const std::vector<cplx>& eigs, int N0,
                                            double tol = 0.0) {
    if (static_cast<int>(eigs.size()) != 4 * N0 + 2)
        throw StructuralError("order_central: expected 4 N0 + 2 eigenvalues");
    struct Value {
        cplx z;
        int mult;
        bool used = false;
    };
    std::vector<cplx> sorted = eigs;
    std::sort(sorted.begin(), sorted.end(), [tol](cplx a, cplx b) { return lex_less(a, b, tol); });
    std::vector<Value> vals;
    for (const auto& z : sorted) {
        if (!vals.empty() && lex_equal(vals.back().z, z, tol) &&
            std::abs(vals.back().z - z) <= tol * std::max(1.0, std::abs(z))) {
            if (++vals.back().mult > 2)
                throw StructuralError("order_central: multiplicity above two");
        } else {
            vals.push_back({z, 1});
        }
    }
    std::vector<EigenPair> out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i].used) continue;
        vals[i].used = true;
        if (vals[i].mult == 2) {
            out.push_back({vals[i].z, vals[i].z});
            continue;
        }
        std::size_t j = i + 1;
        while (j < vals.size() && (vals[j].used || vals[j].mult != 1)) ++j;
        if (j == vals.size())
            throw StructuralError("order_central: no simple eigenvalue left to pair with");
        vals[j].used = true;
        out.push_back({vals[i].z, vals[j].z});
    }
    if (static_cast<int>(out.size()) != 2 * N0 + 1)
        throw StructuralError("order_central: pairing produced the wrong number of pairs");
    return out;
}

namespace detail {

template <class Disc>
class CentralSearch {
public:
    CentralSearch(const Disc& disc, const SpectrumOptions& opt, double scale)
        : disc_(disc), opt_(opt), scale_(scale) {}

    // Normalized moments of order <= 2 over the rectangle boundary.
    Eigen::VectorXcd moments(const Rect& r, int order) const {
        const double rho = 0.5 * r.diameter();
        QuadratureOptions q;
        q.tol = opt_.quad_tol;
        return gauss_rect(moment_integrand(disc_, r.center(), rho, order), r, q, 2, 1024).value;
    }

    void run(const Rect& r, const Eigen::VectorXcd& mom, int count, int depth = 0) {
        if (count == 0) return;
        const double rho = 0.5 * r.diameter();
        if (count <= 2) {
            std::vector<cplx> p;
            for (int i = 1; i <= count; ++i) p.push_back(mom(i));
            auto roots = roots_from_power_sums(p);
            for (auto& z : roots) z = r.center() + rho * z;
            for (const auto& z : classify_pair(disc_, roots, opt_.mult_tol, rho))
                zeros.push_back(z);
            return;
        }
        const double small = 100.0 * std::pow(opt_.mult_tol, 2.0 / 3.0) * scale_;
        if (r.diameter() < small || depth > 60) {
            Eigen::VectorXcd m = moments(r, count);
            std::vector<cplx> p;
            for (int i = 1; i <= count; ++i) p.push_back(m(i));
            auto roots = roots_from_power_sums(p);
            for (auto& z : roots) z = r.center() + rho * z;
            check_high_multiplicity(roots, opt_.mult_tol);
            throw CountingError("central region: unresolved zero cluster", 0);
        }
        static constexpr double shifts[] = {0.0173, -0.0291, 0.0419, -0.0557, 0.0683, -0.0811};
        for (double sh : shifts) {
            const double xm = r.x0 + (0.5 + sh) * (r.x1 - r.x0);
            const double ym = r.y0 + (0.5 - 0.7 * sh) * (r.y1 - r.y0);
            const Rect kids[4] = {{r.x0, xm, r.y0, ym}, {xm, r.x1, r.y0, ym},
                                  {xm, r.x1, ym, r.y1}, {r.x0, xm, ym, r.y1}};
            Eigen::VectorXcd km[4];
            int kc[4];
            bool ok = true;
            int total = 0;
            try {
                for (int i = 0; i < 4 && ok; ++i) {
                    km[i] = moments(kids[i], 2);
                    kc[i] = rounded_count(km[i](0));
                    if (kc[i] < 0) ok = false;
                    total += kc[i];
                }
            } catch (const QuadratureError&) {
                ok = false;
            } catch (const ContourError&) {
                ok = false;
            }
            if (!ok || total != count) continue;
            for (int i = 0; i < 4; ++i) run(kids[i], km[i], kc[i], depth + 1);
            return;
        }
        // kids never split the count: a tight cluster sitting on every cut is the usual cause
        try {
            Eigen::VectorXcd m = moments(r, count);
            std::vector<cplx> p;
            for (int i = 1; i <= count; ++i) p.push_back(m(i));
            auto roots = roots_from_power_sums(p);
            for (auto& z : roots) z = r.center() + rho * z;
            check_high_multiplicity(roots, opt_.mult_tol);
        } catch (const QuadratureError&) {
        }
        throw CountingError("central region: subdivision failed to isolate zeros", 0);
    }

    std::vector<SpectralZero> zeros;

private:
    const Disc& disc_;
    const SpectrumOptions& opt_;
    double scale_;
};

// Merge simple zeros that are within the clustering radius of each other.
inline std::vector<SpectralZero> merge_clusters(std::vector<SpectralZero> z, double mult_tol) {
    std::vector<cplx> all;
    for (const auto& s : z)
        for (int i = 0; i < s.mult; ++i) all.push_back(s.value);
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            const double scale = std::max(1.0, std::abs(z[i].value));
            const double d = std::abs(z[i].value - z[j].value);
            if (z[i].mult == 1 && z[j].mult == 1 && d < mult_tol * scale) {
                z[i] = {0.5 * (z[i].value + z[j].value), 2};
                z.erase(z.begin() + static_cast<long>(j));
                return merge_clusters(std::move(z), mult_tol);
            }
        }
    }
    // Any group of three within the multiplicity-three radius is rejected.
    for (std::size_t i = 0; i < all.size(); ++i) {
        int close = 0;
        const double rad = std::pow(mult_tol, 2.0 / 3.0) * std::max(1.0, std::abs(all[i]));
        for (const auto& w : all)
            if (std::abs(w - all[i]) < rad) ++close;
        if (close >= 3)
            throw MultiplicityError(
                "periodic eigenvalue of multiplicity > 2: potential outside L2_bullet");
    }
    return z;
}

}  // namespace detail

// Zeros of Delta^2 - 4 in the disk |lambda - k pi| < pi/4.
template <class Disc>
std::vector<SpectralZero> lateral_zeros(const Disc& disc, int k, const SpectrumOptions& opt) {
    const Circle c{k * pi, pi / 4};
    QuadratureOptions q;
    q.tol = opt.quad_tol;
    q.max_nodes = opt.max_nodes;
    auto mom = trapezoid(detail::moment_integrand(disc, c.center, c.radius, 2), c, q).value;
    const int count = detail::rounded_count(mom(0));
    if (count != 2) {
        if (count >= 3) {
            auto hm = trapezoid(detail::moment_integrand(disc, c.center, c.radius, count), c, q);
            std::vector<cplx> p;
            for (int i = 1; i <= count; ++i) p.push_back(hm.value(i));
            auto roots = detail::roots_from_power_sums(p);
            for (auto& z : roots) z = c.center + c.radius * z;
            detail::check_high_multiplicity(roots, opt.mult_tol);
        }
        throw CountingError("counting-lemma violated in disk " + std::to_string(k) +
                                ", increase N0",
                            k);
    }
    std::vector<cplx> roots = detail::roots_from_power_sums({mom(1), mom(2)});
    for (auto& z : roots) z = c.center + c.radius * z;
    auto zs = detail::classify_pair(disc, roots, opt.mult_tol, c.radius);
    for (const auto& z : zs)
        if (std::abs(z.value - c.center) >= c.radius)
            throw CountingError("zero escaped disk " + std::to_string(k), k);
    return zs;
}

// All 4N0+2 zeros of Delta^2 - 4 in the central disk |lambda| < (N0 + 1/4) pi.
template <class Disc>
std::vector<SpectralZero> central_zeros(const Disc& disc, int N0, const SpectrumOptions& opt) {
    const double R = (N0 + 0.25) * pi;
    const int expected = 4 * N0 + 2;
    QuadratureOptions q;
    q.tol = opt.quad_tol;
    q.max_nodes = opt.max_nodes;
    const Circle circ{0.0, R};
    auto cm = trapezoid(detail::moment_integrand(disc, 0.0, R, 0), circ, q).value;
    const int ccount = detail::rounded_count(cm(0));
    if (ccount != expected)
        throw CountingError("counting-lemma violated in the central disk (found " +
                                std::to_string(ccount) + "), increase N0",
                            0);
    detail::CentralSearch<Disc> search(disc, opt, R);
    const Rect box{-R, R, -R, R};
    Eigen::VectorXcd mom = search.moments(box, 2);
    const int count = detail::rounded_count(mom(0));
    if (count != expected)
        throw CountingError("central square holds zeros outside the central disk", 0);
    search.run(box, mom, count);
    auto zs = detail::merge_clusters(search.zeros, opt.mult_tol);
    int total = 0;
    for (const auto& z : zs) {
        total += z.mult;
        if (std::abs(z.value) >= R) throw CountingError("central zero outside the disk", 0);
    }
    if (total != expected) throw CountingError("central zero count mismatch", 0);
    return zs;
}

template <class Disc>
PeriodicSpectrum locate_spectrum_with(const Disc& disc, int N0, int M,
                                      const SpectrumOptions& opt = {}) {
    if (N0 < 1 || M < N0) throw Error("locate_spectrum: need 1 <= N0 <= M");
    PeriodicSpectrum s(N0, M, opt.mult_tol);
    std::vector<cplx> central;
    for (const auto& z : central_zeros(disc, N0, opt))
        for (int i = 0; i < z.mult; ++i) central.push_back(z.value);
    auto pairs = order_central(central, N0, opt.order_tol);
    for (int k = -N0; k <= N0; ++k) s.set_pair(k, pairs[k + N0]);
    for (int k = N0 + 1; k <= M; ++k) {
        for (int sgn : {-1, 1}) {
            auto zs = lateral_zeros(disc, sgn * k, opt);
            EigenPair p;
            if (zs.size() == 1) {
                p = {zs[0].value, zs[0].value};
            } else {
                p = {zs[0].value, zs[1].value};
                if (lex_less(p.plus, p.minus, opt.order_tol)) std::swap(p.minus, p.plus);
            }
            s.set_pair(sgn * k, p);
        }
    }
    return s;
}

inline PeriodicSpectrum locate_spectrum(const Potential& p, int N0, int M,
                                        const SpectrumOptions& opt = {}) {
    return locate_spectrum_with(Discriminant(p, opt.tol_ode), N0, M, opt);
}

}  // namespace zsnorm
