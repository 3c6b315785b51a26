#pragma once

#include <functional>
#include <map>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"
#include "roots.hpp"

namespace zsnorm {

// ||a||_1 exp(||a||_1), an upper bound for |prod(1 + a_j) - 1|.
inline double l1_product_bound(const std::vector<cplx>& a) {
    double n1 = 0.0;
    for (const auto& x : a) n1 += std::abs(x);
    return n1 * std::exp(n1);
}

inline cplx product_minus_one(const std::vector<cplx>& a) {
    cplx p{1.0};
    for (const auto& x : a) p *= 1.0 + x;
    return p - 1.0;
}

// Bound on |prod_{j != m}(1 + sigma_j/(j - m)) - 1| for an l^2 sequence
// given by its nonzero entries.
inline double r_m_bound(const std::map<int, cplx>& sigma, int m) {
    double n2 = 0.0, t2 = 0.0;
    for (const auto& [j, s] : sigma) {
        n2 += std::norm(s);
        if (2 * std::abs(j) >= std::abs(m)) t2 += std::norm(s);
    }
    const double norm = std::sqrt(n2);
    if (std::abs(m) < 2) return 2.0 * norm * std::exp(2.0 * norm);
    return 2.0 * (norm / std::sqrt(std::abs(m) - 1.0) + std::sqrt(t2)) * std::exp(2.0 * norm);
}

inline cplx r_m_value(const std::map<int, cplx>& sigma, int m) {
    cplx p{1.0};
    for (const auto& [j, s] : sigma)
        if (j != m) p *= 1.0 + s / double(j - m);
    return p - 1.0;
}

struct SingularIntegralResult {
    cplx value{0.0};
    double bound = 0.0;
    bool holds = true;
};

// Integral of f/sqrt((lambda-a)(lambda-b)) over a circle around [a,b],
// together with 2 pi max_{[a,b]} |f| sampled at 257 Chebyshev points.
inline SingularIntegralResult singular_integral_bound(const std::function<cplx(cplx)>& f, cplx a,
                                                      cplx b, const Circle& contour,
                                                      double tol = 1e-10) {
    StandardRoot root{a, b};
    const double margin = contour.radius - std::max(std::abs(a - contour.center),
                                                    std::abs(b - contour.center));
    if (margin <= 0.0) throw ContourError("singular_integral_bound: contour meets the segment");
    auto g = [&](cplx z) { return f(z) / root(z); };
    QuadratureOptions opt;
    opt.tol = tol;
    SingularIntegralResult r;
    r.value = trapezoid(g, contour, opt).value;
    double mx = 0.0;
    const int n = 257;
    for (int i = 0; i < n; ++i) {
        const double x = 0.5 * (1.0 - std::cos(pi * i / (n - 1)));
        mx = std::max(mx, std::abs(f(a + x * (b - a))));
    }
    r.bound = 2.0 * pi * mx;
    r.holds = std::abs(r.value) <= r.bound + tol;
    return r;
}

}  // namespace zsnorm
