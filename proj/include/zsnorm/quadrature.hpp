#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "core.hpp"

namespace zsnorm {

// Counterclockwise circle.
struct Circle {
    cplx center{0.0};
    double radius = 1.0;

    cplx at(double theta) const { return center + std::polar(radius, theta); }
    cplx tangent(double theta) const { return I * std::polar(radius, theta); }
    bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

// Axis-parallel rectangle, boundary traversed counterclockwise.
struct Rect {
    double x0, x1, y0, y1;

    cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
    bool contains(cplx z, double slack = 0.0) const {
        return z.real() > x0 - slack && z.real() < x1 + slack && z.imag() > y0 - slack &&
               z.imag() < y1 + slack;
    }
    std::array<cplx, 4> corners() const {
        return {cplx{x0, y0}, cplx{x1, y0}, cplx{x1, y1}, cplx{x0, y1}};
    }
};

struct QuadratureOptions {
    double tol = 1e-12;
    int min_nodes = 64;
    int max_nodes = 65536;
};

template <class T>
struct QuadratureResult {
    T value;
    double diff = 0.0;
    int nodes = 0;
};

namespace detail {

inline double qnorm(cplx z) { return std::abs(z); }
inline double qnorm(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline cplx qfirst(cplx z) { return z; }
inline cplx qfirst(const Eigen::VectorXcd& v) { return v.size() ? v(0) : cplx{0.0}; }

template <class F>
using value_of = std::decay_t<decltype(std::declval<F&>()(cplx{}))>;

}  // namespace detail

// Trapezoid rule on a circle with a fixed number of nodes.
template <class F>
detail::value_of<F> trapezoid_fixed(F&& f, const Circle& c, int nodes) {
    const double h = 2.0 * pi / nodes;
    detail::value_of<F> acc = f(c.at(0.0)) * c.tangent(0.0);
    for (int j = 1; j < nodes; ++j) {
        const double t = j * h;
        acc += f(c.at(t)) * c.tangent(t);
    }
    return acc * h;
}

// Adaptive trapezoid rule on a circle: the node count doubles (reusing old
// nodes) until two successive values differ by less than opt.tol.
template <class F>
QuadratureResult<detail::value_of<F>> trapezoid(F&& f, const Circle& c,
                                                const QuadratureOptions& opt = {}) {
    using T = detail::value_of<F>;
    int n = opt.min_nodes;
    double h = 2.0 * pi / n;
    T sum = f(c.at(0.0)) * c.tangent(0.0);
    for (int j = 1; j < n; ++j) sum += f(c.at(j * h)) * c.tangent(j * h);
    T value = sum * h;
    while (true) {
        if (2 * n > opt.max_nodes)
            throw QuadratureError("trapezoid: no convergence at node cap", detail::qfirst(value),
                                  detail::qfirst(value));
        const double h2 = 0.5 * h;
        for (int j = 0; j < n; ++j) {
            const double t = (2 * j + 1) * h2;
            sum += f(c.at(t)) * c.tangent(t);
        }
        n *= 2;
        h = h2;
        T next = sum * h;
        const double d = detail::qnorm(T(next - value));
        if (d < opt.tol) return {next, d, n};
        if (2 * n > opt.max_nodes)
            throw QuadratureError("trapezoid: no convergence at node cap",
                                  detail::qfirst(next), detail::qfirst(value));
        value = next;
    }
}

// Composite Gauss-Legendre on the boundary of a rectangle, `panels` panels per edge.
template <class F>
detail::value_of<F> gauss_rect_fixed(F&& f, const Rect& r, int panels) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    const auto corners = r.corners();
    bool first = true;
    detail::value_of<F> acc{};
    for (int e = 0; e < 4; ++e) {
        const cplx a = corners[e], b = corners[(e + 1) % 4];
        const cplx step = (b - a) / double(panels);
        for (int p = 0; p < panels; ++p) {
            const cplx mid = a + (p + 0.5) * step;
            const cplx half = 0.5 * step;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                for (int sgn : {1, -1}) {
                    if (xs[i] == 0.0 && sgn < 0) continue;
                    const cplx z = mid + double(sgn) * xs[i] * half;
                    detail::value_of<F> term = f(z) * (ws[i] * half);
                    if (first) {
                        acc = term;
                        first = false;
                    } else {
                        acc += term;
                    }
                }
            }
        }
    }
    return acc;
}

template <class F>
QuadratureResult<detail::value_of<F>> gauss_rect(F&& f, const Rect& r,
                                                 const QuadratureOptions& opt = {},
                                                 int start_panels = 2, int max_panels = 512) {
    using T = detail::value_of<F>;
    int panels = start_panels;
    T value = gauss_rect_fixed(f, r, panels);
    while (2 * panels <= max_panels) {
        panels *= 2;
        T next = gauss_rect_fixed(f, r, panels);
        const double d = detail::qnorm(T(next - value));
        if (d < opt.tol) return {next, d, panels};
        value = next;
    }
    throw QuadratureError("gauss_rect: no convergence at panel cap", detail::qfirst(value),
                          detail::qfirst(value));
}

}  // namespace zsnorm
