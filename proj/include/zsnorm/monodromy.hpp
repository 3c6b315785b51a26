#pragma once

#include <array>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "core.hpp"
#include "potential.hpp"

namespace zsnorm {

// 2x2 complex matrix stored row-major.
using Mat2 = std::array<cplx, 4>;

struct MonodromyResult {
    Mat2 matrix{};   // M(1, lambda)
    Mat2 dmatrix{};  // d/dlambda M(1, lambda)
    int steps = 0;

    cplx det() const { return matrix[0] * matrix[3] - matrix[1] * matrix[2]; }
    cplx trace() const { return matrix[0] + matrix[3]; }
    cplx dtrace() const { return dmatrix[0] + dmatrix[3]; }
};

namespace detail {

struct ModeTable {
    std::vector<double> freq;
    std::vector<cplx> c1, c2;

    explicit ModeTable(const Potential& p) {
        for (const auto& [j, m] : p.modes()) {
            freq.push_back(2.0 * pi * j);
            c1.push_back(m.c1);
            c2.push_back(m.c2);
        }
    }

    std::pair<cplx, cplx> at(double x) const {
        cplx p1{0.0}, p2{0.0};
        for (std::size_t i = 0; i < freq.size(); ++i) {
            cplx e = freq[i] == 0.0 ? cplx{1.0} : std::polar(1.0, freq[i] * x);
            p1 += c1[i] * e;
            p2 += c2[i] * e;
        }
        return {p1, p2};
    }
};

using OdeState = std::array<cplx, 8>;

}  // namespace detail

// Integrates F' = A F, A = [[-i lambda, i phi1], [-i phi2, i lambda]], jointly
// with the lambda-variational system, over [0, 1] from the identity.
inline MonodromyResult monodromy(const Potential& potential, cplx lambda, double tol = 1e-12,
                                 int max_steps = 200000) {
    if (!(tol > 0.0)) throw Error("monodromy: tol must be positive");
    namespace ode = boost::numeric::odeint;
    using detail::OdeState;

    detail::ModeTable table(potential);
    const cplx mil = -I * lambda;
    auto rhs = [&](const OdeState& y, OdeState& dy, double x) {
        auto [p1, p2] = table.at(x);
        const cplx a00 = mil, a01 = I * p1, a10 = -I * p2, a11 = -mil;
        // M' = A M
        dy[0] = a00 * y[0] + a01 * y[2];
        dy[1] = a00 * y[1] + a01 * y[3];
        dy[2] = a10 * y[0] + a11 * y[2];
        dy[3] = a10 * y[1] + a11 * y[3];
        // (dM)' = A dM + diag(-i, i) M
        dy[4] = a00 * y[4] + a01 * y[6] - I * y[0];
        dy[5] = a00 * y[5] + a01 * y[7] - I * y[1];
        dy[6] = a10 * y[4] + a11 * y[6] + I * y[2];
        dy[7] = a10 * y[5] + a11 * y[7] + I * y[3];
    };

    OdeState y{1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    const double itol = 0.01 * tol;
    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<OdeState>>(itol, itol);

    double x = 0.0;
    double dx = 1.0 / (8.0 + 2.0 * std::abs(lambda) + potential.sup_bound());
    int steps = 0;
    while (1.0 - x > 1e-15) {
        if (x + dx > 1.0) dx = 1.0 - x;
        if (steps++ > max_steps)
            throw IntegrationError("monodromy: step budget exhausted", std::abs(1.0 - x));
        int tries = 0;
        while (stepper.try_step(rhs, y, x, dx) == ode::fail) {
            if (++tries > 500 || dx < 1e-14)
                throw IntegrationError("monodromy: step size underflow", std::abs(1.0 - x));
        }
    }

    MonodromyResult r;
    std::copy(y.begin(), y.begin() + 4, r.matrix.begin());
    std::copy(y.begin() + 4, y.end(), r.dmatrix.begin());
    r.steps = steps;

    double scale = 1.0;
    for (const auto& v : r.matrix) scale = std::max(scale, std::norm(v));
    const double defect = std::abs(r.det() - 1.0);
    if (defect > tol * scale)
        throw IntegrationError("monodromy: Wronskian defect above tolerance", defect);
    return r;
}

// Returns (Delta, dDelta/dlambda).
inline std::pair<cplx, cplx> discriminant(const Potential& potential, cplx lambda,
                                          double tol = 1e-12) {
    auto r = monodromy(potential, lambda, tol);
    return {r.trace(), r.dtrace()};
}

// Callable discriminant bound to a potential.
class Discriminant {
public:
    explicit Discriminant(Potential p, double tol = 1e-12) : p_(std::move(p)), tol_(tol) {}
    std::pair<cplx, cplx> operator()(cplx lambda) const { return discriminant(p_, lambda, tol_); }
    const Potential& potential() const noexcept { return p_; }
    double tol() const noexcept { return tol_; }

private:
    Potential p_;
    double tol_;
};

// exp of [[-i lambda, i c1], [-i c2, i lambda]]; closed form for constant potentials.
inline Mat2 constant_monodromy(cplx lambda, cplx c1, cplx c2) {
    const cplx a00 = -I * lambda, a01 = I * c1, a10 = -I * c2, a11 = I * lambda;
    const cplx mu = std::sqrt(lambda * lambda - c1 * c2);
    const cplx s = std::abs(mu) < 1e-8 ? 1.0 - mu * mu / 6.0 : std::sin(mu) / mu;
    const cplx c = std::cos(mu);
    return {c + s * a00, s * a01, s * a10, c + s * a11};
}

}  // namespace zsnorm
