#pragma once

#include <cmath>

#include "core.hpp"

namespace zsnorm {

// Branch of sqrt((lambda-a)(lambda-b)) cut along the segment [a,b] and
// asymptotic to -lambda at infinity.
struct StandardRoot {
    cplx a{0.0};
    cplx b{0.0};

    cplx mid() const { return 0.5 * (a + b); }
    cplx half() const { return 0.5 * (b - a); }

    // -(lambda - tau) * principal sqrt(1 - h^2/(lambda - tau)^2): the principal
    // cut of the outer sqrt is exactly the preimage of [a,b].
    cplx operator()(cplx lambda) const {
        const cplx u = lambda - mid();
        const cplx h = half();
        if (h == 0.0) return -u;
        const cplx t = u / h;
        if (std::abs(t.imag()) <= 1e-14 * (1.0 + std::abs(t)) && std::abs(t.real()) <= 1.0)
            throw BranchError("standard root evaluated on its cut");
        const cplx q = h / u;
        return -u * std::sqrt(1.0 - q * q);
    }

    // Distance from lambda to the cut segment.
    double distance_to_cut(cplx lambda) const {
        const cplx d = b - a;
        if (d == 0.0) return std::abs(lambda - a);
        double s = std::real((lambda - a) * std::conj(d)) / std::norm(d);
        s = std::clamp(s, 0.0, 1.0);
        return std::abs(lambda - (a + s * d));
    }
};

inline cplx standard_root(cplx a, cplx b, cplx lambda) { return StandardRoot{a, b}(lambda); }

namespace detail {

inline cplx sinc(cplx x) {
    if (std::abs(x) < 1e-4) {
        const cplx x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

}  // namespace detail

// prod_{k > M} (1 - w/(k pi)^2), evaluated as sinc(sqrt w) divided by the
// first M factors; removable singularities at w = (j pi)^2, j <= M, are
// cancelled analytically.
inline cplx sine_tail(cplx w, int M) {
    const cplx s = std::sqrt(w);  // Re s >= 0
    int special = 0;
    if (M >= 1) {
        const int j = static_cast<int>(std::lround(s.real() / pi));
        if (j >= 1 && j <= M && std::abs(s - j * pi) < 0.5) special = j;
    }
    cplx denom{1.0};
    for (int k = 1; k <= M; ++k) {
        if (k == special) continue;
        const double kp = k * pi;
        denom *= 1.0 - w / (kp * kp);
    }
    if (special == 0) return detail::sinc(s) / denom;
    const int j = special;
    const double jp = j * pi;
    // sin s / (j pi - s) = -(-1)^j sinc(s - j pi)
    const cplx ratio = (j % 2 == 0 ? -1.0 : 1.0) * detail::sinc(s - jp);
    return ratio * (jp * jp) / (s * (jp + s)) / denom;
}

// Closure of prod_{|k|>M} (t_k - lambda)/pi_k with the model spectrum
// t_k = sign(k) sqrt((k pi)^2 + b); b = 0 is the free spectrum.
struct TailClosure {
    int M = 0;
    cplx b{0.0};

    cplx operator()(cplx lambda) const { return sine_tail(lambda * lambda - b, M); }

    // Model midpoint for index k.
    cplx model_root(int k) const {
        if (k == 0) return 0.0;
        const cplx r = std::sqrt(cplx(k * pi * k * pi) + b);
        return k > 0 ? r : -r;
    }
};

// prod_{|k| <= M} (k pi - lambda)/pi_k * sine_tail(lambda^2, M) = -sin(lambda).
inline cplx free_partial_product(cplx lambda, int M) {
    cplx p = -lambda;
    for (int k = 1; k <= M; ++k) {
        const double kp = k * pi;
        p *= 1.0 - lambda * lambda / (kp * kp);
    }
    return p;
}

}  // namespace zsnorm
