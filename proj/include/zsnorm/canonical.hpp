#pragma once

#include "core.hpp"
#include "roots.hpp"
#include "spectrum.hpp"

namespace zsnorm {

enum class ClosureKind {
    Free,    // t_k = k pi beyond the window
    Fitted,  // t_k = sign(k) sqrt((k pi)^2 + b), b from the outermost pairs
};

// First-order tail coefficient 2 j pi (tau_j - j pi), averaged over j = +-J.
inline cplx tail_coefficient(const PeriodicSpectrum& s, int J) {
    if (J <= 0) return 0.0;
    const cplx bp = 2.0 * J * pi * (s.tau(J) - J * pi);
    const cplx bm = 2.0 * J * pi * (-J * pi - s.tau(-J));
    return 0.5 * (bp + bm);
}

inline TailClosure make_closure(const PeriodicSpectrum& s, ClosureKind kind) {
    TailClosure c;
    c.M = s.M();
    c.b = kind == ClosureKind::Fitted ? tail_coefficient(s, s.M()) : cplx{0.0};
    return c;
}

// 2i prod_{|k|<=M} sqrt_s((lambda - lambda_k^-)(lambda - lambda_k^+))/pi_k * tail(lambda).
class CanonicalRoot {
public:
    CanonicalRoot() = default;
    explicit CanonicalRoot(const PeriodicSpectrum& s, ClosureKind kind = ClosureKind::Fitted)
        : spectrum_(s), closure_(make_closure(s, kind)), kind_(kind) {
        roots_.reserve(2 * s.M() + 1);
        for (int k = -s.M(); k <= s.M(); ++k) roots_.push_back({s.pair(k).minus, s.pair(k).plus});
    }

    cplx operator()(cplx lambda) const {
        const int M = spectrum_.M();
        cplx p = 2.0 * I;
        for (int k = -M; k <= M; ++k) p *= roots_[k + M](lambda) / pi_k(k);
        return p * closure_(lambda);
    }

    // Finite part only: prod_{|k|<=M} sqrt_s(...)/pi_k.
    cplx window_product(cplx lambda) const {
        const int M = spectrum_.M();
        cplx p = 1.0;
        for (int k = -M; k <= M; ++k) p *= roots_[k + M](lambda) / pi_k(k);
        return p;
    }

    const PeriodicSpectrum& spectrum() const noexcept { return spectrum_; }
    const TailClosure& closure() const noexcept { return closure_; }
    ClosureKind kind() const noexcept { return kind_; }
    const StandardRoot& root(int k) const { return roots_.at(k + spectrum_.M()); }

    // Estimate of the relative error committed by the closure at lambda:
    // l1_product_bound of dev/|(k pi)^2 + b - lambda^2| over k > M, where dev
    // is the drift of the fitted tail coefficient plus the outermost gap size.
    double tail_error_estimate(cplx lambda) const {
        const int M = spectrum_.M();
        const cplx bM = tail_coefficient(spectrum_, M);
        const cplx bH = tail_coefficient(spectrum_, std::max(1, M / 2));
        double dev = std::abs(bM - bH);
        if (kind_ == ClosureKind::Free) dev += std::abs(bM);
        dev += 0.5 * std::max(std::norm(spectrum_.gamma(M)), std::norm(spectrum_.gamma(-M)));
        double l1 = 0.0;
        const int K = M + 20000;
        for (int k = M + 1; k <= K; ++k)
            l1 += 1.0 / std::abs(cplx(k * pi * k * pi) + closure_.b - lambda * lambda);
        l1 += 1.0 / (pi * pi * K);
        l1 *= dev;
        return l1 * std::exp(l1);
    }

private:
    PeriodicSpectrum spectrum_;
    TailClosure closure_;
    ClosureKind kind_ = ClosureKind::Fitted;
    std::vector<StandardRoot> roots_;
};

}  // namespace zsnorm
