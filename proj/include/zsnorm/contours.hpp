#pragma once

#include <vector>

#include "core.hpp"
#include "quadrature.hpp"
#include "roots.hpp"
#include "spectrum.hpp"

namespace zsnorm {

struct ContourPolicy {
    double cap = pi / 4;         // preferred central radius
    double margin = pi / 16;     // minimal distance from a cut to its own contour
    double separation = pi / 16; // minimal gap between neighbouring central circles
};

class ContourSet {
public:
    ContourSet() = default;
    ContourSet(int N0, int M, std::vector<Circle> gammas, std::vector<StandardRoot> cuts)
        : N0_(N0), M_(M), gammas_(std::move(gammas)), cuts_(std::move(cuts)) {}

    int N0() const noexcept { return N0_; }
    int M() const noexcept { return M_; }
    const Circle& gamma(int k) const { return gammas_.at(k + M_); }
    const StandardRoot& cut(int k) const { return cuts_.at(k + M_); }

    // Closed disks pairwise disjoint.
    bool disjoint() const {
        for (std::size_t i = 0; i < gammas_.size(); ++i)
            for (std::size_t j = i + 1; j < gammas_.size(); ++j)
                if (std::abs(gammas_[i].center - gammas_[j].center) <=
                    gammas_[i].radius + gammas_[j].radius)
                    return false;
        return true;
    }

    // Every cut strictly inside its own contour and outside all others.
    bool cuts_inside() const {
        for (int k = -M_; k <= M_; ++k) {
            const auto& g = gamma(k);
            const auto& c = cut(k);
            if (std::abs(c.a - g.center) >= g.radius || std::abs(c.b - g.center) >= g.radius)
                return false;
        }
        return true;
    }

    bool central_inside() const {
        const double R = (N0_ + 0.25) * pi;
        for (int k = -N0_; k <= N0_; ++k)
            if (std::abs(gamma(k).center) + gamma(k).radius > R) return false;
        return true;
    }

private:
    int N0_ = 0, M_ = 0;
    std::vector<Circle> gammas_;
    std::vector<StandardRoot> cuts_;
};

// Lateral contours are circle(k pi, pi/4); central ones are circles around
// tau_k whose radius grows from the need |gamma_k|/2 + margin towards the cap
// as far as the neighbours and the central disk allow.
inline ContourSet build_contours(const PeriodicSpectrum& s, const ContourPolicy& pol = {}) {
    const int N0 = s.N0(), M = s.M();
    std::vector<Circle> g(2 * M + 1);
    std::vector<StandardRoot> cuts(2 * M + 1);
    for (int k = -M; k <= M; ++k) cuts[k + M] = {s.pair(k).minus, s.pair(k).plus};

    for (int k = N0 + 1; k <= M; ++k) {
        for (int kk : {k, -k}) {
            const Circle c{kk * pi, pi / 4};
            const auto& p = s.pair(kk);
            const double far = std::max(std::abs(p.minus - c.center), std::abs(p.plus - c.center));
            if (far > c.radius - pol.margin)
                throw ContourError("contour construction failed: cut " + std::to_string(kk) +
                                   " too close to its circle; adjust pairing radius or N0");
            g[kk + M] = c;
        }
    }

    const double R = (N0 + 0.25) * pi;
    std::vector<double> need(2 * N0 + 1);
    for (int k = -N0; k <= N0; ++k) need[k + N0] = 0.5 * std::abs(s.gamma(k)) + pol.margin;
    for (int k = -N0; k <= N0; ++k) {
        const cplx t = s.tau(k);
        const double nk = need[k + N0];
        double slack = R - std::abs(t) - nk;
        if (slack < 0.0)
            throw ContourError("contour construction failed: central pair " + std::to_string(k) +
                               " reaches the central boundary; adjust pairing radius or N0");
        for (int j = -N0; j <= N0; ++j) {
            if (j == k) continue;
            const double d =
                std::abs(t - s.tau(j)) - nk - need[j + N0] - pol.separation;
            if (d < 0.0)
                throw ContourError("contour construction failed: central pairs " +
                                   std::to_string(k) + " and " + std::to_string(j) +
                                   " overlap; adjust pairing radius or N0");
            slack = std::min(slack, 0.5 * d);
        }
        const double r = std::min(std::max(pol.cap, nk), nk + slack);
        g[k + M] = {t, r};
    }
    ContourSet cs(N0, M, std::move(g), std::move(cuts));
    if (!cs.disjoint() || !cs.cuts_inside() || !cs.central_inside())
        throw ContourError("contour construction failed: invariants violated");
    return cs;
}

}  // namespace zsnorm
