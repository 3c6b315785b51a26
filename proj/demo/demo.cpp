// Walk through the pipeline for the constant potential phi1 = phi2 = c:
// spectrum, normalized differentials, zeta_n, and a continuation from phi = 0.
#include <cstdio>
#include <cstdlib>

#include "zsnorm/zsnorm.hpp"

using namespace zsnorm;

int main(int argc, char** argv) {
    const double c = argc > 1 ? std::atof(argv[1]) : 0.5;
    const int N0 = 1, N = 2, M = 8;
    const Potential phi = Potential::constant(c, c);

    const PeriodicSpectrum s = locate_spectrum(phi, N0, M);
    std::printf("periodic spectrum, c = %g\n", c);
    for (int k = -3; k <= 3; ++k)
        std::printf("  k=%+d  lambda- = %+.12f  lambda+ = %+.12f  |gamma| = %.3e\n", k,
                    s.pair(k).minus.real(), s.pair(k).plus.real(), std::abs(s.gamma(k)));

    const FiniteGapContext ctx(s);
    std::printf("open gaps:");
    for (int k : ctx.gaps().J) std::printf(" %d", k);
    std::printf("\n");

    const auto [eps, e] = epsilon_n(ctx, 1);
    std::printf("eps_1 = %.12f  (closed form %.12f)\n", eps.real(), std::sqrt(pi * pi + c * c) - pi);

    for (int n : {0, 1, 3}) {
        const ZetaFunction z = zeta(ctx, n, N);
        double worst = 0.0;
        for (const auto& [m, v] : zeta_residuals(ctx, z)) worst = std::max(worst, std::abs(v));
        std::printf("zeta_%d: degree %d, max normalization residual %.2e\n", n, z.degree(), worst);
    }

    HomotopyOptions ho;
    ho.N0 = N0;
    ho.N = N;
    ho.M = M;
    const HomotopyResult r = continue_homotopy(Potential::zero(), phi, {1}, ho);
    if (!r.success) {
        std::printf("continuation failed: %s\n", r.message.c_str());
        return 1;
    }
    const ContinuationState& st = r.states.at(1);
    const auto roots = st.params.to_zeta(ctx.canonical().closure()).central_roots(s);
    std::printf("continuation 0 -> c: %zu steps, %d Newton iterations, residual %.2e\n", r.log.size(),
                st.iterations, st.residual);
    std::printf("  central root sigma~_0 = %.12f (eps_1 above)\n", roots.at(0).real());
    return 0;
}
