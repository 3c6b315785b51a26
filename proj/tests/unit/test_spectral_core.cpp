#include <gtest/gtest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "zsnorm/zsnorm.hpp"

using namespace zsnorm;

namespace {

// independent oracle: Eigen's dense matrix exponential
Eigen::Matrix2cd expm_oracle(cplx lambda, cplx c1, cplx c2) {
    Eigen::Matrix2cd A;
    A << -I * lambda, I * c1, -I * c2, I * lambda;
    return A.exp();
}

double mat_diff(const Mat2& m, const Eigen::Matrix2cd& e) {
    return std::max({std::abs(m[0] - e(0, 0)), std::abs(m[1] - e(0, 1)), std::abs(m[2] - e(1, 0)),
                     std::abs(m[3] - e(1, 1))});
}

}  // namespace

TEST(Monodromy, FreeOperatorDecouples) {
    const auto r = monodromy(Potential::zero(), pi / 3);
    EXPECT_LT(std::abs(r.matrix[0] - std::exp(-I * pi / 3.0)), 1e-12);
    EXPECT_LT(std::abs(r.matrix[3] - std::exp(I * pi / 3.0)), 1e-12);
    EXPECT_LT(std::abs(r.matrix[1]), 1e-14);
    EXPECT_LT(std::abs(r.matrix[2]), 1e-14);
}

TEST(Monodromy, ConstantPotentialMatchesMatrixExponential) {
    for (cplx l : {cplx{0.3, 0.0}, cplx{2.0, -0.7}, cplx{-5.0, 1.5}, cplx{0.0, 0.0}}) {
        for (auto [c1, c2] : {std::pair<cplx, cplx>{0.5, 0.5}, {0.5, -0.5}, {cplx{0.2, 0.1}, cplx{-0.3, 0.4}}}) {
            const auto r = monodromy(Potential::constant(c1, c2), l);
            EXPECT_LT(mat_diff(r.matrix, expm_oracle(l, c1, c2)), 1e-10) << l << c1 << c2;
        }
    }
}

TEST(Monodromy, DerivativeMatchesFiniteDifference) {
    Potential p = Potential::constant(0.5, 0.5);
    p.set_mode(1, {0.1, 0.05}, {-0.02, 0.1});
    const cplx l{1.3, 0.4};
    const double h = 1e-5;
    const auto r = monodromy(p, l);
    const auto a = monodromy(p, l + h).matrix, b = monodromy(p, l - h).matrix;
    for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(r.dmatrix[i] - (a[i] - b[i]) / (2 * h)), 1e-7);
}

TEST(Monodromy, UnitDeterminant) {
    Potential p;
    p.set_mode(0, 0.3, 0.3);
    p.set_mode(2, {0.1, 0.2}, {0.05, -0.1});
    p.set_mode(-1, {-0.2, 0.0}, {0.0, 0.3});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 20; ++i) {
        const cplx l{u(rng), u(rng) / 3.0};
        EXPECT_LT(std::abs(monodromy(p, l).det() - 1.0), 1e-10);
    }
}

TEST(Monodromy, RejectsNonPositiveTolerance) {
    EXPECT_THROW(monodromy(Potential::zero(), 1.0, 0.0), Error);
}

TEST(Discriminant, FreeIsTwoCosine) {
    for (cplx l : {cplx{0.1, 0.0}, cplx{3.0, 1.0}, cplx{-7.5, -0.5}}) {
        const auto [d, dd] = discriminant(Potential::zero(), l);
        EXPECT_LT(std::abs(d - 2.0 * std::cos(l)), 1e-11);
        EXPECT_LT(std::abs(dd + 2.0 * std::sin(l)), 1e-10);
    }
}

TEST(Discriminant, ConstantDefocusing) {
    const double c = 0.5;
    for (cplx l : {cplx{0.2, 0.0}, cplx{4.0, 0.3}, cplx{0.0, 1.0}}) {
        const cplx expect = 2.0 * std::cos(std::sqrt(l * l - c * c));
        EXPECT_LT(std::abs(discriminant(Potential::constant(c, c), l).first - expect), 1e-11);
    }
}

TEST(Discriminant, ConstantFocusingAtZero) {
    const double c = 0.5;
    const Eigen::Matrix2cd e = expm_oracle(0.0, c, -c);
    EXPECT_LT(std::abs(discriminant(Potential::constant(c, -c), 0.0).first - e.trace()), 1e-12);
    EXPECT_NEAR(e.trace().real(), 2.0 * std::cos(c), 1e-12);  // A^2 = -c^2
}

TEST(CountZeros, FreeDoublePoint) {
    EXPECT_EQ(count_zeros(Potential::zero(), Circle{3 * pi, pi / 4}), 2);
    EXPECT_EQ(count_zeros(Potential::zero(), Circle{pi / 2, 0.1}), 0);
}

TEST(CountZeros, ConstantCentralPair) {
    EXPECT_EQ(count_zeros(Potential::constant(0.5, 0.5), Circle{0.0, 1.0}), 2);
}

TEST(LocateSpectrum, Free) {
    const auto s = locate_spectrum(Potential::zero(), 1, 8);
    for (int k = -8; k <= 8; ++k) {
        EXPECT_LT(std::abs(s.pair(k).minus - k * pi), 1e-9);
        EXPECT_LT(std::abs(s.pair(k).plus - k * pi), 1e-9);
        EXPECT_LT(std::abs(s.gamma(k)), 1e-9);
    }
    EXPECT_LT(s.l2_tail(), 1e-8);
}

TEST(LocateSpectrum, ConstantDefocusing) {
    const auto s = locate_spectrum(Potential::constant(0.5, 0.5), 1, 8);
    EXPECT_LT(std::abs(s.pair(0).minus + 0.5), 1e-10);
    EXPECT_LT(std::abs(s.pair(0).plus - 0.5), 1e-10);
    for (int k = 1; k <= 8; ++k) {
        const double e = std::sqrt(k * k * pi * pi + 0.25);
        for (int sg : {-1, 1}) {
            EXPECT_LT(std::abs(s.pair(sg * k).minus - sg * e), 1e-9);
            EXPECT_LT(std::abs(s.pair(sg * k).plus - sg * e), 1e-9);
        }
    }
}

TEST(LocateSpectrum, ConstantFocusingOrderedByImaginaryPart) {
    const auto s = locate_spectrum(Potential::constant(0.5, -0.5), 1, 8);
    EXPECT_LT(std::abs(s.pair(0).minus - cplx(0.0, -0.5)), 1e-10);
    EXPECT_LT(std::abs(s.pair(0).plus - cplx(0.0, 0.5)), 1e-10);
}

TEST(LocateSpectrum, Invariants) {
    Potential p = Potential::constant(0.4, 0.4);
    p.set_mode(1, 0.1, 0.1);
    p.set_mode(-1, 0.1, 0.1);
    const auto s = locate_spectrum(p, 2, 10);
    for (int k = -10; k <= 10; ++k) EXPECT_FALSE(lex_less(s.pair(k).plus, s.pair(k).minus));
    for (int k = -2; k < 2; ++k) EXPECT_TRUE(lex_less(s.pair(k).minus, s.pair(k + 1).minus));
    for (int k = 3; k <= 10; ++k)
        for (int sg : {-1, 1}) {
            EXPECT_LT(std::abs(s.pair(sg * k).minus - sg * k * pi), pi / 4);
            EXPECT_LT(std::abs(s.pair(sg * k).plus - sg * k * pi), pi / 4);
        }
}

TEST(LocateSpectrum, BadWindowRejected) {
    EXPECT_THROW(locate_spectrum(Potential::zero(), 0, 4), Error);
    EXPECT_THROW(locate_spectrum(Potential::zero(), 5, 4), Error);
}

TEST(LocateSpectrum, TripleZeroRejected) {
    auto disc = [](cplx l) { return std::pair<cplx, cplx>{2.0 + l * l * l, 3.0 * l * l}; };
    EXPECT_THROW(locate_spectrum_with(disc, 1, 1), MultiplicityError);
}

TEST(OrderCentral, AllDouble) {
    const auto p = order_central({0.0, 0.0, -pi, -pi, pi, pi}, 1);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[0].minus, cplx(-pi));
    EXPECT_EQ(p[1].plus, cplx(0.0));
    EXPECT_EQ(p[2].minus, cplx(pi));
}

TEST(OrderCentral, ConstantSpectrum) {
    const double e = std::sqrt(pi * pi + 0.25);
    const auto p = order_central({e, -0.5, -e, 0.5, e, -e}, 1);
    EXPECT_EQ(p[1].minus, cplx(-0.5));
    EXPECT_EQ(p[1].plus, cplx(0.5));
    EXPECT_EQ(p[0].minus, cplx(-e));
    EXPECT_EQ(p[2].plus, cplx(e));
}

TEST(OrderCentral, FocusingPair) {
    const double e = std::sqrt(pi * pi - 0.25);
    const auto p = order_central({cplx(0, 0.5), cplx(0, -0.5), e, e, -e, -e}, 1);
    EXPECT_EQ(p[1].minus, cplx(0, -0.5));
    EXPECT_EQ(p[1].plus, cplx(0, 0.5));
}

TEST(OrderCentral, WrongCountRejected) {
    EXPECT_THROW(order_central({0.0, 0.0, pi}, 1), StructuralError);
}
