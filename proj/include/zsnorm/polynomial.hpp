#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core.hpp"

namespace zsnorm {

// Polynomial with ascending coefficients: c[i] multiplies lambda^i.
class Poly {
public:
    Poly() : c_{0.0} {}
    explicit Poly(std::vector<cplx> c) : c_(std::move(c)) {
        if (c_.empty()) c_.push_back(0.0);
    }

    static Poly constant(cplx a) { return Poly({a}); }
    static Poly monomial(int d, cplx a = 1.0) {
        std::vector<cplx> c(d + 1, 0.0);
        c[d] = a;
        return Poly(std::move(c));
    }
    // (a - lambda)
    static Poly root_factor(cplx a) { return Poly({a, -1.0}); }
    // (-lambda)^d
    static Poly neg_power(int d) { return monomial(d, d % 2 ? -1.0 : 1.0); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const noexcept { return c_; }
    cplx operator[](int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }
    cplx leading() const { return c_.back(); }

    cplx operator()(cplx z) const {
        cplx acc = c_.back();
        for (int i = degree() - 1; i >= 0; --i) acc = acc * z + c_[i];
        return acc;
    }

    Poly derivative() const {
        if (degree() == 0) return Poly();
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = double(i) * c_[i];
        return Poly(std::move(d));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b * cplx(-1.0); }
    friend Poly operator*(const Poly& a, cplx s) {
        std::vector<cplx> c = a.c_;
        for (auto& x : c) x *= s;
        return Poly(std::move(c));
    }
    friend Poly operator*(cplx s, const Poly& a) { return a * s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }

    // Drop leading coefficients with modulus <= tol.
    Poly trimmed(double tol = 0.0) const {
        std::vector<cplx> c = c_;
        while (c.size() > 1 && std::abs(c.back()) <= tol) c.pop_back();
        return Poly(std::move(c));
    }

    std::vector<cplx> roots() const {
        const int d = degree();
        std::vector<cplx> r;
        if (d <= 0) return r;
        if (d == 1) return {-c_[0] / c_[1]};
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) C(i, d - 1) = -c_[i] / c_[d];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
        for (int i = 0; i < d; ++i) r.push_back(es.eigenvalues()(i));
        return r;
    }

private:
    std::vector<cplx> c_;
};

}  // namespace zsnorm
