#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zsnorm {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ODE integrator could not reach the requested tolerance.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double defect)
        : Error(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, cplx last, cplx previous)
        : Error(what), last_(last), previous_(previous) {}
    cplx last() const noexcept { return last_; }
    cplx previous() const noexcept { return previous_; }

private:
    cplx last_, previous_;
};

// Argument-principle count disagrees with the localization hypothesis.
class CountingError : public Error {
public:
    CountingError(const std::string& what, int disk) : Error(what), disk_(disk) {}
    int disk() const noexcept { return disk_; }

private:
    int disk_;
};

// A cluster of periodic eigenvalues with multiplicity above two.
class MultiplicityError : public Error {
public:
    using Error::Error;
};

class StructuralError : public Error {
public:
    using Error::Error;
};

class ContourError : public Error {
public:
    using Error::Error;
};

class BranchError : public Error {
public:
    using Error::Error;
};

class NormalizationError : public Error {
public:
    NormalizationError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double cond)
        : Error(what), cond_(cond) {}
    double condition_number() const noexcept { return cond_; }

private:
    double cond_;
};

// pi_k = k*pi, except pi_0 = 1.
inline double pi_k(int k) noexcept { return k == 0 ? 1.0 : k * pi; }

// Lexicographic order on C: real part first, then imaginary part.
// Real parts closer than tol*max(1,|a|,|b|) count as equal, so that
// values which agree up to rounding are ordered by imaginary part.
inline bool lex_less(cplx a, cplx b, double tol = 0.0) noexcept {
    double scale = std::max({1.0, std::abs(a), std::abs(b)});
    double dr = a.real() - b.real();
    if (std::abs(dr) > tol * scale) return dr < 0;
    return a.imag() < b.imag() && (b.imag() - a.imag()) > tol * scale;
}

inline bool lex_equal(cplx a, cplx b, double tol = 0.0) noexcept {
    return !lex_less(a, b, tol) && !lex_less(b, a, tol);
}

}  // namespace zsnorm
