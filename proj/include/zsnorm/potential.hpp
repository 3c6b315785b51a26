#pragma once

#include <map>
#include <utility>

#include "core.hpp"

namespace zsnorm {

// phi_i(x) = sum_j c_ij exp(2 pi i j x) on the unit circle.
class Potential {
public:
    struct Mode {
        cplx c1{0.0};
        cplx c2{0.0};
    };

    Potential() = default;

    static Potential zero() { return Potential{}; }

    static Potential constant(cplx c1, cplx c2) {
        Potential p;
        p.set_mode(0, c1, c2);
        return p;
    }

    void set_mode(int j, cplx c1, cplx c2) {
        if (c1 == 0.0 && c2 == 0.0)
            modes_.erase(j);
        else
            modes_[j] = Mode{c1, c2};
    }

    const std::map<int, Mode>& modes() const noexcept { return modes_; }

    bool real_type() const noexcept { return real_type_; }
    void set_real_type(bool flag) noexcept { real_type_ = flag; }

    // c1_j == conj(c2_{-j}) for every j, up to tol.
    bool satisfies_real_type(double tol = 0.0) const {
        auto coef = [&](int j) {
            auto it = modes_.find(j);
            return it == modes_.end() ? Mode{} : it->second;
        };
        for (const auto& [j, m] : modes_) {
            if (std::abs(m.c1 - std::conj(coef(-j).c2)) > tol) return false;
            if (std::abs(m.c2 - std::conj(coef(-j).c1)) > tol) return false;
        }
        return true;
    }

    bool is_zero() const noexcept { return modes_.empty(); }

    // A single j = 0 mode.
    bool is_constant() const noexcept {
        return modes_.empty() || (modes_.size() == 1 && modes_.begin()->first == 0);
    }

    std::pair<cplx, cplx> eval(double x) const {
        cplx p1{0.0}, p2{0.0};
        for (const auto& [j, m] : modes_) {
            cplx e = std::polar(1.0, 2.0 * pi * j * x);
            p1 += m.c1 * e;
            p2 += m.c2 * e;
        }
        return {p1, p2};
    }

    // Sum of |c1_j| + |c2_j|, an upper bound for sup|phi|.
    double sup_bound() const {
        double s = 0.0;
        for (const auto& [j, m] : modes_) s += std::abs(m.c1) + std::abs(m.c2);
        return s;
    }

    // (1-t) a + t b, modewise.
    static Potential interpolate(const Potential& a, const Potential& b, double t) {
        Potential p;
        for (const auto& [j, m] : a.modes_) p.set_mode(j, (1.0 - t) * m.c1, (1.0 - t) * m.c2);
        for (const auto& [j, m] : b.modes_) {
            Mode cur = p.modes_.count(j) ? p.modes_[j] : Mode{};
            p.set_mode(j, cur.c1 + t * m.c1, cur.c2 + t * m.c2);
        }
        p.real_type_ = a.real_type_ && b.real_type_;
        return p;
    }

    bool operator==(const Potential& o) const {
        if (modes_.size() != o.modes_.size() || real_type_ != o.real_type_) return false;
        for (const auto& [j, m] : modes_) {
            auto it = o.modes_.find(j);
            if (it == o.modes_.end() || it->second.c1 != m.c1 || it->second.c2 != m.c2)
                return false;
        }
        return true;
    }

private:
    std::map<int, Mode> modes_;
    bool real_type_ = false;
};

}  // namespace zsnorm
