// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_EXTREAL_HPP
#define CONELP_EXTREAL_HPP

#include <cmath>
#include <ostream>
#include <string>

#include "conelp/errors.hpp"

namespace conelp {

/// Extended real value: a finite double, +inf or -inf.
///
/// Optimal values of conic programs follow the conventions inf over the
/// empty set = +inf and sup over the empty set = -inf, so infinite values
/// are ordinary outcomes rather than errors.  Indeterminate arithmetic
/// (inf - inf, 0 * inf in slope combinations) throws NumericalFailureError
/// instead of silently producing a value.
class ExtReal {
  public:
    ExtReal() : v_(0.0) {}

    static ExtReal finite(double x) {
        if (!std::isfinite(x)) throw NumericalFailureError("ExtReal::finite called with non-finite value");
        ExtReal r;
        r.v_ = x;
        return r;
    }
    static ExtReal plus_inf() {
        ExtReal r;
        r.v_ = std::numeric_limits<double>::infinity();
        return r;
    }
    static ExtReal minus_inf() {
        ExtReal r;
        r.v_ = -std::numeric_limits<double>::infinity();
        return r;
    }

    bool is_finite() const { return std::isfinite(v_); }
    bool is_plus_inf() const { return std::isinf(v_) && v_ > 0; }
    bool is_minus_inf() const { return std::isinf(v_) && v_ < 0; }

    /// Finite payload; throws on an infinite value.
    double value() const {
        if (!is_finite()) throw NumericalFailureError("ExtReal::value on infinite value");
        return v_;
    }
    /// Raw double (may be +-inf), for printing and comparisons.
    double raw() const { return v_; }

    ExtReal operator-() const {
        ExtReal r;
        r.v_ = -v_;
        return r;
    }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (a.is_plus_inf() && b.is_minus_inf()) throw NumericalFailureError("ExtReal: (+inf) + (-inf)");
        if (a.is_minus_inf() && b.is_plus_inf()) throw NumericalFailureError("ExtReal: (-inf) + (+inf)");
        ExtReal r;
        r.v_ = a.v_ + b.v_;
        return r;
    }
    friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

    /// Scale by a finite nonnegative step; 0 * inf yields 0 here because a
    /// zero step leaves the base value untouched in every increment formula.
    friend ExtReal operator*(double t, ExtReal a) {
        if (!std::isfinite(t)) throw NumericalFailureError("ExtReal: non-finite scalar multiplier");
        if (t == 0.0) return ExtReal::finite(0.0);
        ExtReal r;
        r.v_ = t * a.v_;
        return r;
    }

    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend bool operator!=(ExtReal a, ExtReal b) { return a.v_ != b.v_; }
    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
    friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
    friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }

    std::string str() const {
        if (is_plus_inf()) return "+inf";
        if (is_minus_inf()) return "-inf";
        return std::to_string(v_);
    }

    friend std::ostream& operator<<(std::ostream& os, ExtReal a) { return os << a.str(); }

  private:
    double v_;
};

} // namespace conelp

#endif
