#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include "pantograph/errors.hpp"

namespace pantograph {

/// Arbitrary-precision real scalar backed by MPFR.
///
/// Every value carries its own working precision in bits (>= 64). Binary
/// operators round to nearest at the larger of the two operand precisions;
/// directed-rounding arithmetic lives in Interval, not here.
class Real {
  public:
    static constexpr mpfr_prec_t kMinPrecision = 64;

    explicit Real(mpfr_prec_t prec = 128) {
        mpfr_init2(v_, clamp(prec));
        mpfr_set_nan(v_);
    }

    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    Real(Real&& o) noexcept {
        mpfr_init2(v_, kMinPrecision);
        mpfr_swap(v_, o.v_);
    }

    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }

    ~Real() { mpfr_clear(v_); }

    static Real of(double x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }

    static Real of(long x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }

    static Real of_string(const std::string& s, mpfr_prec_t prec) {
        Real r(prec);
        if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0 && mpfr_nan_p(r.v_))
            throw InvalidParameterError("not a decimal number: '" + s + "'");
        return r;
    }

    static Real of_rational(const mpq_class& q, mpfr_prec_t prec,
                            mpfr_rnd_t rnd = MPFR_RNDN) {
        Real r(prec);
        mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
        return r;
    }

    /// 2^e, exact at any precision.
    static Real pow2(long e, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    Real at_prec(mpfr_prec_t prec) const {
        Real r(prec);
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sgn() const { return mpfr_sgn(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    long to_long_floor() const {
        mpfr_t t;
        mpfr_init2(t, prec());
        mpfr_floor(t, v_);
        long out = mpfr_get_si(t, MPFR_RNDN);
        mpfr_clear(t);
        return out;
    }

    /// Round-trip decimal rendering ("@NaN@"-free for finite values).
    std::string to_string(size_t digits = 0) const {
        if (mpfr_nan_p(v_)) return "nan";
        if (mpfr_zero_p(v_)) return "0";
        if (digits == 0)
            digits = static_cast<size_t>(mpfr_get_prec(v_) * 0.30103) + 3;
        mpfr_exp_t e;
        char* s = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
        std::string mant(s);
        mpfr_free_str(s);
        bool neg = !mant.empty() && mant[0] == '-';
        std::string d = neg ? mant.substr(1) : mant;
        // strip trailing zeros but keep at least one digit
        size_t last = d.find_last_not_of('0');
        d = d.substr(0, std::max<size_t>(last + 1, 1));
        std::string out = (neg ? "-0." : "0.") + d + "e" + std::to_string(e);
        return out;
    }

    Real operator-() const {
        Real r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    Real abs() const {
        Real r(prec());
        mpfr_abs(r.v_, v_, MPFR_RNDN);
        return r;
    }

    Real sqrt() const {
        Real r(prec());
        mpfr_sqrt(r.v_, v_, MPFR_RNDN);
        return r;
    }

    /// this * 2^e, exact.
    Real ldexp(long e) const {
        Real r(prec());
        mpfr_mul_2si(r.v_, v_, e, MPFR_RNDN);
        return r;
    }

    Real pow_si(long e) const {
        Real r(prec());
        mpfr_pow_si(r.v_, v_, e, MPFR_RNDN);
        return r;
    }

    friend Real operator+(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, unsigned long b) {
        Real r(a.prec());
        mpfr_mul_ui(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, unsigned long b) {
        Real r(a.prec());
        mpfr_div_ui(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }

    Real& operator+=(const Real& b) { return *this = *this + b; }
    Real& operator-=(const Real& b) { return *this = *this - b; }
    Real& operator*=(const Real& b) { return *this = *this * b; }
    Real& operator/=(const Real& b) { return *this = *this / b; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

    friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

  private:
    static mpfr_prec_t clamp(mpfr_prec_t p) { return std::max(p, kMinPrecision); }
    static mpfr_prec_t join(const Real& a, const Real& b) {
        return std::max(a.prec(), b.prec());
    }

    mpfr_t v_;
};

}  // namespace pantograph
