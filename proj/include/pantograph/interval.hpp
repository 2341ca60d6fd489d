#pragma once

#include <algorithm>

#include "pantograph/real.hpp"

namespace pantograph {

/// Closed interval [lo, hi] with outward-directed rounding.
///
/// All operations round the lower endpoint toward -inf and the upper one
/// toward +inf, so the result interval always contains the exact result.
/// A sign reported by sign() is therefore mathematically certain.
class Interval {
  public:
    Interval(Real lo, Real hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

    static Interval point(const Real& x) { return Interval(x, x); }

    static Interval of(double x, mpfr_prec_t prec) {
        return point(Real::of(x, prec));
    }

    /// Tight rational enclosure at the given precision.
    static Interval of_rational(const mpq_class& q, mpfr_prec_t prec) {
        Real lo(prec), hi(prec);
        mpfr_set_q(lo.raw(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(hi.raw(), q.get_mpq_t(), MPFR_RNDU);
        return Interval(std::move(lo), std::move(hi));
    }

    static Interval zero(mpfr_prec_t prec) { return point(Real::of(0L, prec)); }
    static Interval one(mpfr_prec_t prec) { return point(Real::of(1L, prec)); }

    /// [-r, r] for r >= 0.
    static Interval symmetric(const Real& r) { return Interval(-r, r); }

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    mpfr_prec_t prec() const { return std::max(lo_.prec(), hi_.prec()); }

    /// +1 if certainly positive, -1 if certainly negative, 0 if undecided.
    int sign() const {
        if (mpfr_sgn(lo_.raw()) > 0) return 1;
        if (mpfr_sgn(hi_.raw()) < 0) return -1;
        return 0;
    }

    bool contains_zero() const { return sign() == 0; }

    Real width() const {
        Real w(prec());
        mpfr_sub(w.raw(), hi_.raw(), lo_.raw(), MPFR_RNDU);
        return w;
    }

    Real mid() const {
        Real m(prec());
        mpfr_add(m.raw(), lo_.raw(), hi_.raw(), MPFR_RNDN);
        mpfr_div_2ui(m.raw(), m.raw(), 1, MPFR_RNDN);
        return m;
    }

    /// Upper bound on |x| over the interval.
    Real mag() const {
        Real a(prec()), b(prec());
        mpfr_abs(a.raw(), lo_.raw(), MPFR_RNDU);
        mpfr_abs(b.raw(), hi_.raw(), MPFR_RNDU);
        return a >= b ? a : b;
    }

    Interval operator-() const { return Interval(-hi_, -lo_); }

    friend Interval operator+(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real lo(p), hi(p);
        mpfr_add(lo.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_add(hi.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        return Interval(std::move(lo), std::move(hi));
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real lo(p), hi(p);
        mpfr_sub(lo.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_sub(hi.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
        return Interval(std::move(lo), std::move(hi));
    }

    friend Interval operator*(const Interval& a, const Interval& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real lo(p), hi(p), t(p);
        // lo = min of the four products rounded down
        mpfr_mul(lo.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_mul(t.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_min(lo.raw(), lo.raw(), t.raw(), MPFR_RNDD);
        mpfr_mul(t.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDD);
        mpfr_min(lo.raw(), lo.raw(), t.raw(), MPFR_RNDD);
        mpfr_mul(t.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDD);
        mpfr_min(lo.raw(), lo.raw(), t.raw(), MPFR_RNDD);
        // hi = max of the four products rounded up
        mpfr_mul(hi.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDU);
        mpfr_mul(t.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDU);
        mpfr_max(hi.raw(), hi.raw(), t.raw(), MPFR_RNDU);
        mpfr_mul(t.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
        mpfr_max(hi.raw(), hi.raw(), t.raw(), MPFR_RNDU);
        mpfr_mul(t.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
        mpfr_max(hi.raw(), hi.raw(), t.raw(), MPFR_RNDU);
        return Interval(std::move(lo), std::move(hi));
    }

    Interval div_ui(unsigned long d) const {
        Real lo(prec()), hi(prec());
        mpfr_div_ui(lo.raw(), lo_.raw(), d, MPFR_RNDD);
        mpfr_div_ui(hi.raw(), hi_.raw(), d, MPFR_RNDU);
        return Interval(std::move(lo), std::move(hi));
    }

    Interval& operator+=(const Interval& b) { return *this = *this + b; }
    Interval& operator-=(const Interval& b) { return *this = *this - b; }
    Interval& operator*=(const Interval& b) { return *this = *this * b; }

  private:
    Real lo_, hi_;
};

}  // namespace pantograph
