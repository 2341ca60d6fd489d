#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pantograph/interval.hpp"
#include "pantograph/real.hpp"

namespace pantograph::defexp {

/// Density parameter p in (0, 1], held exactly as a rational parsed from a
/// decimal string. The verbatim string is echoed in all outputs so reports
/// never suffer binary-decimal drift.
class DensityParam {
  public:
    static DensityParam parse(const std::string& s) {
        mpq_class q = rational_from_decimal(s);
        if (q <= 0 || q > 1)
            throw InvalidParameterError("p must be in (0, 1], got '" + s + "'");
        return DensityParam(s, std::move(q));
    }

    const std::string& decimal() const { return text_; }
    const mpq_class& rational() const { return value_; }

    bool is_one() const { return value_ == 1; }

    Real real(mpfr_prec_t prec) const { return Real::of_rational(value_, prec); }
    Interval interval(mpfr_prec_t prec) const {
        return Interval::of_rational(value_, prec);
    }

    /// log2(1/p) as a double, used only for precision sizing.
    double log2_inv() const {
        return -std::log2(value_.get_d());
    }

  private:
    DensityParam(std::string s, mpq_class q)
        : text_(std::move(s)), value_(std::move(q)) {}

    static mpq_class rational_from_decimal(const std::string& s) {
        std::string digits;
        size_t frac_len = 0;
        bool seen_dot = false, seen_digit = false;
        size_t i = 0;
        if (i < s.size() && (s[i] == '+')) ++i;
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (c == '.') {
                if (seen_dot) throw InvalidParameterError("bad decimal: '" + s + "'");
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                digits.push_back(c);
                seen_digit = true;
                if (seen_dot) ++frac_len;
            } else {
                throw InvalidParameterError("bad decimal: '" + s + "'");
            }
        }
        if (!seen_digit) throw InvalidParameterError("bad decimal: '" + s + "'");
        mpz_class num(digits.empty() ? "0" : digits);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }

    std::string text_;
    mpq_class value_;
};

/// Working precision floor: the smallest coefficient p^C(k,2)/k! must keep
/// at least 64 significant bits.
inline mpfr_prec_t precision_floor(const DensityParam& p, int k) {
    double bits = 0.5 * k * (k - 1) * p.log2_inv() +
                  k * std::log2(std::max(2.0, static_cast<double>(k))) + 64.0;
    return std::max<mpfr_prec_t>(128, static_cast<mpfr_prec_t>(std::ceil(bits)));
}

namespace detail {

struct SeriesOptions {
    // Stop once the geometric tail bound drops below abs_target (when set),
    // or once the term ratio falls below 2^-prec (ratio_floor mode).
    std::optional<Real> abs_target;
    long min_terms = 0;
    long term_cap = 100000;
    bool derivative = false;  // sum x^j p^C(j+1,2)/j! instead of x^j p^C(j,2)/j!
};

/// Certified enclosure of the series value at x (tail bound included).
/// Terms follow t_{j+1} = t_j * x * p^(j+shift) / (j+1), which decays
/// super-geometrically for p < 1 and geometrically for p = 1, |x| < j.
inline Interval series_enclosure(const DensityParam& p, const Interval& x,
                                 mpfr_prec_t prec, const SeriesOptions& opt) {
    const Interval p_iv = p.interval(prec);
    const Interval one = Interval::one(prec);
    Interval sum = Interval::zero(prec);
    Interval term = one;
    Interval pw = opt.derivative ? p_iv : one;  // p^(j+shift)
    const Real x_mag = x.mag();
    const Real ratio_floor = Real::pow2(-static_cast<long>(prec), prec);
    long jstar = -1;

    for (long j = 0;; ++j) {
        if (j > opt.term_cap)
            throw NonconvergenceError(
                "series did not converge within " +
                std::to_string(opt.term_cap) + " terms");
        sum += term;

        // r bounds every later term ratio: |x| p^(j+shift) / (j+1) decreases in j.
        Real r(prec);
        mpfr_mul(r.raw(), x_mag.raw(), pw.hi().raw(), MPFR_RNDU);
        mpfr_div_ui(r.raw(), r.raw(), static_cast<unsigned long>(j) + 1, MPFR_RNDU);
        if (jstar < 0 && r < 1.0) jstar = j;

        if (r < 1.0) {
            const Real term_mag = term.mag();
            Real one_minus_r(prec);
            mpfr_ui_sub(one_minus_r.raw(), 1, r.raw(), MPFR_RNDD);
            bool stop = false;
            if (opt.abs_target && jstar >= 0 && j >= 2 * jstar) {
                Real thresh(prec);
                mpfr_mul(thresh.raw(), opt.abs_target->raw(), one_minus_r.raw(),
                         MPFR_RNDD);
                stop = term_mag < thresh;
            } else if (!opt.abs_target && j >= opt.min_terms) {
                stop = r < ratio_floor;
            }
            if (stop) {
                Real tail(prec);
                mpfr_mul(tail.raw(), term_mag.raw(), r.raw(), MPFR_RNDU);
                mpfr_div(tail.raw(), tail.raw(), one_minus_r.raw(), MPFR_RNDU);
                sum += Interval::symmetric(tail);
                return sum;
            }
        }

        term *= x;
        term *= pw;
        term = term.div_ui(static_cast<unsigned long>(j) + 1);
        pw *= p_iv;
    }
}

}  // namespace detail

/// Series value with |result - true value| < target_abs_err.
inline Real eval_deformed_exp(const DensityParam& p, const Real& x,
                              const Real& target_abs_err,
                              long term_cap = 100000) {
    if (!(target_abs_err > 0.0))
        throw InvalidParameterError("target_abs_err must be positive");
    mpfr_prec_t prec = std::max<mpfr_prec_t>(x.prec(), 128);
    for (int attempt = 0; attempt < 5; ++attempt, prec *= 2) {
        detail::SeriesOptions opt;
        opt.abs_target = target_abs_err.ldexp(-1).at_prec(prec);
        opt.term_cap = term_cap;
        Interval enc = detail::series_enclosure(p, Interval::point(x.at_prec(prec)),
                                                prec, opt);
        if (enc.width() <= target_abs_err) return enc.mid();
    }
    throw NonconvergenceError("series enclosure did not tighten");
}

/// Term-wise derivative with the same tail policy.
inline Real eval_deformed_exp_derivative(const DensityParam& p, const Real& x,
                                         const Real& target_abs_err,
                                         long term_cap = 100000) {
    if (!(target_abs_err > 0.0))
        throw InvalidParameterError("target_abs_err must be positive");
    mpfr_prec_t prec = std::max<mpfr_prec_t>(x.prec(), 128);
    for (int attempt = 0; attempt < 5; ++attempt, prec *= 2) {
        detail::SeriesOptions opt;
        opt.abs_target = target_abs_err.ldexp(-1).at_prec(prec);
        opt.term_cap = term_cap;
        opt.derivative = true;
        Interval enc = detail::series_enclosure(p, Interval::point(x.at_prec(prec)),
                                                prec, opt);
        if (enc.width() <= target_abs_err) return enc.mid();
    }
    throw NonconvergenceError("series enclosure did not tighten");
}

/// f'(x) - f(p x). The two series agree term by term, so the result is pure
/// evaluation error and must satisfy |residual| < 2 * target_abs_err.
inline Real pantograph_residual(const DensityParam& p, const Real& x,
                                const Real& target_abs_err,
                                long term_cap = 100000) {
    if (!(target_abs_err > 0.0))
        throw InvalidParameterError("target_abs_err must be positive");
    mpfr_prec_t prec = std::max<mpfr_prec_t>(x.prec(), 128);
    const Real two_err = target_abs_err.ldexp(1);
    for (int attempt = 0; attempt < 5; ++attempt, prec *= 2) {
        detail::SeriesOptions opt;
        opt.abs_target = target_abs_err.ldexp(-1).at_prec(prec);
        opt.term_cap = term_cap;
        opt.derivative = true;
        Interval xp = Interval::point(x.at_prec(prec));
        Interval deriv = detail::series_enclosure(p, xp, prec, opt);
        opt.derivative = false;
        Interval delayed =
            detail::series_enclosure(p, p.interval(prec) * xp, prec, opt);
        Interval resid = deriv - delayed;
        if (resid.width() <= two_err) return resid.mid();
    }
    throw NonconvergenceError("residual enclosure did not tighten");
}

/// Coefficients b_j = p^C(j,2)/j!, j = 0..k, with exact rational provenance.
struct CoefficientList {
    DensityParam p;
    std::vector<Real> coeffs;
    std::vector<mpq_class> exact;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline CoefficientList truncated_coefficients(const DensityParam& p, int k,
                                              mpfr_prec_t prec_override = 0) {
    if (k < 2) throw InvalidParameterError("truncation order k must be >= 2");
    const mpfr_prec_t prec = std::max(precision_floor(p, k), prec_override);
    CoefficientList out{p, {}, {}};
    out.coeffs.reserve(k + 1);
    out.exact.reserve(k + 1);
    mpq_class b = 1, ppow = 1;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            b *= ppow;
            b /= j;
            ppow *= p.rational();
        }
        out.exact.push_back(b);
        out.coeffs.push_back(Real::of_rational(b, prec));
    }
    return out;
}

/// Horner evaluation of the truncated polynomial.
inline Real eval_truncated(const CoefficientList& cs, const Real& x) {
    mpfr_prec_t prec = std::max(x.prec(), cs.coeffs.front().prec());
    Real acc = cs.coeffs.back().at_prec(prec);
    for (int j = cs.degree() - 1; j >= 0; --j) acc = acc * x + cs.coeffs[j];
    return acc;
}

/// Certified Horner evaluation from the exact coefficients.
inline Interval eval_truncated_enclosure(const CoefficientList& cs,
                                         const Interval& x, mpfr_prec_t prec) {
    Interval acc = Interval::of_rational(cs.exact.back(), prec);
    for (int j = cs.degree() - 1; j >= 0; --j)
        acc = acc * x + Interval::of_rational(cs.exact[j], prec);
    return acc;
}

struct KurtzResult {
    bool holds = false;
    std::optional<int> first_failure;
    bool inconclusive = false;  // a comparison fell inside the guard band
};

/// Strict b_j^2 > 4 b_{j-1} b_{j+1} for 1 <= j <= k-1, decided exactly.
/// With the coefficients of the truncated series this is 1/j > 4p/(j+1),
/// so it holds for every j whenever p <= 1/4.
inline KurtzResult kurtz_check(const CoefficientList& cs) {
    for (const auto& b : cs.exact)
        if (b <= 0) throw InvalidParameterError("coefficients must be positive");
    for (int j = 1; j + 1 <= cs.degree(); ++j) {
        mpq_class lhs = cs.exact[j] * cs.exact[j];
        mpq_class rhs = 4 * cs.exact[j - 1] * cs.exact[j + 1];
        if (!(lhs > rhs)) return {false, j, false};
    }
    return {true, std::nullopt, false};
}

/// Guard-banded check for coefficient lists without rational provenance.
/// A margin smaller than 2^(-prec/2) * b_j^2 counts as a failure so that
/// real-rootedness is never certified from a borderline comparison.
inline KurtzResult kurtz_check(const std::vector<Real>& coeffs) {
    if (coeffs.size() < 2)
        throw InvalidParameterError("need at least two coefficients");
    mpfr_prec_t prec = coeffs.front().prec();
    for (const auto& b : coeffs) {
        prec = std::max(prec, b.prec());
        if (!(b > 0.0)) throw InvalidParameterError("coefficients must be positive");
    }
    const Real guard_scale = Real::pow2(-static_cast<long>(prec / 2), prec);
    for (int j = 1; j + 1 < static_cast<int>(coeffs.size()); ++j) {
        Interval lhs = Interval::point(coeffs[j]) * Interval::point(coeffs[j]);
        Interval rhs = Interval::point(coeffs[j - 1]) * Interval::point(coeffs[j + 1]);
        rhs = rhs + rhs;
        rhs = rhs + rhs;  // 4 b_{j-1} b_{j+1}
        Interval margin = lhs - rhs;
        Real band = guard_scale * lhs.mag();
        if (!(margin.lo() > band)) {
            bool conclusive = margin.hi() < -band;
            return {false, j, !conclusive};
        }
    }
    return {true, std::nullopt, false};
}

}  // namespace pantograph::defexp
