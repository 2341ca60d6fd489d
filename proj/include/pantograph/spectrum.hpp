#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pantograph/defexp.hpp"
#include "pantograph/interval.hpp"
#include "pantograph/real.hpp"

namespace pantograph::spectrum {

using defexp::CoefficientList;
using defexp::DensityParam;

/// Leading-order location of the k-th largest root: -k p^(1-k).
/// A bracketing seed only, never a certified root.
inline Real asymptotic_seed(int k, const DensityParam& p, mpfr_prec_t prec = 128) {
    if (k < 1) throw InvalidParameterError("seed index must be >= 1");
    Real pr = p.real(prec);
    return -(pr.pow_si(1 - k) * static_cast<unsigned long>(k));
}

struct RootEnclosure {
    Real lo, hi;  // lo < root < hi < 0, opposite certified signs at endpoints
};

enum class RootSource { truncated, entire };

inline const char* to_string(RootSource s) {
    return s == RootSource::truncated ? "truncated" : "entire";
}

/// Certified real roots, descending (a_1 > a_2 > ... , all negative).
struct RootList {
    DensityParam p;
    RootSource source;
    int order;  // truncation degree k, or requested root count m
    mpfr_prec_t precision_bits = 128;
    std::vector<Real> roots;
    std::vector<RootEnclosure> enclosures;
    bool certified = true;
};

/// Part-size weights c_i = -1/a_i, weakly descending and positive.
/// For the entire-function source, tail_mass = 1 - sum c_i is the measure
/// carried by all deeper roots.
struct WeightSequence {
    DensityParam p;
    RootSource source;
    int order;
    mpfr_prec_t precision_bits = 128;
    std::vector<Real> weights;
    Real tail_mass = Real::of(0.0, 64);
};

namespace detail {

/// Certified enclosure of the target function at a point, as a function of
/// evaluation precision.
using EnclosureFn = std::function<Interval(const Real&, mpfr_prec_t)>;

inline int certified_sign(const EnclosureFn& f, const Real& x,
                          mpfr_prec_t prec, int escalations = 3) {
    mpfr_prec_t q = prec;
    for (int e = 0; e <= escalations; ++e, q *= 2) {
        int s = f(x, q).sign();
        if (s != 0) return s;
    }
    return 0;
}

struct Bracket {
    Real lo, hi;     // lo < hi < 0
    int sign_at_hi;  // certified; sign at lo is the opposite
};

/// Scan magnitudes for isolation attempt t: geometric interpolants between
/// consecutive seeds s_i = i p^(1-i), endpoints -s_1 p and -s_m / p.
/// Each retry doubles the subdivision density and stretches both endpoints.
inline std::vector<Real> scan_magnitudes(const DensityParam& p, int m,
                                         int attempt, mpfr_prec_t prec) {
    std::vector<Real> anchors;
    anchors.reserve(m + 1);
    std::vector<Real> seeds;
    for (int i = 1; i <= m + 1; ++i)
        seeds.push_back(asymptotic_seed(i, p, prec).abs());
    anchors.push_back((seeds[0] * p.real(prec)).ldexp(-attempt));
    for (int i = 1; i < m; ++i)
        anchors.push_back((seeds[i - 1] * seeds[i]).sqrt());
    anchors.push_back((seeds[m - 1] / p.real(prec)).ldexp(attempt));

    const long pieces = 1L << attempt;
    std::vector<Real> mags;
    mags.push_back(anchors.front());
    for (size_t a = 0; a + 1 < anchors.size(); ++a) {
        Real ratio = anchors[a + 1] / anchors[a];
        Real step(prec);
        mpfr_rootn_ui(step.raw(), ratio.raw(), static_cast<unsigned long>(pieces),
                      MPFR_RNDN);
        Real cur = anchors[a];
        for (long r = 1; r < pieces; ++r) {
            cur = cur * step;
            mags.push_back(cur);
        }
        mags.push_back(anchors[a + 1]);
    }
    // strictly increasing, drop accidental duplicates
    std::vector<Real> out;
    for (auto& v : mags)
        if (out.empty() || v > out.back()) out.push_back(std::move(v));
    return out;
}

/// Locate up to `want` sign-change brackets, nearest to zero first.
/// Densifies the scan up to `max_attempts` times, then doubles the working
/// precision once, before giving up with whatever was found.
inline std::vector<Bracket> isolate(const EnclosureFn& f, const DensityParam& p,
                                    int want, mpfr_prec_t prec,
                                    int max_attempts = 6) {
    std::vector<Bracket> best;
    for (int round = 0; round < 2; ++round, prec *= 2) {
        for (int attempt = 0; attempt <= max_attempts; ++attempt) {
            std::vector<Real> mags = scan_magnitudes(p, want, attempt, prec);
            std::vector<Bracket> found;
            std::optional<Real> prev_x;
            int prev_sign = 0;
            for (const auto& mag : mags) {
                Real x = -mag;
                int s = certified_sign(f, x, prec, 2);
                if (s == 0) continue;  // undecidable point, skip it
                if (prev_sign != 0 && s != prev_sign)
                    found.push_back(Bracket{x, *prev_x, prev_sign});
                prev_x = x;
                prev_sign = s;
                if (static_cast<int>(found.size()) >= want) break;
            }
            if (static_cast<int>(found.size()) > static_cast<int>(best.size()))
                best = std::move(found);
            if (static_cast<int>(best.size()) >= want) return best;
        }
    }
    return best;
}

/// Shrink a certified bracket to relative width 2^(-prec/2), alternating
/// bisection with Newton steps and finishing with a symmetric enclosure
/// around the converged point.
inline RootEnclosure refine(const EnclosureFn& f, const EnclosureFn& fprime,
                            Bracket b, mpfr_prec_t prec) {
    const Real rel_tol = Real::pow2(-static_cast<long>(prec / 2), prec);
    Real lo = b.lo.at_prec(prec), hi = b.hi.at_prec(prec);
    int sign_hi = b.sign_at_hi;
    std::optional<Real> pending_newton;

    const long max_iter = 4 * static_cast<long>(prec);
    for (long iter = 0; iter < max_iter; ++iter) {
        Real width = hi - lo;
        if (width < rel_tol * hi.abs()) return {lo, hi};

        Real cand = (lo + hi).ldexp(-1);
        bool from_newton = false;
        if (pending_newton && iter % 3 != 0 && *pending_newton > lo &&
            *pending_newton < hi) {
            cand = *pending_newton;
            from_newton = true;
        }
        pending_newton.reset();

        Interval fc = f(cand, prec);
        Real fval = fc.mid();
        Real fp = fprime(cand, prec).mid();
        if (!fp.is_zero() && !fval.is_zero()) {
            Real next = cand - fval / fp;
            Real step = (next - cand).abs();
            if (from_newton && step < rel_tol * cand.abs().ldexp(-3)) {
                // converged; try the tight symmetric enclosure
                Real delta = rel_tol * cand.abs().ldexp(-2);
                Real a = cand - delta, c = cand + delta;
                if (a > lo && c < hi) {
                    int sa = certified_sign(f, a, prec);
                    int sc = certified_sign(f, c, prec);
                    if (sa != 0 && sc == -sa) return {a, c};
                }
            }
            if (next > lo && next < hi) pending_newton = next;
        }

        int s = fc.sign();
        if (s == 0) s = certified_sign(f, cand, prec * 2, 2);
        if (s == 0) {
            // likely sitting on the root; nudge deterministically
            cand = cand + width / 137ul;
            s = certified_sign(f, cand, prec, 3);
            if (s == 0)
                throw CertificationError("sign undecidable near " +
                                         cand.to_string(20));
        }
        if (s == sign_hi)
            hi = cand;
        else
            lo = cand;
    }
    throw NonconvergenceError("root refinement did not reach target width");
}

inline void check_descending_disjoint(const std::vector<RootEnclosure>& encs) {
    for (size_t i = 0; i + 1 < encs.size(); ++i) {
        if (!(encs[i + 1].hi < encs[i].lo))
            throw CertificationError(
                "root enclosures " + std::to_string(i + 1) + " and " +
                std::to_string(i + 2) +
                " overlap; raise the working precision");
    }
}

}  // namespace detail

struct TruncatedRootOptions {
    mpfr_prec_t precision_bits = 0;  // 0: use precision_floor(p, k)
    bool force = false;  // proceed past a failed Kurtz check, uncertified
};

/// All k roots of the degree-k truncation, certified via the exact-rational
/// coefficient enclosures. Requires the Kurtz criterion unless forced.
inline RootList find_roots_truncated(const DensityParam& p, int k,
                                     const TruncatedRootOptions& opts = {}) {
    CoefficientList cs = defexp::truncated_coefficients(p, k, opts.precision_bits);
    const mpfr_prec_t prec = cs.coeffs.front().prec();
    defexp::KurtzResult kz = defexp::kurtz_check(cs);
    if (!kz.holds && !opts.force)
        throw CertificationError(
            "Kurtz real-rootedness criterion failed at j=" +
            std::to_string(kz.first_failure.value_or(-1)) +
            "; the truncated polynomial may have non-real roots (it always "
            "does for p > 1/2). Pass force to collect whatever real roots "
            "exist, uncertified.");

    // derivative coefficients (j+1) b_{j+1}, exact
    std::vector<mpq_class> dq;
    for (int j = 1; j <= k; ++j) dq.push_back(mpq_class(j) * cs.exact[j]);

    detail::EnclosureFn value = [&cs](const Real& x, mpfr_prec_t q) {
        return defexp::eval_truncated_enclosure(cs, Interval::point(x), q);
    };
    detail::EnclosureFn deriv = [&dq](const Real& x, mpfr_prec_t q) {
        Interval acc = Interval::of_rational(dq.back(), q);
        Interval xi = Interval::point(x);
        for (int j = static_cast<int>(dq.size()) - 2; j >= 0; --j)
            acc = acc * xi + Interval::of_rational(dq[j], q);
        return acc;
    };

    std::vector<detail::Bracket> brackets = detail::isolate(value, p, k, prec);
    if (kz.holds && static_cast<int>(brackets.size()) < k)
        throw RootCountError(
            "isolated only " + std::to_string(brackets.size()) + " of " +
                std::to_string(k) +
                " roots; raise precision_bits (first missing index " +
                std::to_string(brackets.size() + 1) + ")",
            static_cast<int>(brackets.size()) + 1);

    RootList out{p, RootSource::truncated, k, prec, {}, {}, kz.holds};
    for (auto& b : brackets) {
        RootEnclosure e = detail::refine(value, deriv, b, prec);
        out.roots.push_back(e.lo.at_prec(prec) + (e.hi - e.lo).ldexp(-1));
        out.enclosures.push_back(std::move(e));
    }
    detail::check_descending_disjoint(out.enclosures);

    if (kz.holds) {
        // constant-term identity: b_k * prod(-a_i) = 1
        Real prod = Real::of_rational(cs.exact[k], prec);
        for (const auto& r : out.roots) prod *= -r;
        Real dev = (prod - Real::of(1L, prec)).abs();
        if (dev > Real::pow2(-static_cast<long>(prec / 4), prec))
            throw CertificationError(
                "constant-term product identity violated: deviation " +
                dev.to_string(8));
    }
    return out;
}

struct EntireRootOptions {
    mpfr_prec_t precision_bits = 0;  // 0: use precision_floor(p, m)
};

/// The m largest (least negative) roots of the full series, certified by
/// sign-change enclosures of the rigorously tail-bounded evaluation.
inline RootList find_roots_entire(const DensityParam& p, int m,
                                  const EntireRootOptions& opts = {}) {
    if (p.is_one())
        throw InvalidParameterError("the p = 1 series is the exponential and has no roots");
    if (m < 1) throw InvalidParameterError("m must be >= 1");
    const mpfr_prec_t prec =
        std::max(defexp::precision_floor(p, std::max(m, 2)), opts.precision_bits);

    // evaluation near the m-th root needs terms well past the series peak
    const long min_terms = 4L * m;
    detail::EnclosureFn value = [&p, min_terms](const Real& x, mpfr_prec_t q) {
        defexp::detail::SeriesOptions opt;
        opt.min_terms = min_terms;
        return defexp::detail::series_enclosure(p, Interval::point(x), q, opt);
    };
    detail::EnclosureFn deriv = [&p, min_terms](const Real& x, mpfr_prec_t q) {
        defexp::detail::SeriesOptions opt;
        opt.min_terms = min_terms;
        opt.derivative = true;
        return defexp::detail::series_enclosure(p, Interval::point(x), q, opt);
    };

    std::vector<detail::Bracket> brackets = detail::isolate(value, p, m, prec);
    if (static_cast<int>(brackets.size()) < m)
        throw RootCountError(
            "bracketing failed at root index " +
                std::to_string(brackets.size() + 1) + " of " + std::to_string(m) +
                "; the scan window or precision is too tight",
            static_cast<int>(brackets.size()) + 1);

    RootList out{p, RootSource::entire, m, prec, {}, {}, true};
    for (auto& b : brackets) {
        RootEnclosure e = detail::refine(value, deriv, b, prec);
        out.roots.push_back(e.lo.at_prec(prec) + (e.hi - e.lo).ldexp(-1));
        out.enclosures.push_back(std::move(e));
    }
    detail::check_descending_disjoint(out.enclosures);
    return out;
}

/// c_i = -1/a_i, descending. Entire source: tail_mass = 1 - sum c_i.
inline WeightSequence roots_to_weights(const RootList& roots) {
    const mpfr_prec_t prec = roots.precision_bits;
    WeightSequence out{roots.p, roots.source, roots.order, prec, {},
                       Real::of(0L, prec)};
    Real one = Real::of(1L, prec);
    Real sum = Real::of(0L, prec);
    for (const auto& a : roots.roots) {
        if (!(a < 0.0))
            throw InvalidParameterError("roots must be strictly negative");
        Real c = -(one / a);
        if (!out.weights.empty() && c > out.weights.back())
            throw CertificationError("weights are not descending");
        sum += c;
        out.weights.push_back(std::move(c));
    }
    if (roots.source == RootSource::entire) {
        Real tail = one - sum;
        Real tol = Real::pow2(-static_cast<long>(prec / 2), prec);
        if (tail < -tol)
            throw CertificationError("weight sum exceeds 1 by " +
                                     (-tail).to_string(8));
        out.tail_mass = tail < 0.0 ? Real::of(0L, prec) : tail;
    }
    return out;
}

struct SymmetricCheckRow {
    int j;
    Real sigma;
    Real target;   // p^C(j,2)/j!
    Real rel_dev;  // sigma/target - 1
};

/// sigma_j for j = 1..j_max via the coefficient-product recurrence on
/// prod(1 + c_i t), compared against p^C(j,2)/j!.
inline std::vector<SymmetricCheckRow> verify_elementary_symmetric(
    const WeightSequence& ws, int j_max) {
    if (j_max < 1 || j_max > static_cast<int>(ws.weights.size()))
        throw InvalidParameterError("j_max out of range");
    const mpfr_prec_t prec = ws.precision_bits;
    std::vector<Real> e(j_max + 1, Real::of(0L, prec));
    e[0] = Real::of(1L, prec);
    for (const auto& c : ws.weights)
        for (int t = j_max; t >= 1; --t) e[t] += e[t - 1] * c;

    std::vector<SymmetricCheckRow> rows;
    mpq_class target_q = 1, ppow = 1;
    for (int j = 1; j <= j_max; ++j) {
        target_q *= ppow;
        target_q /= j;
        ppow *= ws.p.rational();
        Real target = Real::of_rational(target_q, prec);
        rows.push_back({j, e[j], target, e[j] / target - Real::of(1L, prec)});
    }
    return rows;
}

struct MaxWeightBound {
    Real c1;
    Real lower_bound;  // 1 - p
    bool holds;
};

/// c_1 >= 1 - p, within 2^(-prec/2).
inline MaxWeightBound max_weight_bound_check(const WeightSequence& ws) {
    if (ws.weights.empty()) throw InvalidParameterError("empty weight sequence");
    const mpfr_prec_t prec = ws.precision_bits;
    Real bound = Real::of(1L, prec) - ws.p.real(prec);
    Real tol = Real::pow2(-static_cast<long>(prec / 2), prec);
    return {ws.weights.front(), bound, ws.weights.front() >= bound - tol};
}

}  // namespace pantograph::spectrum
