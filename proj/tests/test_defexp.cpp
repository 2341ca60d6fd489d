#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "pantograph/defexp.hpp"
#include "pantograph/rng.hpp"

using namespace pantograph;
using defexp::DensityParam;

namespace {

Real mkreal(const std::string& s, mpfr_prec_t prec = 256) {
    return Real::of_string(s, prec);
}

bool close_abs(const Real& a, const Real& b, const Real& tol) {
    return (a - b).abs() <= tol;
}

// partial-sum values computed independently with a 120-digit interval oracle
const char* kF05At1 = "2.271492555501061487428540588817616440048";
const char* kF05AtMinus1 = "0.229809612603506979367801607940926145779";
const char* kF03At27 = "4.88369482049900065048669546787497801242";
const char* kEuler = "2.718281828459045235360287471352662497757";

}  // namespace

TEST_CASE("Real round trips decimal strings") {
    Real x = mkreal("0.25");
    CHECK(x.to_double() == 0.25);
    Real y = Real::of_string(x.to_string(), 256);
    CHECK(x == y);
    CHECK(Real::pow2(-10, 128).to_double() == std::ldexp(1.0, -10));
    CHECK(Real(64).prec() == 64);
    CHECK(Real(16).prec() == 64);  // floor clamps
}

TEST_CASE("Interval arithmetic brackets exact results") {
    mpq_class third(1, 3);
    Interval t = Interval::of_rational(third, 64);
    CHECK(t.lo() < t.hi());
    CHECK(t.sign() == 1);
    Interval nine = t * t * Interval::point(Real::of(9.0, 64));
    // 9 * (1/3)^2 = 1 must lie inside
    CHECK(nine.lo() <= 1.0);
    CHECK(nine.hi() >= 1.0);
    CHECK((t - t).contains_zero());
    CHECK(Interval::symmetric(Real::of(2.0, 64)).width().to_double() == 4.0);
}

TEST_CASE("density parameter parsing") {
    CHECK(DensityParam::parse("0.25").rational() == mpq_class(1, 4));
    CHECK(DensityParam::parse("0.05").rational() == mpq_class(1, 20));
    CHECK(DensityParam::parse("1").is_one());
    CHECK_THROWS_AS(DensityParam::parse("0"), InvalidParameterError);
    CHECK_THROWS_AS(DensityParam::parse("1.5"), InvalidParameterError);
    CHECK_THROWS_AS(DensityParam::parse("-0.5"), InvalidParameterError);
    CHECK_THROWS_AS(DensityParam::parse("abc"), InvalidParameterError);
    CHECK(DensityParam::parse("0.3").decimal() == "0.3");
}

TEST_CASE("series evaluation matches reference values") {
    Real err = mkreal("1e-12");

    SECTION("p = 1 reduces to the exponential") {
        auto p = DensityParam::parse("1");
        Real v = defexp::eval_deformed_exp(p, mkreal("1"), err);
        CHECK(close_abs(v, mkreal(kEuler), err));
    }
    SECTION("constant term at x = 0") {
        auto p = DensityParam::parse("0.5");
        Real v = defexp::eval_deformed_exp(p, mkreal("0"), err);
        CHECK(v == Real::of(1L, 256));
    }
    SECTION("high-precision value at p = 1/2, x = 1") {
        auto p = DensityParam::parse("0.5");
        Real tight = mkreal("1e-20");
        Real v = defexp::eval_deformed_exp(p, mkreal("1"), tight);
        CHECK(close_abs(v, mkreal(kF05At1), tight));
    }
    SECTION("negative argument") {
        auto p = DensityParam::parse("0.5");
        Real v = defexp::eval_deformed_exp(p, mkreal("-1"), mkreal("1e-25"));
        CHECK(close_abs(v, mkreal(kF05AtMinus1), mkreal("1e-25")));
    }
    SECTION("p = 0.3 at x = 2.7") {
        auto p = DensityParam::parse("0.3");
        Real v = defexp::eval_deformed_exp(p, mkreal("2.7"), mkreal("1e-30"));
        CHECK(close_abs(v, mkreal(kF03At27), mkreal("1e-30")));
    }
    SECTION("rejects bad tolerance and hits the term cap") {
        auto p = DensityParam::parse("1");
        CHECK_THROWS_AS(defexp::eval_deformed_exp(p, mkreal("1"), mkreal("0")),
                        InvalidParameterError);
        CHECK_THROWS_AS(
            defexp::eval_deformed_exp(p, mkreal("500"), err, /*term_cap=*/100),
            NonconvergenceError);
    }
}

TEST_CASE("series is positive and increasing on x >= 0") {
    auto p = DensityParam::parse("0.35");
    Real err = mkreal("1e-30");
    Real prev = Real::of(0.0, 256);
    for (double x = 0.0; x <= 12.0; x += 0.75) {
        Real v = defexp::eval_deformed_exp(p, Real::of(x, 256), err);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("truncated coefficients") {
    SECTION("simple values") {
        auto cs = defexp::truncated_coefficients(DensityParam::parse("0.25"), 2);
        REQUIRE(cs.coeffs.size() == 3);
        CHECK(cs.exact[0] == 1);
        CHECK(cs.exact[1] == 1);
        CHECK(cs.exact[2] == mpq_class(1, 8));

        auto cs3 = defexp::truncated_coefficients(DensityParam::parse("0.5"), 3);
        CHECK(cs3.exact[2] == mpq_class(1, 8));
        CHECK(cs3.exact[3] == mpq_class(1, 48));
    }
    SECTION("b_10 at p = 1/4, cross-checked two ways") {
        auto cs = defexp::truncated_coefficients(DensityParam::parse("0.25"), 10);
        mpq_class b10 = cs.exact[10];
        // exact rational: 4^-45 / 10!
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 4, 45);
        mpz_class fact10 = 3628800;
        CHECK(b10 == mpq_class(1) / (mpq_class(den) * fact10));
        // logarithm accumulation: log2 b10 = -45 log2 4 - log2 10!
        double log2_b10 = -45.0 * 2.0;
        for (int i = 2; i <= 10; ++i) log2_b10 -= std::log2(i);
        Real lg(256);
        mpfr_log2(lg.raw(), cs.coeffs[10].raw(), MPFR_RNDN);
        CHECK(std::abs(lg.to_double() - log2_b10) < 1e-9);
    }
    SECTION("working precision scales with the smallest coefficient") {
        auto p = DensityParam::parse("0.05");
        CHECK(defexp::precision_floor(p, 30) >=
              static_cast<mpfr_prec_t>(0.5 * 30 * 29 * std::log2(20.0)));
        CHECK(defexp::precision_floor(DensityParam::parse("0.5"), 3) == 128);
    }
    SECTION("k < 2 is rejected") {
        CHECK_THROWS_AS(defexp::truncated_coefficients(DensityParam::parse("0.5"), 1),
                        InvalidParameterError);
    }
}

TEST_CASE("truncated evaluation") {
    auto cs = defexp::truncated_coefficients(DensityParam::parse("0.25"), 2);
    SECTION("direct values") {
        CHECK(defexp::eval_truncated(cs, mkreal("2")).to_double() == 3.5);
        CHECK(defexp::eval_truncated(cs, mkreal("0")) == Real::of(1L, 256));
    }
    SECTION("vanishes at the closed-form quadratic root") {
        mpfr_prec_t prec = cs.coeffs.front().prec();
        Real root = Real::of(2.0, prec).sqrt().ldexp(1) - Real::of(4.0, prec);
        Real v = defexp::eval_truncated(cs, root);
        CHECK(v.abs() <= Real::pow2(-static_cast<long>(prec / 2), prec));
    }
}

TEST_CASE("truncation is consistent with the full series") {
    SeededRng rng(2024);
    Real eps = mkreal("1e-25");
    for (int trial = 0; trial < 24; ++trial) {
        double pd = 0.05 + 0.9 * rng.uniform01();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", pd);
        auto p = DensityParam::parse(buf);
        int k = 2 + static_cast<int>(rng.uniform_below(12));
        double xd = -6.0 + 12.0 * rng.uniform01();
        Real x = Real::of(xd, 256);

        Real full = defexp::eval_deformed_exp(p, x, eps);
        auto cs = defexp::truncated_coefficients(p, k);
        Real trunc = defexp::eval_truncated(cs, x.at_prec(cs.coeffs.front().prec()));

        // tail bound sum_{j>k} |x|^j p^C(j,2) / j!
        mpfr_prec_t prec = 256;
        Real tail = Real::of(0L, prec);
        Real term = Real::of(1L, prec);
        Real ax = x.abs().at_prec(prec);
        Real pr = p.real(prec);
        Real pw = Real::of(1L, prec);
        for (int j = 0; j < k + 220; ++j) {
            if (j > k) tail += term;
            term = term * ax * pw / static_cast<unsigned long>(j + 1);
            pw = pw * pr;
        }
        CHECK((full - trunc).abs() <= eps + tail + mkreal("1e-40"));
    }
}

TEST_CASE("pantograph residual vanishes") {
    SECTION("stated examples") {
        Real err = mkreal("1e-12");
        Real r1 = defexp::pantograph_residual(DensityParam::parse("1"), mkreal("1"), err);
        CHECK(r1.abs() < err.ldexp(1));
        Real r2 = defexp::pantograph_residual(DensityParam::parse("0.5"), mkreal("0"), err);
        CHECK(r2.abs() < err.ldexp(1));
        Real tight = mkreal("1e-18");
        Real r3 = defexp::pantograph_residual(DensityParam::parse("0.3"), mkreal("2.7"), tight);
        CHECK(r3.abs() < tight.ldexp(1));
    }
    SECTION("randomized sweep over p in (0,1], |x| <= 10") {
        SeededRng rng(77);
        Real err = mkreal("1e-18");
        for (int trial = 0; trial < 40; ++trial) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.5f",
                          0.01 + 0.99 * rng.uniform01());
            auto p = trial == 0 ? DensityParam::parse("1")
                                : DensityParam::parse(buf);
            Real x = Real::of(-10.0 + 20.0 * rng.uniform01(), 256);
            Real r = defexp::pantograph_residual(p, x, err);
            CHECK(r.abs() < err.ldexp(1));
        }
    }
}

TEST_CASE("Kurtz criterion") {
    SECTION("holds for p <= 1/4") {
        for (const char* ps : {"0.05", "0.1", "0.15", "0.2", "0.25"}) {
            auto cs = defexp::truncated_coefficients(DensityParam::parse(ps), 50);
            auto kz = defexp::kurtz_check(cs);
            INFO("p = " << ps);
            CHECK(kz.holds);
        }
    }
    SECTION("first failure matches 1/j > 4p/(j+1)") {
        auto k06 = defexp::kurtz_check(
            defexp::truncated_coefficients(DensityParam::parse("0.3"), 6));
        CHECK_FALSE(k06.holds);
        CHECK(k06.first_failure == 5);

        auto k026 = defexp::kurtz_check(
            defexp::truncated_coefficients(DensityParam::parse("0.26"), 30));
        CHECK_FALSE(k026.holds);
        CHECK(k026.first_failure == 25);

        auto k05 = defexp::kurtz_check(
            defexp::truncated_coefficients(DensityParam::parse("0.5"), 4));
        CHECK_FALSE(k05.holds);
        CHECK(k05.first_failure == 1);
    }
    SECTION("boundary case (1+x)^2 fails the strict inequality") {
        std::vector<Real> sq = {mkreal("1"), mkreal("2"), mkreal("1")};
        auto kz = defexp::kurtz_check(sq);
        CHECK_FALSE(kz.holds);
        CHECK(kz.first_failure == 1);
        CHECK(kz.inconclusive);  // 4 > 4 sits exactly on the guard band
    }
    SECTION("generic list with a decisive failure") {
        std::vector<Real> cs = {mkreal("1"), mkreal("1"), mkreal("1")};
        auto kz = defexp::kurtz_check(cs);
        CHECK_FALSE(kz.holds);
        CHECK(kz.first_failure == 1);
        CHECK_FALSE(kz.inconclusive);
    }
    SECTION("generic list that passes") {
        std::vector<Real> cs = {mkreal("1"), mkreal("1"), mkreal("0.125")};
        CHECK(defexp::kurtz_check(cs).holds);
    }
    SECTION("positivity is required") {
        std::vector<Real> bad = {mkreal("1"), mkreal("-1"), mkreal("1")};
        CHECK_THROWS_AS(defexp::kurtz_check(bad), InvalidParameterError);
    }
}
