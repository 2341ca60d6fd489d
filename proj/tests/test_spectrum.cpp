#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "pantograph/json_io.hpp"
#include "pantograph/rng.hpp"
#include "pantograph/spectrum.hpp"

using namespace pantograph;
using defexp::DensityParam;
using spectrum::RootSource;

namespace {

Real mkreal(const std::string& s, mpfr_prec_t prec = 256) {
    return Real::of_string(s, prec);
}

// frozen by an independent 80-digit bisection oracle on the series
const char* kRoot1P05 = "-1.488078545599710294656246031582357661894";
const char* kRoot10P05 = "-5223.380439502564290102";
const char* kRootsP09[3] = {"-4.940867619629087185115426",
                            "-6.787808027152865749187284",
                            "-8.833642900803726106923113"};
// roots of the degree-5 truncation at p = 1/4
const char* kRootsP025K5[5] = {
    "-1.1657706116102127693", "-8.5260411237112418182",
    "-49.706691973720376997", "-267.10897522485341463",
    "-953.49252106610475379"};

}  // namespace

TEST_CASE("asymptotic seeds") {
    auto p05 = DensityParam::parse("0.5");
    CHECK(spectrum::asymptotic_seed(1, p05).to_double() == -1.0);
    CHECK(spectrum::asymptotic_seed(3, p05).to_double() == -12.0);
    CHECK(spectrum::asymptotic_seed(2, DensityParam::parse("0.25")).to_double() ==
          -8.0);
    CHECK_THROWS_AS(spectrum::asymptotic_seed(0, p05), InvalidParameterError);
}

TEST_CASE("closed-form quadratic roots at p = 1/4") {
    auto p = DensityParam::parse("0.25");
    auto roots = spectrum::find_roots_truncated(p, 2, {.precision_bits = 256});
    REQUIRE(roots.roots.size() == 2);
    CHECK(roots.certified);

    mpfr_prec_t prec = roots.precision_bits;
    Real s2 = Real::of(2.0, prec).sqrt();
    Real a1 = s2.ldexp(1) - Real::of(4.0, prec);   // -4 + 2 sqrt(2)
    Real a2 = -(s2.ldexp(1) + Real::of(4.0, prec));
    CHECK((roots.roots[0] - a1).abs() < mkreal("1e-60"));
    CHECK((roots.roots[1] - a2).abs() < mkreal("1e-58"));

    auto ws = spectrum::roots_to_weights(roots);
    CHECK((ws.weights[0] - mkreal("0.8535533905932737622004222")).abs() <
          mkreal("1e-15"));
    CHECK((ws.weights[1] - mkreal("0.1464466094067262377995778")).abs() <
          mkreal("1e-15"));

    auto sig = spectrum::verify_elementary_symmetric(ws, 2);
    CHECK(sig[0].target == Real::of(1L, prec));
    CHECK(sig[0].rel_dev.abs() < mkreal("1e-25"));
    CHECK(sig[1].target == Real::of(0.125, prec));  // p/2 = 1/8 exactly
    CHECK(sig[1].rel_dev.abs() < mkreal("1e-25"));

    auto bound = spectrum::max_weight_bound_check(ws);
    CHECK(bound.holds);
    CHECK(bound.c1.to_double() > 0.85);
    CHECK(bound.lower_bound.to_double() == 0.75);
}

TEST_CASE("degree-5 truncation at p = 1/4") {
    auto p = DensityParam::parse("0.25");
    auto roots = spectrum::find_roots_truncated(p, 5, {.precision_bits = 256});
    REQUIRE(roots.roots.size() == 5);
    for (int i = 0; i < 5; ++i) {
        INFO("root " << i);
        CHECK((roots.roots[i] - mkreal(kRootsP025K5[i])).abs().to_double() <
              1e-10 * std::abs(roots.roots[i].to_double()));
    }
    SECTION("descending, negative, disjoint certified enclosures") {
        for (int i = 0; i < 5; ++i) {
            CHECK(roots.roots[i] < 0.0);
            CHECK(roots.enclosures[i].lo < roots.roots[i]);
            CHECK(roots.roots[i] < roots.enclosures[i].hi);
            Real width = roots.enclosures[i].hi - roots.enclosures[i].lo;
            CHECK(width <
                  Real::pow2(-static_cast<long>(roots.precision_bits / 2),
                             roots.precision_bits) *
                      roots.enclosures[i].hi.abs());
            if (i > 0) CHECK(roots.enclosures[i].hi < roots.enclosures[i - 1].lo);
        }
    }
    SECTION("constant-term product identity") {
        mpfr_prec_t prec = roots.precision_bits;
        Real prod = p.real(prec).pow_si(10) / 120ul;  // p^C(5,2)/5!
        for (const auto& a : roots.roots) prod *= -a;
        CHECK((prod - Real::of(1L, prec)).abs() < mkreal("1e-20"));
    }
    SECTION("sigma identities hold to 1e-20 and c1 >= 3/4") {
        auto ws = spectrum::roots_to_weights(roots);
        auto rows = spectrum::verify_elementary_symmetric(ws, 5);
        for (const auto& r : rows) {
            INFO("j = " << r.j);
            CHECK(r.rel_dev.abs() < mkreal("1e-20"));
        }
        CHECK(spectrum::max_weight_bound_check(ws).holds);
        CHECK(ws.weights[0].to_double() > 0.75);
    }
}

TEST_CASE("truncated route refuses p beyond the Kurtz range") {
    auto p = DensityParam::parse("0.6");
    CHECK_THROWS_AS(spectrum::find_roots_truncated(p, 4), CertificationError);

    SECTION("force collects the real roots uncertified") {
        auto roots = spectrum::find_roots_truncated(p, 4, {.force = true});
        CHECK_FALSE(roots.certified);
        CHECK(roots.roots.size() == 2);  // the quartic has two real roots
        for (const auto& a : roots.roots) CHECK(a < 0.0);
    }
}

TEST_CASE("entire-function roots") {
    SECTION("first root at p = 1/2") {
        auto roots = spectrum::find_roots_entire(DensityParam::parse("0.5"), 1,
                                                 {.precision_bits = 256});
        REQUIRE(roots.roots.size() == 1);
        CHECK((roots.roots[0] - mkreal(kRoot1P05)).abs() < mkreal("1e-35"));
    }
    SECTION("ten roots at p = 1/2 track the seeds") {
        auto p = DensityParam::parse("0.5");
        auto roots = spectrum::find_roots_entire(p, 10);
        REQUIRE(roots.roots.size() == 10);
        CHECK((roots.roots[9] - mkreal(kRoot10P05)).abs().to_double() < 1e-8);
        for (int i = 5; i <= 10; ++i) {
            double ratio = roots.roots[i - 1].to_double() /
                           spectrum::asymptotic_seed(i, p, 128).to_double();
            INFO("i = " << i);
            CHECK(ratio > 0.5);
            CHECK(ratio < 2.0);
        }
    }
    SECTION("three roots at p = 0.9, far from their seeds") {
        auto roots = spectrum::find_roots_entire(DensityParam::parse("0.9"), 3);
        REQUIRE(roots.roots.size() == 3);
        for (int i = 0; i < 3; ++i)
            CHECK((roots.roots[i] - mkreal(kRootsP09[i])).abs().to_double() < 1e-12);
    }
    SECTION("soft factor-4 seed window for i >= 5") {
        for (const char* ps : {"0.3", "0.5", "0.7"}) {
            auto p = DensityParam::parse(ps);
            auto roots = spectrum::find_roots_entire(p, 8);
            for (int i = 5; i <= 8; ++i) {
                double ratio = roots.roots[i - 1].to_double() /
                               spectrum::asymptotic_seed(i, p, 128).to_double();
                INFO("p = " << ps << ", i = " << i);
                CHECK(ratio > 0.25);
                CHECK(ratio < 4.0);
            }
        }
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(spectrum::find_roots_entire(DensityParam::parse("1"), 2),
                        InvalidParameterError);
        CHECK_THROWS_AS(spectrum::find_roots_entire(DensityParam::parse("0.5"), 0),
                        InvalidParameterError);
    }
}

TEST_CASE("roots to weights") {
    SECTION("single synthetic root") {
        spectrum::RootList rl{DensityParam::parse("0.5"),
                              RootSource::truncated,
                              1,
                              128,
                              {Real::of(-1.0, 128)},
                              {},
                              true};
        auto ws = spectrum::roots_to_weights(rl);
        CHECK(ws.weights.size() == 1);
        CHECK(ws.weights[0] == Real::of(1L, 128));
        CHECK(ws.tail_mass.is_zero());
    }
    SECTION("positive roots are rejected") {
        spectrum::RootList rl{DensityParam::parse("0.5"),
                              RootSource::truncated,
                              1,
                              128,
                              {Real::of(2.0, 128)},
                              {},
                              true};
        CHECK_THROWS_AS(spectrum::roots_to_weights(rl), InvalidParameterError);
    }
    SECTION("forty entire roots leave < 1e-9 tail mass") {
        auto roots = spectrum::find_roots_entire(DensityParam::parse("0.5"), 40);
        auto ws = spectrum::roots_to_weights(roots);
        CHECK(ws.tail_mass.to_double() < 1e-9);
        CHECK(ws.tail_mass.to_double() < 1e-12);  // actually ~4e-14
        CHECK(ws.tail_mass > 0.0);
        for (size_t i = 1; i < ws.weights.size(); ++i)
            CHECK(ws.weights[i] <= ws.weights[i - 1]);

        auto rows = spectrum::verify_elementary_symmetric(ws, 5);
        CHECK(rows[4].target.to_double() == Catch::Approx(8.138020833e-6).epsilon(1e-9));
        CHECK(rows[4].rel_dev.abs().to_double() < 1e-6);

        auto bound = spectrum::max_weight_bound_check(ws);
        CHECK(bound.holds);
        CHECK(bound.c1.to_double() == Catch::Approx(0.67200753814845852864).epsilon(1e-12));
    }
}

TEST_CASE("product over (1 + c_i x) reconstructs the function") {
    SeededRng rng(5150);
    SECTION("truncated source") {
        auto p = DensityParam::parse("0.25");
        auto roots = spectrum::find_roots_truncated(p, 6, {.precision_bits = 320});
        auto ws = spectrum::roots_to_weights(roots);
        auto cs = defexp::truncated_coefficients(p, 6, 320);
        mpfr_prec_t prec = roots.precision_bits;
        for (int t = 0; t < 10; ++t) {
            Real x = Real::of(rng.uniform01(), prec);
            Real prod = Real::of(1L, prec);
            for (const auto& c : ws.weights)
                prod *= Real::of(1L, prec) + c * x;
            Real direct = defexp::eval_truncated(cs, x);
            CHECK(((prod - direct) / direct).abs() < mkreal("1e-30"));
        }
    }
    SECTION("entire source") {
        auto p = DensityParam::parse("0.5");
        auto roots = spectrum::find_roots_entire(p, 40);
        auto ws = spectrum::roots_to_weights(roots);
        mpfr_prec_t prec = roots.precision_bits;
        for (int t = 0; t < 10; ++t) {
            Real x = Real::of(rng.uniform01(), prec);
            Real prod = Real::of(1L, prec);
            for (const auto& c : ws.weights)
                prod *= Real::of(1L, prec) + c * x;
            Real direct = defexp::eval_deformed_exp(p, x, mkreal("1e-40"));
            // the dropped factors contribute at most exp(x * tail_mass) - 1
            CHECK(((prod - direct) / direct).abs().to_double() < 1e-12);
        }
    }
}

TEST_CASE("root table JSON round trip") {
    auto p = DensityParam::parse("0.25");
    auto roots = spectrum::find_roots_truncated(p, 3, {.precision_bits = 192});
    auto ws = spectrum::roots_to_weights(roots);
    auto j = io::root_table_json(roots, ws, 3);

    CHECK(j["p"] == "0.25");
    CHECK(j["source"]["type"] == "truncated");
    CHECK(j["source"]["k"] == 3);
    CHECK(j["roots"].size() == 3);
    CHECK(j["sigma_check"].size() == 3);

    auto ws2 = io::weight_sequence_from_json(j);
    REQUIRE(ws2.weights.size() == ws.weights.size());
    for (size_t i = 0; i < ws.weights.size(); ++i)
        CHECK(ws2.weights[i] == ws.weights[i]);  // decimal rendering is lossless
    CHECK(ws2.source == RootSource::truncated);
    CHECK(ws2.tail_mass.is_zero());
}
