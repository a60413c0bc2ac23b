#include <doctest.h>

#include <cmath>
#include <random>

#include "qf/curve.hpp"
#include "qf/params.hpp"

using namespace qf;

namespace {

parameter_set make(case_tag tag, double mu, std::array<double, 7> A) {
    parameter_set p;
    p.tag = tag;
    p.mu = mu;
    p.A = A;
    return p;
}

symmetry_transform random_transform(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    symmetry_transform t;
    t.x_flip = u(rng) > 0;
    t.y_flip = u(rng) > 0;
    t.x_scale = 0.5 + std::abs(u(rng));
    t.x_shift = 0.4 * u(rng);
    t.gauge_shift = 0.6 * u(rng);
    t.metric_dilation = 0.7 + 0.6 * std::abs(u(rng));
    t.homogeneity = 0.5 + std::abs(u(rng));
    return t;
}

parameter_set random_params(case_tag tag, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    parameter_set p;
    p.tag = tag;
    p.mu = (tag == case_tag::linear) ? 1.0 : 0.5 + std::abs(u(rng));
    for (auto& a : p.A) a = u(rng);
    p.A[0] += (p.A[0] >= 0 ? 0.5 : -0.5); // keep A0 away from zero
    p.A[3] += (p.A[3] >= 0 ? 0.5 : -0.5);
    return p;
}

void check_close(const parameter_set& a, const parameter_set& b, double tol) {
    CHECK(a.tag == b.tag);
    CHECK(a.mu == doctest::Approx(b.mu).epsilon(tol));
    for (int k = 0; k <= 6; ++k)
        CHECK(a.a(k) == doctest::Approx(b.a(k)).epsilon(tol).scale(1.0));
}

} // namespace

TEST_CASE("validate rejects the zero tuple and nonpositive frequencies") {
    CHECK_THROWS_AS(validate(make(case_tag::trig, 1.0, {0, 0, 0, 0, 0, 0, 0})), error);
    try {
        validate(make(case_tag::trig, 1.0, {0, 0, 0, 0, 0, 0, 0}));
    } catch (const error& e) {
        CHECK(e.code() == errc::all_zero_parameters);
    }
    try {
        validate(make(case_tag::hyper, -2.0, {1, 0, 0, 1, 0, 0, 0}));
        CHECK(false);
    } catch (const error& e) {
        CHECK(e.code() == errc::nonpositive_mu);
    }
    // the linear family has no frequency; mu is ignored
    CHECK_NOTHROW(validate(make(case_tag::linear, 0.0, {1, 0, 0, 0, 1, 0, 0})));
}

TEST_CASE("case names round-trip") {
    for (case_tag tag : {case_tag::trig, case_tag::hyper, case_tag::linear})
        CHECK(case_from_name(case_name(tag)) == tag);
    CHECK_THROWS_AS(case_from_name("elliptic"), error);
}

TEST_CASE("scaling the integral scales the constants with their weights") {
    const parameter_set p = make(case_tag::trig, 1.0, {1, 1, 1, 1, 1, 1, 1});
    symmetry_transform t;
    t.homogeneity = 2.0;
    const parameter_set q = apply_symmetry(t, p);
    check_close(q, make(case_tag::trig, 1.0, {2, 2, 2, 2, 2, 4, 4}), 1e-14);
}

TEST_CASE("group law: composed action equals sequential action") {
    std::mt19937_64 rng(11);
    for (case_tag tag : {case_tag::trig, case_tag::hyper, case_tag::linear})
        for (int rep = 0; rep < 50; ++rep) {
            const parameter_set p = random_params(tag, rng);
            const symmetry_transform t1 = random_transform(rng);
            const symmetry_transform t2 = random_transform(rng);
            const parameter_set seq = apply_symmetry(t2, apply_symmetry(t1, p));
            const parameter_set cmp = apply_symmetry(compose(t2, t1), p);
            check_close(seq, cmp, 1e-11);
        }
}

TEST_CASE("group law: inverse undoes the action") {
    std::mt19937_64 rng(12);
    for (case_tag tag : {case_tag::trig, case_tag::hyper, case_tag::linear})
        for (int rep = 0; rep < 50; ++rep) {
            const parameter_set p = random_params(tag, rng);
            const symmetry_transform t = random_transform(rng);
            check_close(apply_symmetry(inverse(t), apply_symmetry(t, p)), p, 1e-11);
            check_close(apply_symmetry(compose(inverse(t), t), p), p, 1e-11);
        }
}

TEST_CASE("solutions map to solutions: pushed seeds stay on the curve") {
    std::mt19937_64 rng(13);
    for (case_tag tag : {case_tag::trig, case_tag::hyper, case_tag::linear})
        for (int rep = 0; rep < 40; ++rep) {
            parameter_set p = random_params(tag, rng);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            curve_point seed{0.3 * u(rng), u(rng), 1.0 + 0.5 * u(rng)};
            const auto [A5, A6] = derive_A5_A6(p, seed);
            p.A[5] = A5;
            p.A[6] = A6;
            CHECK(std::abs(residual_E1(seed, p)) < 1e-12);
            CHECK(std::abs(residual_E2(seed, p)) < 1e-12);

            const symmetry_transform t = random_transform(rng);
            const parameter_set q = apply_symmetry(t, p);
            curve_point moved = seed;
            push_point(t, moved.x, moved.h, moved.p);
            CHECK(std::abs(residual_E1(moved, q)) < 1e-9);
            CHECK(std::abs(residual_E2(moved, q)) < 1e-9);
        }
}

TEST_CASE("zero scales are rejected") {
    symmetry_transform t;
    t.x_scale = 0.0;
    CHECK_THROWS_AS(apply_symmetry(t, make(case_tag::trig, 1.0, {1, 0, 0, 1, 0, 0, 0})), error);
}

TEST_CASE("trig normal form") {
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 30; ++rep) {
        const parameter_set p = random_params(case_tag::trig, rng);
        const normal_form_result nf = normalize(p);
        CHECK(!nf.degenerate13);
        CHECK(nf.params.mu == doctest::Approx(1.0));
        CHECK(std::abs(nf.params.a(4)) < 1e-12);
        CHECK(nf.params.a(3) == doctest::Approx(1.0));
        CHECK(std::abs(nf.params.a(1)) < 1e-12);
        CHECK(std::abs(std::abs(nf.params.a(0)) - 1.0) < 1e-12);
        check_close(apply_symmetry(nf.transform, p), nf.params, 1e-10);
    }
}

TEST_CASE("hyper normal form subcases") {
    // cosh-dominant pair
    normal_form_result nf =
        normalize(make(case_tag::hyper, 2.0, {1.0, 0.3, -0.2, 2.0, 1.0, 0.1, 0.4}));
    CHECK(nf.params.mu == doctest::Approx(1.0));
    CHECK(std::abs(nf.params.a(4)) < 1e-12);
    CHECK(nf.params.a(3) == doctest::Approx(1.0));

    // sinh-dominant pair
    nf = normalize(make(case_tag::hyper, 2.0, {1.0, 0.3, -0.2, 0.5, 3.0, 0.1, 0.4}));
    CHECK(std::abs(nf.params.a(3)) < 1e-12);
    CHECK(nf.params.a(4) == doctest::Approx(1.0));

    // balanced pair collapses to the exponential subcase A3 e^x
    nf = normalize(make(case_tag::hyper, 2.0, {1.0, 0.3, -0.2, 1.4, 2.8, 0.1, 0.4}));
    CHECK(nf.params.a(4) == doctest::Approx(nf.params.a(3) * nf.params.mu));
}

TEST_CASE("linear normal form") {
    const parameter_set p = make(case_tag::linear, 1.0, {2.0, 0.5, -0.3, 0.7, 1.6, 0.2, 0.9});
    const normal_form_result nf = normalize(p);
    CHECK(!nf.degenerate13);
    CHECK(std::abs(nf.params.a(3)) < 1e-12);
    CHECK(nf.params.a(4) == doctest::Approx(1.0));
    CHECK(std::abs(nf.params.a(1)) < 1e-12);
    CHECK(std::abs(std::abs(nf.params.a(0)) - 1.0) < 1e-12);
    check_close(apply_symmetry(nf.transform, p), nf.params, 1e-10);
}

TEST_CASE("vanishing leading constant flags the degenerate family") {
    const normal_form_result nf =
        normalize(make(case_tag::trig, 1.0, {0.0, 0.5, -0.3, 0.7, 1.6, 0.2, 0.9}));
    CHECK(nf.degenerate13);
}

TEST_CASE("normalized solutions stay on the normalized curve") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (case_tag tag : {case_tag::trig, case_tag::hyper, case_tag::linear})
        for (int rep = 0; rep < 25; ++rep) {
            parameter_set p = random_params(tag, rng);
            curve_point seed{0.2 * u(rng), u(rng), 1.0 + 0.4 * std::abs(u(rng))};
            const auto [A5, A6] = derive_A5_A6(p, seed);
            p.A[5] = A5;
            p.A[6] = A6;
            const normal_form_result nf = normalize(p);
            curve_point moved = seed;
            push_point(nf.transform, moved.x, moved.h, moved.p);
            CHECK(std::abs(residual_E1(moved, nf.params)) < 1e-8);
            CHECK(std::abs(residual_E2(moved, nf.params)) < 1e-8);
        }
}
