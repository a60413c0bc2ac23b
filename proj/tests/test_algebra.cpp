#include <doctest.h>

#include <cmath>

#include "qf/algebra.hpp"

using namespace qf;

namespace {

parameter_set make(case_tag tag, double mu, std::array<double, 7> A) {
    parameter_set p;
    p.tag = tag;
    p.mu = mu;
    p.A = A;
    return p;
}

double coeff_of(const std::vector<relation_term>& terms, int h_pow, int l_pow) {
    for (const relation_term& t : terms)
        if (t.h_pow == h_pow && t.l_pow == l_pow) return t.coeff;
    FAIL("missing term");
    return 0.0;
}

metric_profile trig_profile() {
    return trace_profile(make(case_tag::trig, 1.0, {1, 0, 0, 1, 0, 0, 0}), {0.0, 1.0, 1.0}, -0.4,
                         1.0, 1e-12);
}

metric_profile hyper_profile() {
    return trace_profile(make(case_tag::hyper, 1.0, {1, 0, 0, 1, 0, 0, 0}), {0.1, 0.6, 0.9},
                         -0.3, 1.0, 1e-12);
}

} // namespace

TEST_CASE("closed-form relation coefficients match the reference table") {
    const parameter_set p = make(case_tag::trig, 2.0, {1, -1, 0.5, 2, 3, 0.25, 4});
    const polynomial_relation rel = relation_coefficients(p);
    REQUIRE(rel.bracket_terms.size() == 4);
    REQUIRE(rel.product_terms.size() == 5);
    CHECK(coeff_of(rel.bracket_terms, 3, 1) == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(coeff_of(rel.bracket_terms, 2, 3) == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(coeff_of(rel.bracket_terms, 1, 5) == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(coeff_of(rel.bracket_terms, 0, 7) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(coeff_of(rel.product_terms, 4, 0) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(coeff_of(rel.product_terms, 3, 2) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(coeff_of(rel.product_terms, 2, 4) == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(coeff_of(rel.product_terms, 1, 6) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(coeff_of(rel.product_terms, 0, 8) == doctest::Approx(-6.25).epsilon(1e-14));
}

TEST_CASE("the linear family has no closed pair relation") {
    CHECK_THROWS_AS(relation_coefficients(make(case_tag::linear, 1.0, {1, 0, 0, 0, 1, 0, 0})),
                    error);
}

TEST_CASE("phase samples are deterministic and in range") {
    const metric_profile prof = trig_profile();
    const auto a = sample_phase_points(prof, 16, 7);
    const auto b = sample_phase_points(prof, 16, 7);
    REQUIRE(a.size() == 16);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].py == b[i].py);
        CHECK(a[i].x > prof.x_min());
        CHECK(a[i].x < prof.x_max());
    }
}

TEST_CASE("bracket identity closes on traced profiles") {
    for (const observable_set obs :
         {observable_set(trig_profile()), observable_set(hyper_profile())}) {
        const auto pts = sample_phase_points(obs.profile(), 24, 31);
        const identity_report rep = verify_bracket_identity(obs, pts);
        CHECK(rep.n_points == 24);
        // interpolation error of the profile limits the closure
        CHECK(rep.max_residual < 1e-8);
    }
}

TEST_CASE("product identity closes on traced profiles") {
    for (const observable_set obs :
         {observable_set(trig_profile()), observable_set(hyper_profile())}) {
        const auto pts = sample_phase_points(obs.profile(), 24, 32);
        const identity_report rep = verify_product_identity(obs, pts);
        // degree-8 products amplify the interpolation error of the profile
        CHECK(rep.max_residual < 1e-8);
    }
}

TEST_CASE("identities fail on corrupted constants") {
    metric_profile prof = trig_profile();
    prof.params.A[6] += 0.3;
    const observable_set obs(prof);
    const auto pts = sample_phase_points(obs.profile(), 16, 33);
    CHECK(verify_bracket_identity(obs, pts).max_residual > 1e-5);
    CHECK(verify_product_identity(obs, pts).max_residual > 1e-5);
}

TEST_CASE("analytic brackets agree with central differences everywhere") {
    for (const observable_set obs :
         {observable_set(trig_profile()), observable_set(hyper_profile())}) {
        const auto pts = sample_phase_points(obs.profile(), 8, 34);
        CHECK(check_bracket_consistency(obs, pts) < 1e-5);
    }
}
