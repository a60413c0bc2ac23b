#include <doctest.h>

#include <cmath>

#include "qf/dynamics.hpp"

using namespace qf;

namespace {

parameter_set make(case_tag tag, double mu, std::array<double, 7> A) {
    parameter_set p;
    p.tag = tag;
    p.mu = mu;
    p.A = A;
    return p;
}

metric_profile trig_profile() {
    return trace_profile(make(case_tag::trig, 1.0, {1, 0, 0, 1, 0, 0, 0}), {0.0, 1.0, 1.0}, -0.4,
                         1.0, 1e-12);
}

// h = sinh x solves the member mu=1, A=(0,1,0,1,0,3,12); its metric
// sech^2 x (dx^2 + dy^2) is the unit round sphere in Mercator form. The
// defining cubic has a double root at x = 0 (the equator), so the trace is
// kept to one side of it; the flow itself carries its own jet and crosses.
metric_profile sphere_member() {
    const double x0 = 0.5;
    return trace_profile(make(case_tag::hyper, 1.0, {0, 1, 0, 1, 0, 0, 0}),
                         {x0, std::sinh(x0), std::cosh(x0)}, 0.05, 2.0, 1e-12);
}

} // namespace

TEST_CASE("flow options are validated") {
    const metric_profile prof = trig_profile();
    flow_options opt;
    opt.t_end = -1.0;
    CHECK_THROWS_AS(integrate_flow(prof, {0.2, 0, 1, 0.5}, opt), error);
    opt = flow_options{};
    opt.tol = 0.0;
    CHECK_THROWS_AS(integrate_flow(prof, {0.2, 0, 1, 0.5}, opt), error);
}

TEST_CASE("the sinh-member trace stops at the equatorial double root") {
    const double x0 = 0.5;
    const metric_profile prof =
        trace_profile(make(case_tag::hyper, 1.0, {0, 1, 0, 1, 0, 0, 0}),
                      {x0, std::sinh(x0), std::cosh(x0)}, -2.0, 2.0, 1e-12);
    CHECK(prof.stop_lo == stop_reason::branch_collision);
    CHECK(prof.stop_hi == stop_reason::range_end);
    CHECK(prof.x_min() < 0.01);
}

TEST_CASE("conserved observables stay conserved along the flow") {
    const metric_profile prof = trig_profile();
    flow_options opt;
    opt.t_end = 1.5;
    const flow_result flow = integrate_flow(prof, {0.3, 0.0, 0.2, 1.1}, opt);
    CHECK(flow.exit == flow_exit::time_end);
    REQUIRE(flow.drift.size() == 4);
    for (double d : flow.drift) CHECK(d < 1e-10);
}

TEST_CASE("leaving the traced window stops the flow") {
    const metric_profile prof = trig_profile();
    flow_options opt;
    opt.t_end = 10.0;
    const flow_result flow = integrate_flow(prof, {0.9, 0.0, 1.0, 0.05}, opt);
    CHECK(flow.exit == flow_exit::range_exit);
    CHECK(flow.t_final < 10.0);
    CHECK(flow.samples.back().state.x > 1.0);
}

TEST_CASE("the flow is reversible") {
    const metric_profile prof = trig_profile();
    flow_options opt;
    opt.t_end = 1.2;
    const flow_result fwd = integrate_flow(prof, {0.3, 0.0, 0.2, 1.1}, opt);
    REQUIRE(fwd.exit == flow_exit::time_end);
    phase_point turn = fwd.samples.back().state;
    turn.px = -turn.px;
    turn.py = -turn.py;
    const flow_result bwd = integrate_flow(prof, turn, opt);
    REQUIRE(bwd.exit == flow_exit::time_end);
    const phase_point& end = bwd.samples.back().state;
    CHECK(end.x == doctest::Approx(0.3).epsilon(1e-8).scale(1.0));
    CHECK(end.y == doctest::Approx(0.0).epsilon(1e-8).scale(1.0));
    CHECK(end.px == doctest::Approx(-0.2).epsilon(1e-8).scale(1.0));
    CHECK(end.py == doctest::Approx(-1.1).epsilon(1e-8).scale(1.0));
}

TEST_CASE("great circles on the round-sphere member close up") {
    const metric_profile prof = sphere_member();
    CHECK(prof.params.a(5) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(prof.params.a(6) == doctest::Approx(12.0).epsilon(1e-10));

    const phase_point init{0.5, 0.0, 0.3, 1.0};
    const double p0 = std::cosh(0.5);
    const double two_H = p0 * p0 * (init.px * init.px + init.py * init.py);
    const double expected_period = 2.0 * M_PI / std::sqrt(two_H);

    flow_options opt;
    opt.t_end = 2.2 * expected_period;
    opt.dt_sample = 0.005;
    opt.clip_to_profile = false; // the orbit crosses the equator
    flow_result flow = integrate_flow(prof, init, opt);
    REQUIRE(flow.exit == flow_exit::time_end);
    for (double d : flow.drift) CHECK(d < 1e-9);

    // y is an angle on the sphere: one revolution advances it by 2*pi
    for (trajectory_sample& s : flow.samples)
        s.state.y -= 2.0 * M_PI * std::round((s.state.y - init.y) / (2.0 * M_PI));
    const closure_report rep = detect_closure(flow, 1e-4);
    CHECK(rep.closed);
    CHECK(rep.period == doctest::Approx(expected_period).epsilon(1e-4));
}

TEST_CASE("generic orbits do not close") {
    const metric_profile prof = trig_profile();
    flow_options opt;
    opt.t_end = 1.5;
    const flow_result flow = integrate_flow(prof, {0.3, 0.0, 0.2, 1.1}, opt);
    const closure_report rep = detect_closure(flow, 1e-6);
    CHECK(!rep.closed);
    CHECK(rep.min_distance > 1e-3);
}
