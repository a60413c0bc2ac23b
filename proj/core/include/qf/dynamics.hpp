#ifndef QF_DYNAMICS_HPP
#define QF_DYNAMICS_HPP

#include <vector>

#include "qf/integrals.hpp"

namespace qf {

/// One sampled state of a geodesic, with the conserved observables
/// re-evaluated at that state (same order as observable_set::names()).
struct trajectory_sample {
    double t = 0;
    phase_point state;
    std::vector<double> observables;
};

enum class flow_exit { time_end, range_exit, step_underflow, singular };
const char* flow_exit_name(flow_exit e);

struct flow_result {
    std::vector<trajectory_sample> samples;
    flow_exit exit = flow_exit::time_end;
    double t_final = 0;
    /// Max |G(t) - G(0)| / (|G(0)| + 1) per observable.
    std::vector<double> drift;
};

struct flow_options {
    double t_end = 10.0;
    double dt_sample = 0.01;
    double tol = 1e-12;
    /// Stop when x leaves [x_lo, x_hi]; defaults to the profile range.
    bool clip_to_profile = true;
};

/// Integrates the geodesic flow of H = h_x^2 (px^2 + py^2)/2 from init.
/// Carries the solution jet (h, h_x) as extra states, seeded from the
/// profile at init.x, so the right-hand side never differentiates the
/// interpolant.
flow_result integrate_flow(const metric_profile& prof, const phase_point& init,
                           const flow_options& opt);

/// Looks for the first return of the trajectory to its initial state.
struct closure_report {
    bool closed = false;
    double period = 0;
    double min_distance = 0; // scaled phase distance at the detected return
};
closure_report detect_closure(const flow_result& flow, double tol = 1e-6);

} // namespace qf

#endif
