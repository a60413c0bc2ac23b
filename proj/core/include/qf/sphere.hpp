#ifndef QF_SPHERE_HPP
#define QF_SPHERE_HPP

#include <vector>

#include "qf/curve.hpp"

namespace qf {

/// Scan of the blow-up obstruction for the hyperbolic cosh-subcase system
/// with the lower sign: a finite-r blow-up of p forces
///   (A2 (R^2-1) + A5 R)^2 R  =  (R^2 + A6 R / 4 + 1)(R^2 + 1)^2,
/// so the metric extends over the whole axis when LHS < RHS everywhere.
struct sphere_scan {
    double A2 = 0, A5 = 0, A6 = 0;
    double R_max = 1e3;
    std::size_t n_grid = 10000;
    int crossings = 0;
    double min_margin = 0;    // min (RHS - LHS) / RHS over the grid
    bool tail_ok = false;     // degree-5 LHS vs degree-6 RHS at the far end
    bool no_blow_up = false;
};

sphere_scan blowup_scan(double A2, double A5, double A6, double R_max = 1e3,
                        std::size_t n_grid = 10000);

/// Profile re-sampled in the chart coordinate r = e^{mu x}, ascending in r;
/// the pole sits at r = 0.
struct r_profile {
    std::vector<double> r, h, p; // p = h_x
};

/// South-pole samples of prof (the small-r end). Hyper only.
r_profile profile_in_r(const metric_profile& prof);

/// Log-log slope fit of h(r) and p(r) over r in [r_lo, r_hi]; classifies
/// the Puiseux leading power -1/n with n in {2, 4}.
struct puiseux_result {
    double exponent_h = 0, exponent_p = 0;
    double exponent = 0; // combined estimate
    int n = 0;
};
puiseux_result puiseux_exponent(const r_profile& rp, double r_lo = 1e-6, double r_hi = 1e-3);

/// Samples of f1(rho) = rho-rescaled p in the polar chart rho = r^{1/n},
/// where the metric reads n^2 / f1(rho)^2 (d rho^2 + rho^2 d phi^2).
struct pole_chart_result {
    int n = 0;
    std::vector<double> rho, f1;
    double f1_at_0 = 0;   // intercept of a low-order polynomial fit
    double fit_residual = 0;
    bool smooth = false;
};
pole_chart_result pole_chart(const r_profile& rp, int n);

/// Finite-limit checks for the integral near the pole (needs exponent
/// -1/2): the r^{-1} singular parts of h^2 and h h_x must cancel in
/// h^2 + 2 h h_x and in the two chart combinations
/// xi^2 (h^2 + h h_x) - eta^2 h h_x and xi^2 h^2 - 2 eta^2 h h_x.
struct extension_report {
    double c0_sq = 0; // lim r h^2
    std::array<double, 3> max_abs{};
    std::array<double, 3> growth_slope{}; // log-log slope; bounded needs > -0.3
    bool bounded = false;
};
extension_report check_integral_extension(const r_profile& rp);

/// End-to-end certificate for one (A2, A5, A6) tuple: blow-up scan, then
/// trace the lower-sign cosh-subcase profile from the seed, classify the
/// Puiseux exponent and chart smoothness at each pole (north via the
/// x -> -x rerun), and check the integral-extension limits.
///
/// A pole is only analyzed when its trace actually covers the fit window
/// near r = 0. A trace can stop short of it at a fold of the defining
/// curve, where dp/dx diverges at finite r while p stays bounded; that
/// failure mode is outside the scan inequality, so the certificate
/// records per-pole reachability instead of assuming it.
struct pole_report {
    bool reached = false; // the trace covered the pole fit window
    double limit_x = 0;   // innermost x the trace attained on this side
    puiseux_result exponent;
    pole_chart_result chart;
    extension_report extension;
    bool checked_extension = false;
};

struct sphere_certificate {
    parameter_set params;
    sphere_scan scan;
    bool traced = false;
    pole_report south, north;
    bool global_extension = false;
};

sphere_certificate build_sphere_case(double A2, double A5, double A6, const curve_point& seed);

} // namespace qf

#endif
