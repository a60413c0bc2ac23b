#ifndef QF_CURVE_HPP
#define QF_CURVE_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qf/params.hpp"

namespace qf {

/// One sample of the metric profile: x, h(x), p = h_x(x).
struct curve_point {
    double x = 0;
    double h = 0;
    double p = 0;
};

/// Grid record of a traced profile.
struct grid_point {
    double x, h, p, h_xx;
    double E1, E2;
};

/// Why a trace stopped before exhausting the requested range.
enum class stop_reason {
    range_end,
    branch_collision,
    singular_bracket,
    step_underflow,
    p_vanishes,
};

const char* stop_reason_name(stop_reason r);

/// Branch-resolved numerical solution h(x) over an interval, with residual
/// certificates. Grid is strictly increasing in x; p keeps one sign.
struct metric_profile {
    parameter_set params;
    curve_point seed;
    int branch_id = 0;
    std::vector<grid_point> grid;
    int interpolation_order = 3;
    double construction_tol = 0;
    double max_E1 = 0, max_E2 = 0;
    stop_reason stop_lo = stop_reason::range_end;
    stop_reason stop_hi = stop_reason::range_end;

    double x_min() const { return grid.front().x; }
    double x_max() const { return grid.back().x; }
    bool contains(double x) const { return x >= x_min() && x <= x_max(); }

    /// Cubic-Hermite interpolation of (h, p, h_xx) at x inside the range.
    curve_point at(double x) const;
    double h_xx_at(double x) const;
};

/// Samples of e^{i mu_c x} G(x), which must equal the constant A_c.
struct holomorphy_data {
    std::complex<double> A_c;
    std::vector<std::complex<double>> G_samples;
    double max_deviation = 0;
};

/// First defining equation, exact at (x, h, h_x). Total function.
double residual_E1(const curve_point& pt, const parameter_set& p);

/// Second defining equation (the cubic in h_x).
double residual_E2(const curve_point& pt, const parameter_set& p);

/// The unique (A5, A6) making both residuals vanish at the seed; each
/// equation is affine in its constant. Throws degenerate_seed when p = 0.
std::pair<double, double> derive_A5_A6(const parameter_set& p_without_56, const curve_point& seed);

/// All real roots of E2 as a cubic in h_x at (x, h), ascending.
std::vector<double> solve_p(double x, double h, const parameter_set& p);

/// Discriminant-style gap of the E2 cubic at (x, h): the minimum pairwise
/// distance between real roots, used for branch-collision detection.
double cubic_root_gap(double x, double h, const parameter_set& p);

/// h_xx solved from the second-order equation (affine in h_xx). Throws
/// singular_bracket when the leading bracket vanishes.
double h_xx_from_ode(const curve_point& pt, const parameter_set& p);

/// Traces the profile through the seed across x_range = [lo, hi]. Derives
/// (A5, A6) from the seed. Stops early at branch singularities, recording
/// the reason per side.
metric_profile trace_profile(const parameter_set& p_without_56, const curve_point& seed,
                             double x_lo, double x_hi, double tol = 1e-12);

/// Max scaled residual of the third-order consequence along the profile
/// (h_xxx by central differences of h_xx_from_ode).
double check_third_order(const metric_profile& prof);

/// Samples e^{i mu_c x} G(x) and reports the max deviation from A_c.
/// Trig/Hyper only.
holomorphy_data check_holomorphy(const metric_profile& prof);

/// Max scaled residual of the six coefficient ODEs (a_k from the closed
/// formulas, a_k' by central differences along the profile).
double check_coefficient_odes(const metric_profile& prof);

/// Chart sample: r = tan(mu x / 2) (trig, |mu x| < pi) or e^{mu x} (hyper),
/// with the cleared-denominator polynomial residuals.
struct chart_sample {
    double r, h, p;
    double P1, P2;
};
std::vector<chart_sample> to_rational_chart(const metric_profile& prof);

} // namespace qf

#endif
