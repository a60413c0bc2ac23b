#ifndef QF_PARAMS_HPP
#define QF_PARAMS_HPP

#include <array>
#include <string>

#include "qf/errors.hpp"

namespace qf {

/// Which of the three one-parameter families is active. Trig and Hyper
/// require mu > 0 (the hyperbolic branch realizes an imaginary frequency
/// with cosh/sinh); Linear has no frequency.
enum class case_tag { trig, hyper, linear };

const char* case_name(case_tag c);
case_tag case_from_name(const std::string& name);

/// Model constants (mu, A0..A6) plus the case tag. A5 and A6 play the role
/// of integration constants of the two first-order equations; A0..A4 shape
/// the coefficient functions.
struct parameter_set {
    case_tag tag = case_tag::trig;
    double mu = 1.0;
    std::array<double, 7> A{}; // A0..A6

    double a(int k) const { return A[static_cast<std::size_t>(k)]; }
};

/// One group element acting on (solution, parameters). Application order is
/// fixed: x-flip, y-flip, x-scale, x-shift, gauge shift (h -> h + a), metric
/// dilation (h -> lambda_m h, with the integral normalization chosen so A3
/// and A4 are fixed), homogeneity (F -> nu F).
struct symmetry_transform {
    bool x_flip = false;
    bool y_flip = false;
    double x_scale = 1.0;
    double x_shift = 0.0;
    double gauge_shift = 0.0;
    double metric_dilation = 1.0;
    double homogeneity = 1.0;
};

/// Parameter set annotated with the degeneracy flag produced by normalize:
/// A0 = 0 reduces to the lower ("1+3") family and blocks the gauge step.
struct normal_form_result {
    parameter_set params;
    symmetry_transform transform;
    bool degenerate13 = false;
};

/// Checks the structural invariants. Returns the input unchanged on success.
/// Throws: all_zero_parameters, nonpositive_mu.
parameter_set validate(const parameter_set& p);

/// Applies the group action to the parameters. Throws zero_scale when any of
/// the scale-like fields vanish.
parameter_set apply_symmetry(const symmetry_transform& t, const parameter_set& p);

/// Group composition: apply_symmetry(compose(t2, t1), p) equals
/// apply_symmetry(t2, apply_symmetry(t1, p)).
symmetry_transform compose(const symmetry_transform& t2, const symmetry_transform& t1);

symmetry_transform inverse(const symmetry_transform& t);

/// Transforms one solution sample (x, h, h_x) the same way apply_symmetry
/// transforms the parameters, so that residuals map onto residuals.
void push_point(const symmetry_transform& t, double& x, double& h, double& p);

/// Reduces p to the normal form of its case (Trig: mu=1, A4=0, A3=1, A1=0,
/// A0=+-1; Hyper: cosh/sinh/exp subcase; Linear: A3=0, A4=1, A1=0, A0=+-1).
/// The returned transform satisfies apply_symmetry(t, p) == normal form.
normal_form_result normalize(const parameter_set& p);

} // namespace qf

#endif
