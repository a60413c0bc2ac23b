#ifndef QF_INTEGRALS_HPP
#define QF_INTEGRALS_HPP

#include <array>
#include <string>
#include <vector>

#include "qf/curve.hpp"

namespace qf {

/// Point of the phase space T*(R^2) over the strip coordinates (x, y).
struct phase_point {
    double x = 0, y = 0, px = 0, py = 0;
};

/// Value and gradient (d/dx, d/dy, d/dpx, d/dpy) of one observable.
struct observable {
    double value = 0;
    std::array<double, 4> grad{};
};

/// Coefficient functions a_0..a_4 of the quartic integral, evaluated on the
/// solution jet (x, h, h_x). Hyper uses the real forms; Linear returns the
/// coefficients of the even/odd split.
std::array<double, 5> coefficients_a(const curve_point& pt, const parameter_set& P);

/// The conserved observables of one profile: the Hamiltonian H, the linear
/// integral L = p_y, and the quartic integral(s) of the active case
/// ("F+", "F-" for trig; "F1", "F2" for hyper; "F" for linear). Gradients
/// are closed-form: x-derivatives go through the second-order equation,
/// never through finite differences.
class observable_set {
  public:
    explicit observable_set(metric_profile prof);

    const metric_profile& profile() const { return prof_; }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t index(const std::string& name) const;

    observable eval(std::size_t idx, const phase_point& pt) const;
    observable eval(const std::string& name, const phase_point& pt) const {
        return eval(index(name), pt);
    }

  private:
    metric_profile prof_;
    std::vector<std::string> names_;
};

/// Values of (H, L, F...) straight from a solution jet (x, h, h_x), without
/// a traced profile; used by the flow integrator for drift monitoring.
std::vector<double> observable_values(const parameter_set& P, const curve_point& jet,
                                      const phase_point& pt);

/// Canonical bracket sum_i (d_{q_i} f d_{p_i} g - d_{p_i} f d_{q_i} g) from
/// two gradients.
double poisson_bracket(const observable& f, const observable& g);

/// The same bracket by central differences of the values (step in each
/// coordinate); validation oracle for the analytic gradients.
double poisson_bracket_fd(const observable_set& obs, std::size_t f, std::size_t g,
                          const phase_point& pt, double step = 1e-6);

/// Max scaled residual of the eigen relations of L over the sample points:
/// {L,F+} = mu F+, {L,F-} = -mu F- (trig); {L,F1} = -mu F2, {L,F2} = mu F1
/// (hyper); {L,F} = A4 L^4 - A2 L^2 (2H) - A0 (2H)^2 (linear).
double check_eigen_relation(const observable_set& obs, const std::vector<phase_point>& pts);

/// Max scaled |{H, G}| over the sample points, G running over L and the
/// quartic integral(s).
double check_conservation(const observable_set& obs, const std::vector<phase_point>& pts);

/// Singular values (descending) of the 3 x 4 Jacobian of (H, L, F) at pt,
/// F being the first quartic integral; independent = smallest > tol * largest.
struct independence_report {
    std::array<double, 3> singular_values{};
    bool independent = false;
};
independence_report functional_independence(const observable_set& obs, const phase_point& pt,
                                            double tol = 1e-8);

} // namespace qf

#endif
