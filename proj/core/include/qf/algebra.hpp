#ifndef QF_ALGEBRA_HPP
#define QF_ALGEBRA_HPP

#include <cstdint>
#include <vector>

#include "qf/integrals.hpp"

namespace qf {

/// One monomial C * Ha^h_pow * L^l_pow, where Ha = 2H is the homogeneous
/// quadratic form h_x^2 (px^2 + py^2).
struct relation_term {
    int h_pow;
    int l_pow;
    double coeff;
};

/// Closed polynomial relations of the symmetry algebra, written uniformly as
///   bracket_value + sum_i C_i Ha^{a_i} L^{b_i} = 0,
///   product_value + sum_i C_i Ha^{a_i} L^{b_i} = 0,
/// with bracket_value = {F+, F-} and product_value = F+ F- (trig), or
/// bracket_value = 2 {F1, F2} and product_value = F1^2 + F2^2 (hyper).
struct polynomial_relation {
    std::vector<relation_term> bracket_terms;
    std::vector<relation_term> product_terms;
};

/// The coefficient tables as closed functions of (mu, A). Throws
/// linear_case_unsupported: the linear algebra closes through the eigen
/// relation instead (see check_eigen_relation).
polynomial_relation relation_coefficients(const parameter_set& P);

/// Verification record for one identity over a sample of phase points.
struct identity_report {
    const char* identity = "";
    std::size_t n_points = 0;
    double max_residual = 0;
    phase_point worst_point;
};

/// Deterministic sample of phase points spread over the profile range.
std::vector<phase_point> sample_phase_points(const metric_profile& prof, std::size_t n,
                                             std::uint64_t seed);

/// Checks bracket_value + sum C Ha^a L^b = 0 pointwise; residuals are scaled
/// by the sum of term magnitudes.
identity_report verify_bracket_identity(const observable_set& obs,
                                        const std::vector<phase_point>& pts);

/// Same for the product identity.
identity_report verify_product_identity(const observable_set& obs,
                                        const std::vector<phase_point>& pts);

/// Compares every analytic bracket among the observables against the
/// central-difference bracket; returns the max scaled deviation.
double check_bracket_consistency(const observable_set& obs, const std::vector<phase_point>& pts,
                                 double step = 1e-6);

} // namespace qf

#endif
