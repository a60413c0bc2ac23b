#include "qf/params.hpp"

#include <cmath>
#include <cstdlib>

namespace qf {

const char* errc_name(errc c) {
    switch (c) {
        case errc::all_zero_parameters: return "AllZeroParameters";
        case errc::nonpositive_mu: return "NonpositiveMu";
        case errc::zero_scale: return "ZeroScale";
        case errc::degenerate_seed: return "DegenerateSeed";
        case errc::identically_zero_cubic: return "IdenticallyZeroCubic";
        case errc::singular_bracket: return "SingularBracket";
        case errc::branch_collision: return "BranchCollision";
        case errc::step_underflow: return "StepUnderflow";
        case errc::out_of_range: return "OutOfRange";
        case errc::linear_case_unsupported: return "LinearCaseUnsupported";
        case errc::chart_domain: return "ChartDomain";
        case errc::slope_unclassifiable: return "SlopeUnclassifiable";
        case errc::vanishing_f1: return "VanishingF1";
        case errc::divergent_combination: return "DivergentCombination";
        case errc::config_error: return "ConfigError";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

const char* case_name(case_tag c) {
    switch (c) {
        case case_tag::trig: return "trig";
        case case_tag::hyper: return "hyper";
        case case_tag::linear: return "linear";
    }
    return "?";
}

case_tag case_from_name(const std::string& name) {
    if (name == "trig") return case_tag::trig;
    if (name == "hyper") return case_tag::hyper;
    if (name == "linear") return case_tag::linear;
    throw error(errc::config_error, "unknown case '" + name + "'");
}

parameter_set validate(const parameter_set& p) {
    bool all_zero = true;
    for (double a : p.A)
        if (a != 0.0) all_zero = false;
    if (all_zero) throw error(errc::all_zero_parameters, "A0..A6 are all zero");
    if (p.tag != case_tag::linear) {
        if (!(p.mu > 0.0) || !std::isfinite(p.mu))
            throw error(errc::nonpositive_mu, "trig/hyper require mu > 0");
    }
    return p;
}

namespace {

void act_x_flip(parameter_set& p) {
    p.A[0] = -p.A[0];
    p.A[1] = -p.A[1];
    p.A[2] = -p.A[2];
    p.A[4] = -p.A[4];
}

// x_old = lambda * x_new (lambda signed; negative values fold in a flip).
// The new profile h(lambda x) oscillates with frequency lambda * mu.
void act_x_scale(parameter_set& p, double lam) {
    const double l2 = lam * lam;
    p.A[0] /= lam * l2;
    p.A[1] /= lam * l2;
    p.A[2] /= lam;
    p.A[4] *= lam;
    p.A[5] /= l2;
    p.A[6] /= (p.tag == case_tag::linear) ? l2 * l2 : l2;
    if (p.tag != case_tag::linear) p.mu *= std::abs(lam);
}

// x_old = x_new + a.
void act_x_shift(parameter_set& p, double a) {
    const double mu = p.mu;
    const double A3 = p.A[3], A4 = p.A[4];
    switch (p.tag) {
        case case_tag::trig: {
            const double c = std::cos(mu * a), s = std::sin(mu * a);
            p.A[3] = A3 * c + (A4 / mu) * s;
            p.A[4] = mu * ((A4 / mu) * c - A3 * s);
            break;
        }
        case case_tag::hyper: {
            const double ch = std::cosh(mu * a), sh = std::sinh(mu * a);
            p.A[3] = A3 * ch + (A4 / mu) * sh;
            p.A[4] = mu * ((A4 / mu) * ch + A3 * sh);
            break;
        }
        case case_tag::linear: {
            p.A[3] = A3 + A4 * a;
            p.A[5] += p.A[2] * a * (2.0 * A3 + A4 * a);
            p.A[6] += p.A[0] * a * (2.0 * A3 + A4 * a);
            break;
        }
    }
}

// h_new = h_old + g.
void act_gauge(parameter_set& p, double g) {
    const double A0 = p.A[0], A1 = p.A[1], A2 = p.A[2];
    const double quad = A0 * g * g + 2.0 * A1 * g;
    p.A[1] = A1 + A0 * g;
    switch (p.tag) {
        case case_tag::trig: {
            const double mu2 = p.mu * p.mu;
            p.A[2] = A2 + 0.5 * mu2 * quad;
            p.A[6] += 4.0 * (p.A[2] * p.A[2] - A2 * A2);
            break;
        }
        case case_tag::hyper: {
            const double mu2 = p.mu * p.mu;
            p.A[2] = A2 - 0.5 * mu2 * quad;
            p.A[6] += 4.0 * (p.A[2] * p.A[2] - A2 * A2);
            break;
        }
        case case_tag::linear: {
            p.A[5] -= p.A[4] * quad;
            p.A[6] += A2 * quad;
            break;
        }
    }
}

// h -> lam * h with the integral rescaled so A3, A4 stay put.
void act_dilation(parameter_set& p, double lam) {
    const double l2 = lam * lam, l4 = l2 * l2;
    p.A[1] *= lam;
    p.A[2] *= l2;
    p.A[3] *= l4;
    p.A[4] *= l4;
    p.A[5] *= l4 * l2;
    p.A[6] *= l4;
}

// F -> nu * F.
void act_homogeneity(parameter_set& p, double nu) {
    for (int k = 0; k <= 4; ++k) p.A[static_cast<std::size_t>(k)] *= nu;
    p.A[5] *= nu * nu;
    p.A[6] *= nu * nu;
}

} // namespace

parameter_set apply_symmetry(const symmetry_transform& t, const parameter_set& p) {
    if (t.x_scale == 0.0 || t.metric_dilation == 0.0 || t.homogeneity == 0.0)
        throw error(errc::zero_scale, "x_scale, metric_dilation, homogeneity must be nonzero");
    parameter_set q = p;
    if (t.x_flip) act_x_flip(q);
    // y-flip swaps the two eigen integrals; no parameter action.
    if (t.x_scale != 1.0) act_x_scale(q, t.x_scale);
    if (t.x_shift != 0.0) act_x_shift(q, t.x_shift);
    if (t.gauge_shift != 0.0) act_gauge(q, t.gauge_shift);
    if (t.metric_dilation != 1.0) act_dilation(q, t.metric_dilation);
    if (t.homogeneity != 1.0) act_homogeneity(q, t.homogeneity);
    return q;
}

symmetry_transform compose(const symmetry_transform& t2, const symmetry_transform& t1) {
    // Solution-level action of one transform:
    //   h_new(x) = lam_m * ( h( eps*lam*(x + a) ) + g ),
    // with eps*lam the signed affine factor. Composing t2 after t1:
    const double m1 = (t1.x_flip ? -1.0 : 1.0) * t1.x_scale;
    const double m2 = (t2.x_flip ? -1.0 : 1.0) * t2.x_scale;
    symmetry_transform r;
    r.x_flip = (m1 * m2) < 0.0;
    r.x_scale = std::abs(m1 * m2);
    r.x_shift = t2.x_shift + t1.x_shift / m2;
    r.gauge_shift = t1.gauge_shift + t2.gauge_shift / t1.metric_dilation;
    r.metric_dilation = t1.metric_dilation * t2.metric_dilation;
    r.homogeneity = t1.homogeneity * t2.homogeneity;
    r.y_flip = t1.y_flip != t2.y_flip;
    return r;
}

symmetry_transform inverse(const symmetry_transform& t) {
    const double m = (t.x_flip ? -1.0 : 1.0) * t.x_scale;
    symmetry_transform r;
    r.x_flip = t.x_flip;
    r.x_scale = 1.0 / t.x_scale;
    r.x_shift = -m * t.x_shift;
    r.gauge_shift = -t.metric_dilation * t.gauge_shift;
    r.metric_dilation = 1.0 / t.metric_dilation;
    r.homogeneity = 1.0 / t.homogeneity;
    r.y_flip = t.y_flip;
    return r;
}

void push_point(const symmetry_transform& t, double& x, double& h, double& p) {
    const double m = (t.x_flip ? -1.0 : 1.0) * t.x_scale;
    x = x / m - t.x_shift;
    h = t.metric_dilation * (h + t.gauge_shift);
    p = t.metric_dilation * m * p;
}

namespace {

symmetry_transform elem_scale(double l) { symmetry_transform t; t.x_scale = l; return t; }
symmetry_transform elem_shift(double a) { symmetry_transform t; t.x_shift = a; return t; }
symmetry_transform elem_gauge(double g) { symmetry_transform t; t.gauge_shift = g; return t; }
symmetry_transform elem_homog(double nu) { symmetry_transform t; t.homogeneity = nu; return t; }
symmetry_transform elem_dilate(double l) { symmetry_transform t; t.metric_dilation = l; return t; }

} // namespace

normal_form_result normalize(const parameter_set& p_in) {
    parameter_set p = validate(p_in);
    symmetry_transform t; // identity
    auto step = [&](const symmetry_transform& e) {
        p = apply_symmetry(e, p);
        t = compose(e, t);
    };

    if (p.tag == case_tag::trig) {
        if (p.mu != 1.0) step(elem_scale(1.0 / p.mu));
        const double R = std::hypot(p.A[3], p.A[4] / p.mu);
        if (R > 0.0) {
            // Rotate the (A3, A4/mu) pair onto the A3 axis.
            const double phi = std::atan2(p.A[4] / p.mu, p.A[3]);
            step(elem_shift(phi / p.mu));
            p.A[4] = 0.0; // exact by construction
            step(elem_homog(1.0 / p.A[3]));
        }
    } else if (p.tag == case_tag::hyper) {
        if (p.mu != 1.0) step(elem_scale(1.0 / p.mu));
        const double b3 = p.A[3], b4 = p.A[4] / p.mu;
        const double inv = b3 * b3 - b4 * b4;
        const double scale2 = b3 * b3 + b4 * b4;
        if (scale2 > 0.0) {
            if (inv > 1e-14 * scale2) {
                // cosh subcase: kill A4.
                const double a = std::atanh(-b4 / b3) / p.mu;
                step(elem_shift(a));
                p.A[4] = 0.0;
                step(elem_homog(1.0 / p.A[3]));
            } else if (inv < -1e-14 * scale2) {
                // sinh subcase: kill A3.
                const double a = std::atanh(-b3 / b4) / p.mu;
                step(elem_shift(a));
                p.A[3] = 0.0;
                step(elem_homog(p.mu / p.A[4]));
            } else {
                // exponential subcase: A3 cosh + A4 sinh = A3 e^{mu x}.
                p.A[4] = p.A[3] * p.mu;
                if (p.A[3] != 0.0) step(elem_homog(1.0 / p.A[3]));
            }
        }
    } else {
        if (p.A[4] != 0.0) {
            step(elem_shift(-p.A[3] / p.A[4]));
            p.A[3] = 0.0;
            step(elem_homog(1.0 / p.A[4]));
        }
    }

    normal_form_result out;
    if (p.A[0] == 0.0) {
        out.degenerate13 = true;
    } else {
        step(elem_gauge(-p.A[1] / p.A[0]));
        p.A[1] = 0.0; // exact by construction
        // Dilation with unit integral normalization: compose the A3-fixing
        // dilation with homogeneity 1/lam^4 so only A0 -> A0/lam^4 moves.
        const double lam = std::pow(std::abs(p.A[0]), 0.25);
        if (lam != 1.0) {
            step(elem_dilate(lam));
            step(elem_homog(1.0 / (lam * lam * lam * lam)));
        }
        p.A[0] = (p.A[0] > 0.0) ? 1.0 : -1.0;
    }
    out.params = p;
    out.transform = t;
    return out;
}

} // namespace qf
