#include "qf/integrals.hpp"

#include <algorithm>
#include <cmath>

namespace qf {

std::array<double, 5> coefficients_a(const curve_point& pt, const parameter_set& P) {
    const double x = pt.x, h = pt.h, p = pt.p;
    const double A0 = P.a(0), A1 = P.a(1), A2 = P.a(2), A3 = P.a(3), A4 = P.a(4);
    const double mu = P.mu;
    const double p2 = p * p, p3 = p2 * p, p4 = p2 * p2;
    std::array<double, 5> a{};
    switch (P.tag) {
        case case_tag::trig: {
            const double T = A3 * std::cos(mu * x) + (A4 / mu) * std::sin(mu * x);
            const double S = A3 * std::sin(mu * x) - (A4 / mu) * std::cos(mu * x);
            a[0] = (A0 / mu) * p4;
            a[1] = (A1 - A0 * h) * p3;
            a[2] = (0.5 * mu * A0 * h * h + (2.0 * A0 / mu) * p2 - mu * A1 * h + A2 / mu) * p2;
            a[3] = (A1 - A0 * h) * p3 - T;
            a[4] = (0.5 * mu * (A0 * h - 2.0 * A1) * h + (A0 / mu) * p2 + A2 / mu) * p2 + S;
            break;
        }
        case case_tag::hyper: {
            const double Th = A3 * std::cosh(mu * x) + (A4 / mu) * std::sinh(mu * x);
            const double Sh = A3 * std::sinh(mu * x) + (A4 / mu) * std::cosh(mu * x);
            a[0] = -(A0 / mu) * p4;
            a[1] = (A1 - A0 * h) * p3;
            a[2] = (0.5 * mu * A0 * h * h - (2.0 * A0 / mu) * p2 - mu * A1 * h - A2 / mu) * p2;
            a[3] = (A1 - A0 * h) * p3 - Th;
            a[4] = (0.5 * mu * (A0 * h - 2.0 * A1) * h - (A0 / mu) * p2 - A2 / mu) * p2 + Sh;
            break;
        }
        case case_tag::linear: {
            a[0] = A0 * p4;
            a[1] = (A1 - A0 * h) * p3;
            a[2] = (2.0 * A0 * p2 + A2) * p2;
            a[3] = a[1] - (A3 + A4 * x);
            a[4] = A0 * p4 + A2 * p2 - A4;
            break;
        }
    }
    return a;
}

namespace {

// a_k plus total derivative along the profile, d a_k / dx with
// h' = p, p' = h_xx. All closed-form.
struct coeff_jet {
    std::array<double, 5> a{};
    std::array<double, 5> da{};
};

coeff_jet coefficient_jet(const curve_point& pt, double q, const parameter_set& P) {
    const double x = pt.x, h = pt.h, p = pt.p;
    const double A0 = P.a(0), A1 = P.a(1), A2 = P.a(2), A3 = P.a(3), A4 = P.a(4);
    const double mu = P.mu;
    const double p2 = p * p, p3 = p2 * p;
    coeff_jet j;
    j.a = coefficients_a(pt, P);
    // partial derivatives: dh[k] wrt h, dp[k] wrt p, dx[k] explicit in x
    std::array<double, 5> dh{}, dp{}, dx{};
    switch (P.tag) {
        case case_tag::trig: {
            const double T = A3 * std::cos(mu * x) + (A4 / mu) * std::sin(mu * x);
            const double S = A3 * std::sin(mu * x) - (A4 / mu) * std::cos(mu * x);
            dp[0] = 4.0 * (A0 / mu) * p3;
            dh[1] = -A0 * p3;
            dp[1] = 3.0 * (A1 - A0 * h) * p2;
            dh[2] = (mu * A0 * h - mu * A1) * p2;
            dp[2] = mu * A0 * h * h * p + (8.0 * A0 / mu) * p3 - 2.0 * mu * A1 * h * p +
                    (2.0 * A2 / mu) * p;
            dh[3] = dh[1];
            dp[3] = dp[1];
            dx[3] = mu * S; // -T'
            dh[4] = mu * (A0 * h - A1) * p2;
            dp[4] = mu * A0 * h * h * p - 2.0 * mu * A1 * h * p + (4.0 * A0 / mu) * p3 +
                    (2.0 * A2 / mu) * p;
            dx[4] = mu * T; // S'
            break;
        }
        case case_tag::hyper: {
            const double Th = A3 * std::cosh(mu * x) + (A4 / mu) * std::sinh(mu * x);
            const double Sh = A3 * std::sinh(mu * x) + (A4 / mu) * std::cosh(mu * x);
            dp[0] = -4.0 * (A0 / mu) * p3;
            dh[1] = -A0 * p3;
            dp[1] = 3.0 * (A1 - A0 * h) * p2;
            dh[2] = (mu * A0 * h - mu * A1) * p2;
            dp[2] = mu * A0 * h * h * p - (8.0 * A0 / mu) * p3 - 2.0 * mu * A1 * h * p -
                    (2.0 * A2 / mu) * p;
            dh[3] = dh[1];
            dp[3] = dp[1];
            dx[3] = -mu * Sh; // -Th'
            dh[4] = mu * (A0 * h - A1) * p2;
            dp[4] = mu * A0 * h * h * p - 2.0 * mu * A1 * h * p - (4.0 * A0 / mu) * p3 -
                    (2.0 * A2 / mu) * p;
            dx[4] = mu * Th; // Sh'
            break;
        }
        case case_tag::linear: {
            dp[0] = 4.0 * A0 * p3;
            dh[1] = -A0 * p3;
            dp[1] = 3.0 * (A1 - A0 * h) * p2;
            dp[2] = 8.0 * A0 * p3 + 2.0 * A2 * p;
            dh[3] = dh[1];
            dp[3] = dp[1];
            dx[3] = -A4;
            dp[4] = 4.0 * A0 * p3 + 2.0 * A2 * p;
            break;
        }
    }
    for (std::size_t k = 0; k < 5; ++k) j.da[k] = dx[k] + dh[k] * p + dp[k] * q;
    return j;
}

// Quartic form sum_k c_k px^{4-k} py^k with its gradient in (px, py).
struct quartic_eval {
    double value = 0, d_px = 0, d_py = 0;
};

quartic_eval eval_quartic(const std::array<double, 5>& c, double px, double py) {
    quartic_eval r;
    double px_pow[5] = {1, px, px * px, px * px * px, px * px * px * px};
    double py_pow[5] = {1, py, py * py, py * py * py, py * py * py * py};
    for (int k = 0; k <= 4; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        r.value += c[ku] * px_pow[4 - k] * py_pow[k];
        if (k < 4) r.d_px += c[ku] * (4 - k) * px_pow[3 - k] * py_pow[k];
        if (k > 0) r.d_py += c[ku] * k * px_pow[4 - k] * py_pow[k - 1];
    }
    return r;
}

} // namespace

observable_set::observable_set(metric_profile prof) : prof_(std::move(prof)) {
    names_ = {"H", "L"};
    switch (prof_.params.tag) {
        case case_tag::trig:
            names_.push_back("F+");
            names_.push_back("F-");
            break;
        case case_tag::hyper:
            names_.push_back("F1");
            names_.push_back("F2");
            break;
        case case_tag::linear:
            names_.push_back("F");
            break;
    }
}

std::size_t observable_set::index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw error(errc::config_error, "unknown observable '" + name + "'");
}

observable observable_set::eval(std::size_t idx, const phase_point& pt) const {
    if (idx >= names_.size()) throw error(errc::config_error, "observable index out of range");
    const parameter_set& P = prof_.params;
    const double mu = P.mu;
    const curve_point cp = prof_.at(pt.x);
    observable out;

    if (idx == 0) { // H = h_x^2 (px^2 + py^2) / 2
        const double q = h_xx_from_ode(cp, P);
        const double sq = pt.px * pt.px + pt.py * pt.py;
        out.value = 0.5 * cp.p * cp.p * sq;
        out.grad = {cp.p * q * sq, 0.0, cp.p * cp.p * pt.px, cp.p * cp.p * pt.py};
        return out;
    }
    if (idx == 1) { // L = py
        out.value = pt.py;
        out.grad = {0.0, 0.0, 0.0, 1.0};
        return out;
    }

    const double q = h_xx_from_ode(cp, P);
    const coeff_jet cj = coefficient_jet(cp, q, P);

    switch (P.tag) {
        case case_tag::trig: {
            std::array<double, 5> c = cj.a, dc = cj.da;
            if (idx == 2) { // F+ = e^{-mu y} sum (-1)^k a_k ...
                for (std::size_t k = 1; k < 5; k += 2) {
                    c[k] = -c[k];
                    dc[k] = -dc[k];
                }
            }
            const double w = (idx == 2) ? std::exp(-mu * pt.y) : std::exp(mu * pt.y);
            const quartic_eval v = eval_quartic(c, pt.px, pt.py);
            const quartic_eval dv = eval_quartic(dc, pt.px, pt.py);
            out.value = w * v.value;
            out.grad = {w * dv.value, (idx == 2 ? -mu : mu) * w * v.value, w * v.d_px, w * v.d_py};
            return out;
        }
        case case_tag::hyper: {
            const std::array<double, 5> ce{cj.a[0], 0, cj.a[2], 0, cj.a[4]};
            const std::array<double, 5> co{0, cj.a[1], 0, cj.a[3], 0};
            const std::array<double, 5> dce{cj.da[0], 0, cj.da[2], 0, cj.da[4]};
            const std::array<double, 5> dco{0, cj.da[1], 0, cj.da[3], 0};
            const quartic_eval E = eval_quartic(ce, pt.px, pt.py);
            const quartic_eval O = eval_quartic(co, pt.px, pt.py);
            const quartic_eval dE = eval_quartic(dce, pt.px, pt.py);
            const quartic_eval dO = eval_quartic(dco, pt.px, pt.py);
            const double cy = std::cos(mu * pt.y), sy = std::sin(mu * pt.y);
            if (idx == 2) { // F1 = cos E + sin O
                out.value = cy * E.value + sy * O.value;
                out.grad = {cy * dE.value + sy * dO.value,
                            mu * (-sy * E.value + cy * O.value), // = mu F2
                            cy * E.d_px + sy * O.d_px, cy * E.d_py + sy * O.d_py};
            } else { // F2 = cos O - sin E
                out.value = cy * O.value - sy * E.value;
                out.grad = {cy * dO.value - sy * dE.value,
                            -mu * (sy * O.value + cy * E.value), // = -mu F1
                            cy * O.d_px - sy * E.d_px, cy * O.d_py - sy * E.d_py};
            }
            return out;
        }
        case case_tag::linear: {
            const std::array<double, 5> ce{cj.a[0], 0, cj.a[2], 0, cj.a[4]};
            const std::array<double, 5> co{0, cj.a[1], 0, cj.a[3], 0};
            const std::array<double, 5> dce{cj.da[0], 0, cj.da[2], 0, cj.da[4]};
            const std::array<double, 5> dco{0, cj.da[1], 0, cj.da[3], 0};
            const quartic_eval E = eval_quartic(ce, pt.px, pt.py);
            const quartic_eval O = eval_quartic(co, pt.px, pt.py);
            const quartic_eval dE = eval_quartic(dce, pt.px, pt.py);
            const quartic_eval dO = eval_quartic(dco, pt.px, pt.py);
            out.value = pt.y * E.value + O.value;
            out.grad = {pt.y * dE.value + dO.value, E.value, pt.y * E.d_px + O.d_px,
                        pt.y * E.d_py + O.d_py};
            return out;
        }
    }
    return out;
}

std::vector<double> observable_values(const parameter_set& P, const curve_point& jet,
                                      const phase_point& pt) {
    std::vector<double> out;
    out.push_back(0.5 * jet.p * jet.p * (pt.px * pt.px + pt.py * pt.py));
    out.push_back(pt.py);
    const std::array<double, 5> a = coefficients_a(jet, P);
    switch (P.tag) {
        case case_tag::trig: {
            std::array<double, 5> alt = a;
            for (std::size_t k = 1; k < 5; k += 2) alt[k] = -alt[k];
            out.push_back(std::exp(-P.mu * pt.y) * eval_quartic(alt, pt.px, pt.py).value);
            out.push_back(std::exp(P.mu * pt.y) * eval_quartic(a, pt.px, pt.py).value);
            break;
        }
        case case_tag::hyper: {
            const double E = eval_quartic({a[0], 0, a[2], 0, a[4]}, pt.px, pt.py).value;
            const double O = eval_quartic({0, a[1], 0, a[3], 0}, pt.px, pt.py).value;
            const double cy = std::cos(P.mu * pt.y), sy = std::sin(P.mu * pt.y);
            out.push_back(cy * E + sy * O);
            out.push_back(cy * O - sy * E);
            break;
        }
        case case_tag::linear: {
            const double E = eval_quartic({a[0], 0, a[2], 0, a[4]}, pt.px, pt.py).value;
            const double O = eval_quartic({0, a[1], 0, a[3], 0}, pt.px, pt.py).value;
            out.push_back(pt.y * E + O);
            break;
        }
    }
    return out;
}

double poisson_bracket(const observable& f, const observable& g) {
    return f.grad[0] * g.grad[2] - f.grad[2] * g.grad[0] + f.grad[1] * g.grad[3] -
           f.grad[3] * g.grad[1];
}

double poisson_bracket_fd(const observable_set& obs, std::size_t f, std::size_t g,
                          const phase_point& pt, double step) {
    auto val = [&](std::size_t idx, double dx, double dy, double dpx, double dpy) {
        phase_point s = pt;
        s.x += dx;
        s.y += dy;
        s.px += dpx;
        s.py += dpy;
        return obs.eval(idx, s).value;
    };
    auto partials = [&](std::size_t idx) {
        std::array<double, 4> d{};
        d[0] = (val(idx, step, 0, 0, 0) - val(idx, -step, 0, 0, 0)) / (2 * step);
        d[1] = (val(idx, 0, step, 0, 0) - val(idx, 0, -step, 0, 0)) / (2 * step);
        d[2] = (val(idx, 0, 0, step, 0) - val(idx, 0, 0, -step, 0)) / (2 * step);
        d[3] = (val(idx, 0, 0, 0, step) - val(idx, 0, 0, 0, -step)) / (2 * step);
        return d;
    };
    const auto df = partials(f);
    const auto dg = partials(g);
    return df[0] * dg[2] - df[2] * dg[0] + df[1] * dg[3] - df[3] * dg[1];
}

double check_eigen_relation(const observable_set& obs, const std::vector<phase_point>& pts) {
    const parameter_set& P = obs.profile().params;
    const double mu = P.mu;
    double worst = 0.0;
    for (const phase_point& pt : pts) {
        const observable L = obs.eval(1, pt);
        if (P.tag == case_tag::linear) {
            const observable H = obs.eval(0, pt);
            const observable F = obs.eval(2, pt);
            const double Ha = 2.0 * H.value;
            const double rhs =
                P.a(4) * std::pow(L.value, 4) - P.a(2) * L.value * L.value * Ha - P.a(0) * Ha * Ha;
            const double lhs = poisson_bracket(L, F);
            worst = std::max(worst, std::abs(lhs - rhs) /
                                        (std::abs(lhs) + std::abs(rhs) + 1.0));
        } else {
            const observable Fa = obs.eval(2, pt);
            const observable Fb = obs.eval(3, pt);
            double r1, r2, scale;
            if (P.tag == case_tag::trig) {
                r1 = poisson_bracket(L, Fa) - mu * Fa.value;
                r2 = poisson_bracket(L, Fb) + mu * Fb.value;
            } else {
                r1 = poisson_bracket(L, Fa) + mu * Fb.value;
                r2 = poisson_bracket(L, Fb) - mu * Fa.value;
            }
            scale = mu * (std::abs(Fa.value) + std::abs(Fb.value)) + 1.0;
            worst = std::max({worst, std::abs(r1) / scale, std::abs(r2) / scale});
        }
    }
    return worst;
}

double check_conservation(const observable_set& obs, const std::vector<phase_point>& pts) {
    double worst = 0.0;
    for (const phase_point& pt : pts) {
        const observable H = obs.eval(0, pt);
        const double hscale = std::abs(H.grad[0]) + std::abs(H.grad[2]) + std::abs(H.grad[3]) + 1.0;
        for (std::size_t k = 1; k < obs.names().size(); ++k) {
            const observable G = obs.eval(k, pt);
            double gscale = 0.0;
            for (double d : G.grad) gscale += std::abs(d);
            worst = std::max(worst,
                             std::abs(poisson_bracket(H, G)) / (hscale * (gscale + 1.0)));
        }
    }
    return worst;
}

namespace {

// Eigenvalues of a symmetric 3x3 via cyclic Jacobi rotations.
std::array<double, 3> sym3_eigenvalues(std::array<std::array<double, 3>, 3> m) {
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::abs(m[0][1]) + std::abs(m[0][2]) + std::abs(m[1][2]);
        double diag = std::abs(m[0][0]) + std::abs(m[1][1]) + std::abs(m[2][2]);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (m[p][q] == 0.0) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
    }
    std::array<double, 3> ev{m[0][0], m[1][1], m[2][2]};
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

} // namespace

independence_report functional_independence(const observable_set& obs, const phase_point& pt,
                                            double tol) {
    std::array<std::array<double, 4>, 3> J{};
    J[0] = obs.eval(0, pt).grad;
    J[1] = obs.eval(1, pt).grad;
    J[2] = obs.eval(2, pt).grad;
    std::array<std::array<double, 3>, 3> m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k)
                s += J[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                     J[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
        }
    const auto ev = sym3_eigenvalues(m);
    independence_report r;
    for (int i = 0; i < 3; ++i)
        r.singular_values[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(0.0, ev[static_cast<std::size_t>(i)]));
    r.independent = r.singular_values[2] > tol * std::max(r.singular_values[0], 1e-300);
    return r;
}

} // namespace qf
