#include "qf/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qf {

sphere_scan blowup_scan(double A2, double A5, double A6, double R_max, std::size_t n_grid) {
    if (A6 < 0.0) throw error(errc::config_error, "blow-up scan assumes A6 >= 0");
    if (!(R_max > 1.0) || n_grid < 16) throw error(errc::config_error, "bad scan grid");
    sphere_scan s;
    s.A2 = A2;
    s.A5 = A5;
    s.A6 = A6;
    s.R_max = R_max;
    s.n_grid = n_grid;

    auto lhs = [&](double R) {
        const double u = A2 * (R * R - 1.0) + A5 * R;
        return u * u * R;
    };
    auto rhs = [&](double R) {
        const double w = R * R + 1.0;
        return (R * R + 0.25 * A6 * R + 1.0) * w * w;
    };

    const double R_min = 1.0 / R_max;
    const double step = std::log(R_max / R_min) / static_cast<double>(n_grid - 1);
    double prev_diff = 0.0;
    s.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double R = R_min * std::exp(step * static_cast<double>(i));
        const double d = rhs(R) - lhs(R);
        s.min_margin = std::min(s.min_margin, d / rhs(R));
        if (i > 0 && ((d < 0.0) != (prev_diff < 0.0))) ++s.crossings;
        prev_diff = d;
    }
    // LHS is degree 5 in R, RHS degree 6: the ratio must already be small
    // and still falling at the end of the scan.
    const double tail1 = lhs(R_max / 2.0) / rhs(R_max / 2.0);
    const double tail2 = lhs(R_max) / rhs(R_max);
    s.tail_ok = tail2 < 0.5 && tail2 <= tail1; // equality covers LHS == 0
    s.no_blow_up = s.crossings == 0 && s.min_margin > 0.0 && s.tail_ok;
    return s;
}

r_profile profile_in_r(const metric_profile& prof) {
    if (prof.params.tag != case_tag::hyper)
        throw error(errc::chart_domain, "the r = e^{mu x} chart needs the hyperbolic case");
    r_profile rp;
    rp.r.reserve(prof.grid.size());
    for (const grid_point& g : prof.grid) {
        rp.r.push_back(std::exp(prof.params.mu * g.x));
        rp.h.push_back(g.h);
        rp.p.push_back(g.p);
    }
    return rp;
}

namespace {

// Least-squares slope of v against u.
double ls_slope(const std::vector<double>& u, const std::vector<double>& v) {
    const double n = static_cast<double>(u.size());
    double su = 0, sv = 0, suu = 0, suv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
        suu += u[i] * u[i];
        suv += u[i] * v[i];
    }
    return (n * suv - su * sv) / (n * suu - su * su);
}

std::vector<std::size_t> window(const r_profile& rp, double r_lo, double r_hi) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rp.r.size(); ++i)
        if (rp.r[i] >= r_lo && rp.r[i] <= r_hi) idx.push_back(i);
    return idx;
}

} // namespace

puiseux_result puiseux_exponent(const r_profile& rp, double r_lo, double r_hi) {
    const auto idx = window(rp, r_lo, r_hi);
    if (idx.size() < 8)
        throw error(errc::out_of_range, "profile does not cover the Puiseux fit window");
    std::vector<double> lr, lh, lp;
    for (std::size_t i : idx) {
        if (rp.h[i] == 0.0 || rp.p[i] == 0.0)
            throw error(errc::slope_unclassifiable, "vanishing sample inside the fit window");
        lr.push_back(std::log(rp.r[i]));
        lh.push_back(std::log(std::abs(rp.h[i])));
        lp.push_back(std::log(std::abs(rp.p[i])));
    }
    puiseux_result out;
    out.exponent_h = ls_slope(lr, lh);
    out.exponent_p = ls_slope(lr, lp);
    if (std::abs(out.exponent_h - out.exponent_p) > 0.05)
        throw error(errc::slope_unclassifiable, "h and p do not share a leading power");
    out.exponent = 0.5 * (out.exponent_h + out.exponent_p);
    if (std::abs(out.exponent + 0.5) <= 0.02) {
        out.n = 2;
    } else if (std::abs(out.exponent + 0.25) <= 0.02) {
        out.n = 4;
    } else {
        throw error(errc::slope_unclassifiable, "leading power is neither -1/2 nor -1/4");
    }
    return out;
}

namespace {

// Polynomial fit of degree d (<= 3) by normal equations.
std::vector<double> poly_fit(const std::vector<double>& x, const std::vector<double>& y, int d) {
    const int m = d + 1;
    double A[4][5] = {};
    for (std::size_t k = 0; k < x.size(); ++k) {
        double xp[7] = {1, 0, 0, 0, 0, 0, 0};
        for (int i = 1; i <= 2 * d; ++i) xp[i] = xp[i - 1] * x[k];
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) A[i][j] += xp[i + j];
            A[i][m] += xp[i] * y[k];
        }
    }
    for (int c = 0; c < m; ++c) { // Gaussian elimination with partial pivoting
        int piv = c;
        for (int rr = c + 1; rr < m; ++rr)
            if (std::abs(A[rr][c]) > std::abs(A[piv][c])) piv = rr;
        for (int j = 0; j <= m; ++j) std::swap(A[c][j], A[piv][j]);
        for (int rr = 0; rr < m; ++rr) {
            if (rr == c || A[c][c] == 0.0) continue;
            const double f = A[rr][c] / A[c][c];
            for (int j = c; j <= m; ++j) A[rr][j] -= f * A[c][j];
        }
    }
    std::vector<double> b(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        b[static_cast<std::size_t>(i)] = (A[i][i] == 0.0) ? 0.0 : A[i][m] / A[i][i];
    return b;
}

} // namespace

pole_chart_result pole_chart(const r_profile& rp, int n) {
    if (n != 2 && n != 4) throw error(errc::config_error, "chart order n must be 2 or 4");
    pole_chart_result out;
    out.n = n;
    const auto idx = window(rp, 0.0, 1e-2);
    if (idx.size() < 8)
        throw error(errc::out_of_range, "profile does not reach the pole chart window");
    for (std::size_t i : idx) {
        const double rho = std::pow(rp.r[i], 1.0 / n);
        out.rho.push_back(rho);
        out.f1.push_back(rho * rp.p[i]);
    }
    const std::vector<double> b = poly_fit(out.rho, out.f1, 3);
    out.f1_at_0 = b[0];
    double scale = 0.0;
    for (double v : out.f1) scale = std::max(scale, std::abs(v));
    double resid = 0.0;
    for (std::size_t k = 0; k < out.rho.size(); ++k) {
        const double rho = out.rho[k];
        const double fit = b[0] + rho * (b[1] + rho * (b[2] + rho * b[3]));
        resid = std::max(resid, std::abs(fit - out.f1[k]));
    }
    out.fit_residual = resid / std::max(scale, 1e-300);
    if (std::abs(out.f1_at_0) <= 1e-3 * scale)
        throw error(errc::vanishing_f1, "f1 extrapolates to zero at the pole");
    out.smooth = out.fit_residual < 1e-2;
    return out;
}

extension_report check_integral_extension(const r_profile& rp) {
    const auto idx = window(rp, 0.0, 1e-2);
    if (idx.size() < 8)
        throw error(errc::out_of_range, "profile does not reach the extension window");
    extension_report out;
    {
        // c0^2 = lim r h^2, taken at the small end of the window.
        double best_r = std::numeric_limits<double>::infinity();
        for (std::size_t i : idx)
            if (rp.r[i] < best_r) {
                best_r = rp.r[i];
                out.c0_sq = rp.r[i] * rp.h[i] * rp.h[i];
            }
    }
    const double y = 0.75; // fixed chart angle; xi = r cos y, eta = r sin y
    std::array<std::vector<double>, 3> logs;
    std::vector<double> lr;
    for (std::size_t i : idx) {
        const double r = rp.r[i], h = rp.h[i], hp = rp.h[i] * rp.p[i];
        const double xi2 = r * r * std::cos(y) * std::cos(y);
        const double eta2 = r * r * std::sin(y) * std::sin(y);
        const std::array<double, 3> c = {
            h * h + 2.0 * hp,
            xi2 * (h * h + hp) - eta2 * hp,
            xi2 * h * h - 2.0 * eta2 * hp,
        };
        lr.push_back(std::log(r));
        for (std::size_t k = 0; k < 3; ++k) {
            out.max_abs[k] = std::max(out.max_abs[k], std::abs(c[k]));
            logs[k].push_back(std::log(std::max(std::abs(c[k]), 1e-300)));
        }
    }
    out.bounded = true;
    for (std::size_t k = 0; k < 3; ++k) {
        out.growth_slope[k] = ls_slope(lr, logs[k]);
        if (out.max_abs[k] > 1e-10 && out.growth_slope[k] < -0.3) out.bounded = false;
    }
    if (!out.bounded)
        throw error(errc::divergent_combination,
                    "an extension combination grows like a negative power of r");
    return out;
}

namespace {

pole_report analyze_pole(const metric_profile& prof) {
    pole_report rep;
    rep.limit_x = prof.x_min();
    const r_profile rp = profile_in_r(prof);
    // The fit window sits at r in [1e-6, 1e-3]; a trace stopped by a fold
    // of the defining curve never gets there.
    if (std::exp(prof.params.mu * prof.x_min()) > 1e-6) return rep;
    rep.reached = true;
    rep.exponent = puiseux_exponent(rp);
    rep.chart = pole_chart(rp, rep.exponent.n);
    if (rep.exponent.n == 2) {
        rep.extension = check_integral_extension(rp);
        rep.checked_extension = true;
    }
    return rep;
}

bool pole_ok(const pole_report& rep) {
    return rep.reached && rep.chart.smooth &&
           (!rep.checked_extension || rep.extension.bounded);
}

} // namespace

sphere_certificate build_sphere_case(double A2, double A5, double A6, const curve_point& seed) {
    sphere_certificate cert;
    cert.scan = blowup_scan(A2, A5, A6);

    parameter_set P;
    P.tag = case_tag::hyper;
    P.mu = 1.0;
    P.A = {-1.0, 0.0, A2, 1.0, 0.0, A5, A6};
    cert.params = P;
    if (!cert.scan.no_blow_up) return cert; // blow-up candidate: stop here

    parameter_set base = P;
    base.A[5] = base.A[6] = 0.0;
    {
        const auto [d5, d6] = derive_A5_A6(base, seed);
        const double tol = 1e-8 * (1.0 + std::abs(A5) + std::abs(A6));
        if (std::abs(d5 - A5) > tol || std::abs(d6 - A6) > tol)
            throw error(errc::config_error, "seed does not satisfy the curve for (A5, A6)");
    }

    const metric_profile south = trace_profile(base, seed, seed.x - 16.5, seed.x + 2.0, 1e-12);
    cert.traced = true;
    cert.south = analyze_pole(south);

    // North pole through the x -> -x symmetry of the system.
    parameter_set flipped = base;
    symmetry_transform flip;
    flip.x_flip = true;
    flipped = apply_symmetry(flip, flipped);
    const curve_point north_seed{-seed.x, seed.h, -seed.p};
    const metric_profile north =
        trace_profile(flipped, north_seed, -seed.x - 16.5, -seed.x + 2.0, 1e-12);
    cert.north = analyze_pole(north);

    cert.global_extension = cert.scan.no_blow_up && pole_ok(cert.south) && pole_ok(cert.north);
    return cert;
}

} // namespace qf
