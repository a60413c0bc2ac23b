#include "qf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qf {

const char* flow_exit_name(flow_exit e) {
    switch (e) {
        case flow_exit::time_end: return "TimeEnd";
        case flow_exit::range_exit: return "RangeExit";
        case flow_exit::step_underflow: return "StepUnderflow";
        case flow_exit::singular: return "Singular";
    }
    return "?";
}

namespace {

constexpr int NS = 6; // x, y, px, py, h, p
using state = std::array<double, NS>;

constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double dp_b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double dp_b4[7] = {5179.0 / 57600, 0.0,       7571.0 / 16695, 393.0 / 640,
                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

state rhs(const state& s, const parameter_set& P) {
    const double px = s[2], py = s[3], h = s[4], p = s[5];
    const double q = h_xx_from_ode({s[0], h, p}, P);
    const double sq = px * px + py * py;
    state d{};
    d[0] = p * p * px;
    d[1] = p * p * py;
    d[2] = -p * q * sq;
    d[3] = 0.0;
    d[4] = p * d[0];
    d[5] = q * d[0];
    return d;
}

} // namespace

flow_result integrate_flow(const metric_profile& prof, const phase_point& init,
                           const flow_options& opt) {
    if (!(opt.t_end > 0) || !(opt.dt_sample > 0) || !(opt.tol > 0))
        throw error(errc::config_error, "flow options must be positive");
    const parameter_set& P = prof.params;
    const curve_point seed_jet = prof.at(init.x);

    state s{init.x, init.y, init.px, init.py, seed_jet.h, seed_jet.p};
    double t = 0.0;

    flow_result out;
    auto record = [&]() {
        trajectory_sample ts;
        ts.t = t;
        ts.state = {s[0], s[1], s[2], s[3]};
        ts.observables = observable_values(P, {s[0], s[4], s[5]}, ts.state);
        out.samples.push_back(std::move(ts));
    };
    record();
    const std::vector<double> ref = out.samples.front().observables;
    out.drift.assign(ref.size(), 0.0);

    double step = std::min(opt.dt_sample, opt.t_end / 100.0);
    double t_next = opt.dt_sample;
    const double step_min = opt.t_end * 1e-14;

    while (t < opt.t_end) {
        const double target = std::min(t_next, opt.t_end);
        if (t + step > target) step = target - t;
        state trial = s;
        double err = 0.0;
        bool accepted = true;
        try {
            double k[7][NS];
            for (int i = 0; i < 7; ++i) {
                state yi = trial;
                for (int j = 0; j < i; ++j)
                    for (int n = 0; n < NS; ++n) yi[static_cast<std::size_t>(n)] += step * dp_a[i][j] * k[j][n];
                (void)dp_c;
                const state d = rhs(yi, P);
                for (int n = 0; n < NS; ++n) k[i][n] = d[static_cast<std::size_t>(n)];
            }
            state y5 = trial, y4 = trial;
            for (int i = 0; i < 7; ++i)
                for (int n = 0; n < NS; ++n) {
                    y5[static_cast<std::size_t>(n)] += step * dp_b5[i] * k[i][n];
                    y4[static_cast<std::size_t>(n)] += step * dp_b4[i] * k[i][n];
                }
            for (int n = 0; n < NS; ++n) {
                const auto nu = static_cast<std::size_t>(n);
                const double sc = 1.0 + std::max(std::abs(trial[nu]), std::abs(y5[nu]));
                err = std::max(err, std::abs(y5[nu] - y4[nu]) / sc);
            }
            if (err > opt.tol) {
                accepted = false;
            } else {
                trial = y5;
            }
        } catch (const error& e) {
            if (e.code() == errc::singular_bracket) {
                out.exit = flow_exit::singular;
                out.t_final = t;
                return out;
            }
            throw;
        }
        if (!accepted) {
            step *= std::max(0.2, 0.9 * std::pow(opt.tol / err, 0.2));
            if (step < step_min) {
                out.exit = flow_exit::step_underflow;
                out.t_final = t;
                return out;
            }
            continue;
        }
        t += step;
        s = trial;
        if (opt.clip_to_profile && (s[0] < prof.x_min() || s[0] > prof.x_max())) {
            out.exit = flow_exit::range_exit;
            out.t_final = t;
            record();
            return out;
        }
        if (t >= t_next - 1e-15 * opt.t_end) {
            record();
            const std::vector<double>& cur = out.samples.back().observables;
            for (std::size_t i = 0; i < ref.size(); ++i)
                out.drift[i] = std::max(out.drift[i],
                                        std::abs(cur[i] - ref[i]) / (std::abs(ref[i]) + 1.0));
            t_next += opt.dt_sample;
        }
        step = std::min(opt.dt_sample,
                        step * std::min(5.0, 0.9 * std::pow(opt.tol / std::max(err, 1e-30), 0.2)));
    }
    out.exit = flow_exit::time_end;
    out.t_final = t;
    return out;
}

closure_report detect_closure(const flow_result& flow, double tol) {
    closure_report rep;
    if (flow.samples.size() < 10) return rep;
    const trajectory_sample& s0 = flow.samples.front();

    // Per-coordinate scales from the excursion of the trajectory.
    std::array<double, 4> lo{}, hi{};
    auto coord = [](const phase_point& p, int i) {
        return i == 0 ? p.x : i == 1 ? p.y : i == 2 ? p.px : p.py;
    };
    for (int i = 0; i < 4; ++i) {
        lo[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] = coord(s0.state, i);
    }
    for (const trajectory_sample& s : flow.samples)
        for (int i = 0; i < 4; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            lo[iu] = std::min(lo[iu], coord(s.state, i));
            hi[iu] = std::max(hi[iu], coord(s.state, i));
        }
    std::array<double, 4> scale{};
    for (std::size_t i = 0; i < 4; ++i) scale[i] = std::max(hi[i] - lo[i], 1e-9);

    // Squared scaled Euclidean distance: exactly quadratic in t near a
    // transversal pass, so the parabolic refinement below is exact there.
    auto dist2 = [&](const trajectory_sample& s) {
        double d = 0;
        for (int i = 0; i < 4; ++i) {
            const double r = (coord(s.state, i) - coord(s0.state, i)) /
                             scale[static_cast<std::size_t>(i)];
            d += r * r;
        }
        return d;
    };

    // Wait until the trajectory has moved away before testing for a return.
    std::size_t start = 1;
    while (start < flow.samples.size() && dist2(flow.samples[start]) < 0.01) ++start;

    rep.min_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = start + 1; k + 1 < flow.samples.size(); ++k) {
        const double dm = dist2(flow.samples[k - 1]);
        const double d0 = dist2(flow.samples[k]);
        const double dp = dist2(flow.samples[k + 1]);
        if (d0 <= dm && d0 <= dp) {
            const double denom = dm - 2 * d0 + dp;
            double shift = 0.0;
            if (std::abs(denom) > 1e-300) shift = 0.5 * (dm - dp) / denom;
            shift = std::clamp(shift, -1.0, 1.0);
            double d2_ref = d0;
            if (denom > 0.0)
                d2_ref = std::max(0.0, d0 - 0.125 * (dm - dp) * (dm - dp) / denom);
            const double d_ref = std::sqrt(d2_ref);
            if (d_ref < rep.min_distance) {
                rep.min_distance = d_ref;
                const double dt = flow.samples[k + 1].t - flow.samples[k].t;
                rep.period = flow.samples[k].t + shift * dt;
            }
            if (d_ref < tol && !rep.closed) {
                rep.closed = true;
                break;
            }
        }
    }
    if (!std::isfinite(rep.min_distance))
        rep.min_distance = std::sqrt(dist2(flow.samples.back()));
    return rep;
}

} // namespace qf
