#include "qf/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qf {

polynomial_relation relation_coefficients(const parameter_set& P) {
    const double mu = P.mu;
    const double A0 = P.a(0), A1 = P.a(1), A2 = P.a(2), A3 = P.a(3), A4 = P.a(4);
    const double A5 = P.a(5), A6 = P.a(6);
    polynomial_relation r;
    switch (P.tag) {
        case case_tag::trig:
            r.bracket_terms = {
                {3, 1, (4.0 / mu) * A0 * A2 - 2.0 * mu * A1 * A1},
                {2, 3, (4.0 * A2 * A2 - A6) / mu},
                {1, 5, -6.0 * mu * A5},
                {0, 7, 8.0 * (mu * A3 * A3 + A4 * A4 / mu)},
            };
            r.product_terms = {
                {4, 0, -A0 * A0 / (mu * mu)},
                {3, 2, A1 * A1 - 2.0 * A0 * A2 / (mu * mu)},
                {2, 4, -(4.0 * A2 * A2 - A6) / (4.0 * mu * mu)},
                {1, 6, A5},
                {0, 8, -(A3 * A3 + A4 * A4 / (mu * mu))},
            };
            break;
        case case_tag::hyper:
            r.bracket_terms = {
                {3, 1, -(4.0 * A0 * A2 / mu + 2.0 * mu * A1 * A1)},
                {2, 3, -(4.0 * A2 * A2 - A6) / mu},
                {1, 5, -6.0 * mu * A5},
                {0, 7, -8.0 * (A4 * A4 / mu - mu * A3 * A3)},
            };
            r.product_terms = {
                {4, 0, -A0 * A0 / (mu * mu)},
                {3, 2, -(A1 * A1 + 2.0 * A0 * A2 / (mu * mu))},
                {2, 4, -(4.0 * A2 * A2 - A6) / (4.0 * mu * mu)},
                {1, 6, -A5},
                {0, 8, A3 * A3 - A4 * A4 / (mu * mu)},
            };
            break;
        case case_tag::linear:
            throw error(errc::linear_case_unsupported,
                        "the linear family closes through the eigen relation");
    }
    return r;
}

std::vector<phase_point> sample_phase_points(const metric_profile& prof, std::size_t n,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double w = prof.x_max() - prof.x_min();
    std::uniform_real_distribution<double> ux(prof.x_min() + 0.05 * w, prof.x_max() - 0.05 * w);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    std::uniform_real_distribution<double> um(-1.5, 1.5);
    std::vector<phase_point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        phase_point pt;
        pt.x = ux(rng);
        pt.y = uy(rng);
        pt.px = um(rng);
        pt.py = um(rng);
        pts.push_back(pt);
    }
    return pts;
}

namespace {

identity_report verify_relation(const observable_set& obs, const std::vector<phase_point>& pts,
                                bool product) {
    const parameter_set& P = obs.profile().params;
    const polynomial_relation rel = relation_coefficients(P);
    const std::vector<relation_term>& terms = product ? rel.product_terms : rel.bracket_terms;

    identity_report rep;
    rep.identity = product ? "product" : "bracket";
    rep.n_points = pts.size();
    for (const phase_point& pt : pts) {
        const observable H = obs.eval(0, pt);
        const observable Fa = obs.eval(2, pt);
        const observable Fb = obs.eval(3, pt);
        const double Ha = 2.0 * H.value;
        const double L = pt.py;
        double value;
        if (product) {
            value = (P.tag == case_tag::trig) ? Fa.value * Fb.value
                                              : Fa.value * Fa.value + Fb.value * Fb.value;
        } else {
            const double br = poisson_bracket(Fa, Fb);
            value = (P.tag == case_tag::trig) ? br : 2.0 * br;
        }
        double sum = value, scale = std::abs(value);
        for (const relation_term& t : terms) {
            const double m = t.coeff * std::pow(Ha, t.h_pow) * std::pow(L, t.l_pow);
            sum += m;
            scale += std::abs(m);
        }
        const double resid = std::abs(sum) / std::max(scale, 1e-300);
        if (resid > rep.max_residual) {
            rep.max_residual = resid;
            rep.worst_point = pt;
        }
    }
    return rep;
}

} // namespace

identity_report verify_bracket_identity(const observable_set& obs,
                                        const std::vector<phase_point>& pts) {
    return verify_relation(obs, pts, false);
}

identity_report verify_product_identity(const observable_set& obs,
                                        const std::vector<phase_point>& pts) {
    return verify_relation(obs, pts, true);
}

double check_bracket_consistency(const observable_set& obs, const std::vector<phase_point>& pts,
                                 double step) {
    double worst = 0.0;
    const std::size_t n = obs.names().size();
    for (const phase_point& pt : pts) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const observable f = obs.eval(i, pt);
                const observable g = obs.eval(j, pt);
                const double analytic = poisson_bracket(f, g);
                const double fd = poisson_bracket_fd(obs, i, j, pt, step);
                double fs = 0, gs = 0;
                for (int k = 0; k < 4; ++k) {
                    fs += std::abs(f.grad[static_cast<std::size_t>(k)]);
                    gs += std::abs(g.grad[static_cast<std::size_t>(k)]);
                }
                worst = std::max(worst, std::abs(analytic - fd) / (fs * gs + 1.0));
            }
    }
    return worst;
}

} // namespace qf
