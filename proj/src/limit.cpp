#include "necklace/limit.hpp"

#include <algorithm>
#include <cmath>

namespace necklace {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143268;
constexpr double kTermTol = 1e-17;

void check_start(const NecklaceSpec& spec, const StateId& start) {
    if (start == StateId::link(0)) return;
    const int last = spec.link_count() - 1;
    if (start.kind == StateId::Kind::interior && start.position == last &&
        spec.bead_at(last) && start.slot >= 1 && start.slot <= spec.bead_exit() - 1)
        return;
    fail(Errc::invalid_start, "start must be the link at position 0 or an interior "
                              "state of a bead at the last position");
}

} // namespace

double wrapped_gaussian(double c, double x) {
    if (!(c > 0.0)) fail(Errc::nonpositive_c, "c must be positive");
    const double s = std::sqrt(c);
    const auto term = [&](double k) {
        const double u = (k + x) / s;
        return std::exp(-0.5 * u * u) * kInvSqrt2Pi / s;
    };
    double acc = term(0.0);
    // March outward on each side; terms decay monotonically once |u| >= 1.
    for (double k = 1.0;; k += 1.0) {
        const double v = term(k);
        acc += v;
        if (v < kTermTol && (k + x) / s >= 1.0) break;
    }
    for (double k = -1.0;; k -= 1.0) {
        const double v = term(k);
        acc += v;
        if (v < kTermTol && (k + x) / s <= -1.0) break;
    }
    return acc;
}

double wrapped_gaussian_fixed(double c, double x, int terms) {
    if (!(c > 0.0)) fail(Errc::nonpositive_c, "c must be positive");
    if (terms < 0) fail(Errc::out_of_range, "term count must be nonnegative");
    const double s = std::sqrt(c);
    double acc = 0.0;
    for (int k = -terms; k <= terms; ++k) {
        const double u = (static_cast<double>(k) + x) / s;
        acc += std::exp(-0.5 * u * u) * kInvSqrt2Pi / s;
    }
    return acc;
}

double time_scale_real(int links, int beads, double mean_fpt, double var_fpt) {
    if (links < 1 || beads < 1 || beads > links)
        fail(Errc::out_of_range, "need 1 <= beads <= links");
    if (!(var_fpt > 0.0))
        fail(Errc::degenerate_variance, "time scale needs positive variance");
    const double w = links + (mean_fpt - 1.0) * beads;
    return w * w * w / (var_fpt * beads);
}

long long time_scale(int links, int beads, double mean_fpt, double var_fpt, double c) {
    if (!(c > 0.0)) fail(Errc::nonpositive_c, "c must be positive");
    return std::llround(c * time_scale_real(links, beads, mean_fpt, var_fpt));
}

double back_solve_c(const NecklaceSpec& spec, long long t) {
    if (t < 0) fail(Errc::out_of_range, "t must be nonnegative");
    return static_cast<double>(t) /
           time_scale_real(spec.link_count(), spec.bead_count(), spec.mean_fpt(),
                           spec.var_fpt());
}

double tv_limit(double c) {
    if (!(c > 0.0)) fail(Errc::nonpositive_c, "c must be positive");
    const auto grid = [&](int N) {
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            s += std::abs(wrapped_gaussian(c, (i + 0.5) / N) - 1.0);
        return 0.5 * s / N;
    };
    double prev = grid(64);
    for (int N = 128; N <= (1 << 24); N *= 2) {
        const double cur = grid(N);
        if (std::abs(cur - prev) < 1e-8) return cur;
        prev = cur;
    }
    fail(Errc::numerical_drift, "quadrature failed to settle");
}

LltReport llt_predict(const Necklace& chain, long long t, const StateId& start) {
    const NecklaceSpec& spec = chain.spec;
    check_start(spec, start);
    LltReport rep;
    rep.t = t;
    rep.c = back_solve_c(spec, t);
    if (!(rep.c > 0.0)) fail(Errc::nonpositive_c, "t too small for a positive c");
    const Eigen::VectorXd pi = stationary(chain);
    const Eigen::VectorXd exact = evolve(chain.op, point_mass(spec, start), t);
    const double W = spec.weight();
    const double mu = spec.mean_fpt();
    const int size = spec.size();
    rep.abscissa.resize(static_cast<size_t>(size));
    rep.predicted.resize(static_cast<size_t>(size));
    rep.exact.resize(static_cast<size_t>(size));
    for (int idx = 0; idx < size; ++idx) {
        const StateId id = spec.state_of(idx);
        const double x = (static_cast<double>(t) - id.position -
                          (mu - 1.0) * spec.beads_before(id.position)) /
                         W;
        rep.abscissa[static_cast<size_t>(idx)] = x;
        rep.predicted[static_cast<size_t>(idx)] = pi(idx) * wrapped_gaussian(rep.c, x);
        rep.exact[static_cast<size_t>(idx)] = exact(idx);
        rep.max_abs_error =
            std::max(rep.max_abs_error,
                     std::abs(rep.predicted[static_cast<size_t>(idx)] - exact(idx)));
    }
    rep.scaled_error = spec.link_count() * rep.max_abs_error;
    return rep;
}

std::vector<ProfilePoint> figure_profile(const Necklace& chain, long long t,
                                         const StateId& start, ProfileMode mode) {
    const NecklaceSpec& spec = chain.spec;
    check_start(spec, start);
    const Eigen::VectorXd exact = evolve(chain.op, point_mass(spec, start), t);
    const Eigen::VectorXd pi = stationary(chain);
    const double W = spec.weight();
    const double mu = spec.mean_fpt();
    std::vector<ProfilePoint> points;
    points.reserve(static_cast<size_t>(spec.size()));
    for (int idx = 0; idx < spec.size(); ++idx) {
        const StateId id = spec.state_of(idx);
        ProfilePoint p;
        p.state = id;
        if (mode == ProfileMode::raw) {
            p.x = idx;
            p.y = exact(idx);
        } else {
            const double x = (static_cast<double>(t) - id.position -
                              (mu - 1.0) * spec.beads_before(id.position)) /
                             W;
            p.x = x - std::floor(x);
            p.y = (mode == ProfileMode::normalized) ? exact(idx) / pi(idx) : exact(idx);
        }
        points.push_back(p);
    }
    return points;
}

std::vector<TvPoint> tv_curve(const Necklace& chain, const StateId& start,
                              const std::vector<double>& cs) {
    const NecklaceSpec& spec = chain.spec;
    check_start(spec, start);
    const Eigen::VectorXd pi = stationary(chain);
    const Eigen::VectorXd origin = point_mass(spec, start);
    std::vector<TvPoint> out;
    out.reserve(cs.size());
    for (double c : cs) {
        TvPoint p;
        p.c = c;
        p.t = time_scale(spec.link_count(), spec.bead_count(), spec.mean_fpt(),
                         spec.var_fpt(), c);
        p.exact = tv_distance(evolve(chain.op, origin, p.t), pi);
        p.limit = tv_limit(c);
        out.push_back(p);
    }
    return out;
}

double optimal_hold(double bead_fraction) {
    if (!(bead_fraction > 0.0 && bead_fraction <= 1.0))
        fail(Errc::out_of_range, "bead fraction must lie in (0,1]");
    if (bead_fraction == 1.0) return 0.5;
    const double k = bead_fraction;
    return (-k + std::sqrt(k * k - k + 1.0)) / (1.0 - k);
}

} // namespace necklace
