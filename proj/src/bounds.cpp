#include "necklace/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "necklace/limit.hpp"

namespace necklace {

namespace {

void check_probability_vector(const Eigen::VectorXd& pi) {
    for (int i = 0; i < pi.size(); ++i)
        if (!(pi(i) > 0.0))
            fail(Errc::zero_mass_state, "state " + std::to_string(i) + " carries no mass");
}

ReversibleOperator make_reversible(Eigen::MatrixXd op, Eigen::VectorXd pi) {
    const int n = static_cast<int>(op.rows());
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (std::abs(pi(x) * op(x, y) - pi(y) * op(y, x)) > 1e-10)
                fail(Errc::not_reversible, "detailed balance fails on edge " +
                                               std::to_string(x) + "-" + std::to_string(y));
    return ReversibleOperator{std::move(op), std::move(pi)};
}

// Undirected adjacency of the off-diagonal support.
std::vector<std::vector<int>> support_graph(const Eigen::MatrixXd& K) {
    const int n = static_cast<int>(K.rows());
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y && (K(x, y) > 0.0 || K(y, x) > 0.0))
                adj[static_cast<size_t>(x)].push_back(y);
    return adj;
}

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int from) {
    std::vector<int> dist(adj.size(), -1);
    std::deque<int> queue{from};
    dist[static_cast<size_t>(from)] = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<size_t>(u)])
            if (dist[static_cast<size_t>(v)] < 0) {
                dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                queue.push_back(v);
            }
    }
    return dist;
}

} // namespace

Eigen::MatrixXd reverse_operator(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
    const int n = static_cast<int>(P.rows());
    if (P.cols() != n || pi.size() != n)
        fail(Errc::dimension_mismatch, "operator and distribution sizes disagree");
    check_probability_vector(pi);
    if ((P.transpose() * pi - pi).cwiseAbs().maxCoeff() > 1e-10)
        fail(Errc::not_stationary, "distribution is not stationary for the operator");
    Eigen::MatrixXd rev(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) rev(x, y) = pi(y) * P(y, x) / pi(x);
    for (int x = 0; x < n; ++x)
        if (std::abs(rev.row(x).sum() - 1.0) > 1e-12)
            fail(Errc::numerical_drift, "reversal row " + std::to_string(x) +
                                            " does not sum to 1");
    return rev;
}

ReversibleOperator mult_symmetrization(const Eigen::MatrixXd& P,
                                       const Eigen::VectorXd& pi) {
    Eigen::MatrixXd M = P * reverse_operator(P, pi);
    return make_reversible(std::move(M), pi);
}

SpectralResult second_eigenvalue(const ReversibleOperator& K) {
    const int n = static_cast<int>(K.op.rows());
    check_probability_vector(K.pi);
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (std::abs(K.pi(x) * K.op(x, y) - K.pi(y) * K.op(y, x)) > 1e-10)
                fail(Errc::not_reversible, "operator is not reversible for its "
                                           "distribution");
    if (n == 1) return {0.0, true};

    const auto adj = support_graph(K.op);
    const auto dist = bfs_distances(adj, 0);
    for (int x = 0; x < n; ++x)
        if (dist[static_cast<size_t>(x)] < 0) return {1.0, false};

    Eigen::MatrixXd S(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            S(x, y) = std::sqrt(K.pi(x) / K.pi(y)) * K.op(x, y);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success)
        fail(Errc::numerical_drift, "eigenvalue solve failed");
    return {solver.eigenvalues()(n - 2), true};
}

double fill_bound(const Eigen::VectorXd& pi, int start, double beta1, long long t) {
    if (start < 0 || start >= pi.size())
        fail(Errc::out_of_range, "start index out of range");
    if (!(pi(start) > 0.0)) fail(Errc::zero_mass_state, "start carries no mass");
    if (!(beta1 >= 0.0 && beta1 <= 1.0))
        fail(Errc::out_of_range, "beta1 must lie in [0,1]");
    if (t < 0) fail(Errc::out_of_range, "t must be nonnegative");
    const double raw = 0.5 / std::sqrt(pi(start)) *
                       std::pow(beta1, static_cast<double>(t) / 2.0);
    return std::min(raw, 1.0);
}

double comparison_bound(const ReversibleOperator& K, const ReversibleOperator& ref) {
    const int n = static_cast<int>(K.op.rows());
    if (ref.op.rows() != n)
        fail(Errc::dimension_mismatch, "chains live on different state spaces");
    check_probability_vector(K.pi);
    check_probability_vector(ref.pi);
    double min_mass = std::numeric_limits<double>::infinity();
    for (int x = 0; x < n; ++x) min_mass = std::min(min_mass, ref.pi(x) / K.pi(x));
    double min_edge = std::numeric_limits<double>::infinity();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || !(K.op(x, y) > 0.0)) continue;
            if (!(ref.op(x, y) > 0.0))
                fail(Errc::support_violation, "reference chain misses edge " +
                                                  std::to_string(x) + "->" +
                                                  std::to_string(y));
            min_edge = std::min(min_edge,
                                K.pi(x) * K.op(x, y) / (ref.pi(x) * ref.op(x, y)));
        }
    if (!std::isfinite(min_edge))
        fail(Errc::support_violation, "chain has no off-diagonal edges");
    return 1.0 - min_mass * min_edge * (1.0 - second_eigenvalue(ref).beta1);
}

GrowthReport moderate_growth(const Eigen::MatrixXd& K, const Eigen::VectorXd& pi,
                             double amplitude, double dimension) {
    const int n = static_cast<int>(K.rows());
    if (pi.size() != n)
        fail(Errc::dimension_mismatch, "operator and distribution sizes disagree");
    check_probability_vector(pi);
    if (!(amplitude > 0.0)) fail(Errc::out_of_range, "amplitude must be positive");

    GrowthReport rep;
    rep.amplitude = amplitude;
    rep.dimension = dimension;
    const auto adj = support_graph(K);
    rep.dist.resize(n, n);
    for (int x = 0; x < n; ++x) {
        const auto dist = bfs_distances(adj, x);
        for (int y = 0; y < n; ++y) {
            if (dist[static_cast<size_t>(y)] < 0)
                fail(Errc::disconnected, "support graph is disconnected");
            rep.dist(x, y) = dist[static_cast<size_t>(y)];
        }
    }
    rep.diameter = rep.dist.maxCoeff();

    rep.volume = Eigen::MatrixXd::Zero(n, rep.diameter + 1);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int r = rep.dist(x, y); r <= rep.diameter; ++r)
                rep.volume(x, r) += pi(y);

    rep.worst_ratio = std::numeric_limits<double>::infinity();
    for (int x = 0; x < n; ++x)
        for (int r = 0; r <= rep.diameter; ++r) {
            // ratio of actual ball mass to the required lower envelope
            const double required =
                (rep.diameter == 0)
                    ? 1.0 / amplitude
                    : std::pow(static_cast<double>(r + 1) / rep.diameter, dimension) /
                          amplitude;
            const double ratio = rep.volume(x, r) / required;
            if (ratio < rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.witness_state = x;
                rep.witness_radius = r;
            }
        }
    rep.passed = rep.worst_ratio >= 1.0 - 1e-12;
    return rep;
}

PathFamily geodesic_paths(const Eigen::MatrixXd& K) {
    const int n = static_cast<int>(K.rows());
    const auto adj = support_graph(K);
    std::vector<std::vector<int>> dist_to(static_cast<size_t>(n));
    for (int w = 0; w < n; ++w) {
        dist_to[static_cast<size_t>(w)] = bfs_distances(adj, w);
        for (int x = 0; x < n; ++x)
            if (dist_to[static_cast<size_t>(w)][static_cast<size_t>(x)] < 0)
                fail(Errc::disconnected, "support graph is disconnected");
    }
    PathFamily paths(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w) {
            if (z == w) continue;
            const auto& dw = dist_to[static_cast<size_t>(w)];
            std::vector<int> path{z};
            int cur = z;
            while (cur != w) {
                // smallest next vertex still on a shortest route
                int next = -1;
                for (int v : adj[static_cast<size_t>(cur)])
                    if (dw[static_cast<size_t>(v)] ==
                            dw[static_cast<size_t>(cur)] - 1 &&
                        (next < 0 || v < next))
                        next = v;
                path.push_back(next);
                cur = next;
            }
            paths[static_cast<size_t>(z) * static_cast<size_t>(n) +
                  static_cast<size_t>(w)] = std::move(path);
        }
    return paths;
}

NashConstants nash_constants(const ReversibleOperator& M, const PathFamily& paths,
                             const GrowthReport& growth) {
    const int n = static_cast<int>(M.op.rows());
    if (static_cast<int>(paths.size()) != n * n || growth.dist.rows() != n)
        fail(Errc::dimension_mismatch, "paths or growth data do not match the chain");
    check_probability_vector(M.pi);

    struct Use {
        int z;
        int w;
        int length;
        int dist;
    };
    // uses[x*n+y] lists the ordered pairs whose path traverses the directed
    // edge (x,y).
    std::vector<std::vector<Use>> uses(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w) {
            if (z == w) continue;
            const auto& path = paths[static_cast<size_t>(z) * static_cast<size_t>(n) +
                                     static_cast<size_t>(w)];
            if (path.size() < 2 || path.front() != z || path.back() != w)
                fail(Errc::invalid_path, "path for " + std::to_string(z) + "->" +
                                             std::to_string(w) + " is malformed");
            for (size_t s = 0; s + 1 < path.size(); ++s) {
                const int x = path[s];
                const int y = path[s + 1];
                if (x < 0 || x >= n || y < 0 || y >= n || x == y ||
                    !(M.op(x, y) > 0.0))
                    fail(Errc::invalid_path, "path for " + std::to_string(z) + "->" +
                                                 std::to_string(w) +
                                                 " leaves the edge set");
                uses[static_cast<size_t>(x) * static_cast<size_t>(n) +
                     static_cast<size_t>(y)]
                    .push_back(Use{z, w, static_cast<int>(path.size()) - 1,
                                   growth.dist(z, w)});
            }
        }

    NashConstants consts;
    consts.a1 = std::sqrt(std::exp(1.0) * (1.0 + growth.dimension) * growth.amplitude) *
                std::pow(4.0 * (2.0 + growth.dimension), growth.dimension / 4.0);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || !(M.op(x, y) > 0.0)) continue;
            const auto& through =
                uses[static_cast<size_t>(x) * static_cast<size_t>(n) +
                     static_cast<size_t>(y)];
            for (int r = 1; r <= growth.diameter; ++r) {
                double inner = 0.0;
                for (const Use& u : through)
                    if (u.dist <= r)
                        inner += u.length * M.pi(u.z) * M.pi(u.w) /
                                 growth.volume(u.z, r);
                const double value = 2.0 * inner /
                                     (static_cast<double>(r) * r * M.pi(x) * M.op(x, y));
                if (value > consts.a) {
                    consts.a = value;
                    consts.witness_x = x;
                    consts.witness_y = y;
                    consts.witness_radius = r;
                }
            }
        }
    return consts;
}

NashBound nash_bound(const NashConstants& consts, int diameter, long long extra_steps) {
    if (extra_steps < 0) fail(Errc::out_of_range, "extra steps must be nonnegative");
    if (!(consts.a > 0.0) || diameter < 1)
        fail(Errc::out_of_range, "bound needs a positive congestion constant");
    const double agsq = consts.a * static_cast<double>(diameter) * diameter;
    NashBound out;
    out.t = static_cast<long long>(std::ceil(agsq)) + extra_steps + 1;
    out.raw = 0.5 * consts.a1 * std::exp(-static_cast<double>(extra_steps) / agsq);
    out.bound = std::min(out.raw, 1.0);
    return out;
}

long long steps_needed(StepsMethod method, double eps, int n, double p) {
    if (!(eps > 0.0 && eps < 1.0)) fail(Errc::out_of_range, "eps must lie in (0,1)");
    if (n < 3) fail(Errc::out_of_range, "need n >= 3");
    if (!(p > 0.0 && p < 1.0)) fail(Errc::out_of_range, "p must lie in (0,1)");
    const double q = 1.0 - p;

    if (method == StepsMethod::nash) {
        const double lead = (1.0 - p * q) * (1.0 - p * q) / (q * std::min(q * q, p * q));
        const double budget = 1.0 + 0.25 * std::log(48.0 * std::exp(2.0)) +
                              0.5 * std::log(1.0 / q) - std::log(eps);
        const double expr =
            lead * budget * static_cast<double>(n - 1) * (n - 1) + 1.0;
        return static_cast<long long>(std::floor(expr)) + 1;
    }

    // One unit of limiting time equals this many steps of the hold chain.
    const double scale = time_scale_real(n, n - 1, 1.0 / q, p / (q * q));
    double lo = 1e-9;
    while (tv_limit(lo) < eps) lo *= 0.5;
    double hi = 1.0;
    while (tv_limit(hi) >= eps) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (tv_limit(mid) >= eps ? lo : hi) = mid;
    }
    long long t = std::max<long long>(
        1, static_cast<long long>(std::floor(lo * scale)));
    while (!(tv_limit(static_cast<double>(t) / scale) < eps)) ++t;
    return t;
}

Section4 build_section4(int n, double p) {
    if (n < 3) fail(Errc::out_of_range, "need n >= 3");
    if (!(p > 0.0 && p < 1.0)) fail(Errc::out_of_range, "p must lie in (0,1)");
    const double q = 1.0 - p;
    Section4 s;

    s.P = Eigen::MatrixXd::Zero(n, n);
    s.P(0, n - 1) = 1.0;
    s.P(1, 0) = q;
    s.P(1, n - 1) = p;
    for (int i = 2; i < n; ++i) s.P(i, i - 1) = 1.0;

    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n - 1; ++k) power = (power * s.P).eval();
    Eigen::MatrixXd displayed = Eigen::MatrixXd::Zero(n, n);
    displayed(0, 1) = 1.0;
    for (int i = 1; i < n - 1; ++i) {
        displayed(i, i) = p;
        displayed(i, i + 1) = q;
    }
    displayed(n - 1, 0) = q;
    displayed(n - 1, n - 1) = p;
    if ((power - displayed).cwiseAbs().maxCoeff() > 1e-12)
        fail(Errc::numerical_drift, "operator power strayed from the closed form");
    s.Ppow = displayed;

    s.pi = Eigen::VectorXd::Constant(n, 1.0 / (n - p));
    s.pi(0) = q / (n - p);

    s.K = mult_symmetrization(s.Ppow, s.pi);

    Eigen::MatrixXd lazy = Eigen::MatrixXd::Zero(n, n);
    lazy(0, 0) = 0.5;
    lazy(0, 1) = 0.5;
    for (int i = 1; i < n - 1; ++i) {
        lazy(i, i - 1) = 0.25;
        lazy(i, i) = 0.5;
        lazy(i, i + 1) = 0.25;
    }
    lazy(n - 1, n - 2) = 0.5;
    lazy(n - 1, n - 1) = 0.5;
    Eigen::VectorXd lpi = Eigen::VectorXd::Constant(n, 1.0 / (n - 1));
    lpi(0) = 0.5 / (n - 1);
    lpi(n - 1) = 0.5 / (n - 1);
    s.lazy_path = make_reversible(std::move(lazy), std::move(lpi));

    return s;
}

} // namespace necklace
