#include "necklace/bead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace necklace {

namespace {

constexpr double kEntryTol = 1e-12;

} // namespace

BeadSpec BeadSpec::validate(const std::vector<std::vector<double>>& rows) {
    const int b = static_cast<int>(rows.size());
    if (b < 1)
        throw std::invalid_argument("bead needs at least one transient state");
    for (const auto& row : rows)
        if (static_cast<int>(row.size()) != b + 1)
            throw std::invalid_argument("bead rows must have b+1 entries");

    Eigen::MatrixXd M(b, b + 1);
    for (int i = 0; i < b; ++i) {
        double sum = 0.0;
        for (int j = 0; j <= b; ++j) {
            const double v = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (v < 0.0)
                fail(Errc::not_stochastic, "negative entry in row " + std::to_string(i));
            M(i, j) = v;
            sum += v;
        }
        if (std::abs(sum - 1.0) > kEntryTol)
            fail(Errc::not_stochastic, "row " + std::to_string(i) + " does not sum to 1");
    }
    for (int i = 0; i < b; ++i)
        if (M(i, i) >= 1.0 - kEntryTol)
            fail(Errc::extra_absorbing, "state " + std::to_string(i) + " is absorbing");

    std::vector<char> fwd(static_cast<size_t>(b) + 1, 0);
    std::vector<int> stack{0};
    fwd[0] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (u == b) continue;
        for (int v = 0; v <= b; ++v)
            if (M(u, v) > 0.0 && !fwd[static_cast<size_t>(v)]) {
                fwd[static_cast<size_t>(v)] = 1;
                stack.push_back(v);
            }
    }
    for (int s = 0; s <= b; ++s)
        if (!fwd[static_cast<size_t>(s)])
            fail(Errc::unreachable,
                 "state " + std::to_string(s) + " is unreachable from the entrance");

    std::vector<char> bwd(static_cast<size_t>(b) + 1, 0);
    bwd[static_cast<size_t>(b)] = 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (int u = 0; u < b; ++u) {
            if (bwd[static_cast<size_t>(u)]) continue;
            for (int v = 0; v <= b; ++v)
                if (M(u, v) > 0.0 && bwd[static_cast<size_t>(v)]) {
                    bwd[static_cast<size_t>(u)] = 1;
                    changed = true;
                    break;
                }
        }
    }
    for (int s = 0; s < b; ++s)
        if (!bwd[static_cast<size_t>(s)])
            fail(Errc::unreachable, "state " + std::to_string(s) + " cannot reach the exit");

    // Lattice span: gcd of differences of the first 64 support points of the
    // first-passage time, found by a boolean walk that avoids the exit.  A
    // new support point appears within b steps while any state stays alive,
    // so the time cap below cannot cut the search short.
    std::vector<char> alive(static_cast<size_t>(b), 0);
    alive[0] = 1;
    std::vector<long long> support;
    const long long cap = 64LL * (b + 1) + b + 2;
    for (long long t = 1; t <= cap && support.size() < 64; ++t) {
        std::vector<char> next(static_cast<size_t>(b), 0);
        bool hit = false;
        bool any = false;
        for (int u = 0; u < b; ++u) {
            if (!alive[static_cast<size_t>(u)]) continue;
            if (M(u, b) > 0.0) hit = true;
            for (int v = 0; v < b; ++v)
                if (M(u, v) > 0.0) {
                    next[static_cast<size_t>(v)] = 1;
                    any = true;
                }
        }
        if (hit) support.push_back(t);
        alive = std::move(next);
        if (!any) break;
    }
    if (support.size() < 2)
        fail(Errc::span_violation, "first-passage support has fewer than two points");
    long long g = 0;
    for (size_t i = 1; i < support.size(); ++i)
        g = std::gcd(g, support[i] - support.front());
    if (g != 1)
        fail(Errc::span_violation, "first-passage support has span " + std::to_string(g));

    return BeadSpec(std::move(M), 1);
}

BeadSpec BeadSpec::simple(double hold) {
    if (!(hold > 0.0 && hold < 1.0))
        fail(Errc::out_of_range, "hold probability must lie strictly inside (0,1)");
    return validate({{hold, 1.0 - hold}});
}

Eigen::MatrixXd BeadSpec::absorbing_matrix() const {
    const int b = exit_;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(b + 1, b + 1);
    M.topRows(b) = rows_;
    M(b, b) = 1.0;
    return M;
}

Eigen::MatrixXd BeadSpec::closure_matrix() const {
    Eigen::MatrixXd M = absorbing_matrix();
    M(exit_, exit_) = 0.0;
    M(exit_, 0) = 1.0;
    return M;
}

double FirstPassagePmf::total() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

int FirstPassagePmf::min_support() const {
    for (size_t i = 0; i < mass.size(); ++i)
        if (mass[i] > 0.0) return static_cast<int>(i) + 1;
    return 0;
}

FirstPassagePmf first_passage_pmf(const BeadSpec& bead, double eps_tail,
                                  long long horizon_cap) {
    if (!(eps_tail > 0.0 && eps_tail <= 1e-10))
        fail(Errc::out_of_range, "eps_tail must lie in (0, 1e-10]");
    const int b = bead.exit_state();
    const Eigen::MatrixXd Q = bead.rows().leftCols(b);
    const Eigen::VectorXd exit = bead.rows().col(b);

    FirstPassagePmf out;
    out.eps_tail = eps_tail;
    Eigen::RowVectorXd aliveRow = Eigen::RowVectorXd::Zero(b);
    aliveRow(0) = 1.0;
    std::vector<double> survival; // survival[t-1] = Pr[passage takes more than t steps]
    for (long long t = 1;; ++t) {
        if (t > horizon_cap)
            fail(Errc::horizon_exceeded, "first-passage mass does not reach 1 - eps_tail "
                                         "within the step cap");
        out.mass.push_back(aliveRow.dot(exit));
        aliveRow = aliveRow * Q;
        const double s = aliveRow.sum();
        survival.push_back(s);
        if (s < eps_tail) break;
    }

    const Moments mo = pmf_moments(out.mass);
    out.mean = mo.mean;
    out.variance = mo.variance;

    out.tail_start = out.min_support();
    double req = 0.0;
    for (long long t = out.tail_start + 1; t <= out.horizon(); ++t) {
        const double w = std::max(out.at(t), survival[static_cast<size_t>(t - 1)]);
        if (w > 0.0)
            req = std::max(req, std::pow(w, 1.0 / static_cast<double>(t)));
    }
    // Strictly above every observed constraint; harmless default when the
    // support ends right at its first point's successor.
    out.tail_rate = (req > 0.0) ? req + 0.01 * (1.0 - req) : 0.5;
    return out;
}

Moments pmf_moments(const std::vector<double>& mass) {
    double mean = 0.0;
    double second = 0.0;
    for (size_t i = 0; i < mass.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        mean += t * mass[i];
        second += t * t * mass[i];
    }
    const double variance = second - mean * mean;
    if (variance <= 1e-12)
        fail(Errc::degenerate_variance, "first-passage variance is numerically zero");
    return {mean, variance};
}

Eigen::VectorXd closure_stationary(const BeadSpec& bead) {
    const Eigen::MatrixXd P = bead.closure_matrix();
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd pi = A.colPivHouseholderQr().solve(rhs);
    const double resid = (P.transpose() * pi - pi).cwiseAbs().maxCoeff();
    if (resid > 1e-12 || pi.minCoeff() <= 0.0)
        fail(Errc::numerical_drift, "closure stationary solve failed its residual check");
    return pi;
}

std::vector<double> taboo_sums(const BeadSpec& bead, double eps, long long horizon_cap) {
    const int b = bead.exit_state();
    const Eigen::MatrixXd Q = bead.rows().leftCols(b);
    // v(x) = expected unabsorbed steps after leaving x; alive . v is then the
    // exact total weight the truncation drops.
    const Eigen::VectorXd v =
        (Eigen::MatrixXd::Identity(b, b) - Q)
            .colPivHouseholderQr()
            .solve(Q * Eigen::VectorXd::Ones(b));
    Eigen::RowVectorXd alive = Eigen::RowVectorXd::Zero(b);
    alive(0) = 1.0;
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(b);
    for (long long a = 0;; ++a) {
        if (a > horizon_cap)
            fail(Errc::horizon_exceeded, "taboo sums do not converge within the step cap");
        g += alive;
        if (alive.dot(v) < eps) break;
        alive = alive * Q;
    }
    return std::vector<double>(g.data(), g.data() + b);
}

BeadAnalysis analyze_bead(const BeadSpec& bead, double eps_tail) {
    return BeadAnalysis{bead, first_passage_pmf(bead, eps_tail), closure_stationary(bead),
                        taboo_sums(bead, eps_tail)};
}

} // namespace necklace
