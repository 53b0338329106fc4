#include "necklace/hot.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace necklace {

double LatticePmf::total() const {
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
}

double LatticePmf::mean() const {
    double s = 0.0;
    for (size_t i = 0; i < mass.size(); ++i)
        s += (static_cast<double>(origin) + static_cast<double>(i)) * mass[i];
    return s;
}

LatticePmf convolve(const LatticePmf& a, const LatticePmf& b, double tail_trim) {
    LatticePmf out;
    out.origin = a.origin + b.origin;
    if (a.mass.empty() || b.mass.empty()) return out;
    out.mass.assign(a.mass.size() + b.mass.size() - 1, 0.0);
    for (size_t i = 0; i < a.mass.size(); ++i) {
        const double av = a.mass[i];
        if (av == 0.0) continue;
        for (size_t j = 0; j < b.mass.size(); ++j) out.mass[i + j] += av * b.mass[j];
    }
    size_t lo = 0;
    double acc = 0.0;
    while (lo < out.mass.size() && acc + out.mass[lo] < tail_trim) acc += out.mass[lo++];
    size_t hi = out.mass.size();
    acc = 0.0;
    while (hi > lo && acc + out.mass[hi - 1] < tail_trim) acc += out.mass[--hi];
    out.mass.erase(out.mass.begin() + static_cast<std::ptrdiff_t>(hi), out.mass.end());
    out.mass.erase(out.mass.begin(), out.mass.begin() + static_cast<std::ptrdiff_t>(lo));
    out.origin += static_cast<long long>(lo);
    return out;
}

LatticePmf sum_pmf(const FirstPassagePmf& fpt, long long count) {
    if (count < 0) fail(Errc::out_of_range, "summand count must be nonnegative");
    LatticePmf acc{0, {1.0}};
    if (count == 0) return acc;
    LatticePmf sq{1, fpt.mass};
    for (;;) {
        if (count & 1) acc = convolve(acc, sq);
        count >>= 1;
        if (count == 0) break;
        sq = convolve(sq, sq);
    }
    return acc;
}

HotEvaluator::HotEvaluator(const NecklaceSpec& spec) : spec_(&spec) {
    base_.origin = 1;
    base_.mass = spec.bead().fpt.mass;
    sums_.push_back(LatticePmf{0, {1.0}});

    const Eigen::MatrixXd& B = spec.bead().spec.rows();
    const int b = spec.bead_exit();
    const Eigen::MatrixXd Q = B.leftCols(b);
    const Eigen::VectorXd exit = B.col(b);
    // alive . v bounds the total weight of all dropped later iterates exactly.
    const Eigen::VectorXd v =
        (Eigen::MatrixXd::Identity(b, b) - Q)
            .colPivHouseholderQr()
            .solve(Q * Eigen::VectorXd::Ones(b));

    const auto trajectories = [&](int from) {
        std::vector<Eigen::RowVectorXd> rows;
        Eigen::RowVectorXd alive = Eigen::RowVectorXd::Zero(b);
        alive(from) = 1.0;
        rows.push_back(alive);
        while (alive.dot(v) >= kTailTol) {
            alive = alive * Q;
            rows.push_back(alive);
        }
        return rows;
    };

    inside_ = trajectories(0);
    first_hit_.resize(static_cast<size_t>(b));
    inside_from_.resize(static_cast<size_t>(b));
    for (int l = 1; l < b; ++l) {
        inside_from_[static_cast<size_t>(l)] = trajectories(l);
        auto& w = first_hit_[static_cast<size_t>(l)];
        w.assign(1, 0.0);
        Eigen::RowVectorXd alive = Eigen::RowVectorXd::Zero(b);
        alive(l) = 1.0;
        for (;;) {
            w.push_back(alive.dot(exit));
            alive = alive * Q;
            if (alive.sum() < kTailTol) break;
        }
    }
}

void HotEvaluator::ensure_sums(long long count) {
    while (static_cast<long long>(sums_.size()) <= count)
        sums_.push_back(convolve(sums_.back(), base_));
}

const LatticePmf& HotEvaluator::sums(long long count) {
    if (count < 0) fail(Errc::out_of_range, "summand count must be nonnegative");
    ensure_sums(count);
    return sums_[static_cast<size_t>(count)];
}

double HotEvaluator::arrival_raw(long long tau, int position, bool wrap_only) const {
    const int n = spec_->link_count();
    const int m = spec_->bead_count();
    const int Ri = spec_->beads_before(position);
    const long long bare = position - Ri;
    double acc = 0.0;
    for (long long j = wrap_only ? 1 : 0; j <= tau / n; ++j) {
        const long long count = static_cast<long long>(m) * j + Ri;
        const long long value = tau - bare - static_cast<long long>(n - m) * j;
        if (count == 0)
            acc += (value == 0) ? 1.0 : 0.0;
        else
            acc += sums_[static_cast<size_t>(count)].at(value);
    }
    return acc;
}

// Memoises one variant per position: wrap-only loops for position 0 (whose
// j=0 term is just the point mass at tau=0, reattached on demand), the full
// sum elsewhere.
double HotEvaluator::arrival(long long tau, int position, bool wrap_only) {
    if (tau < 0) return 0.0;
    const int n = spec_->link_count();
    if (tau >= memo_rows_) {
        const long long rows = std::max<long long>(memo_rows_ * 2, tau + 1);
        arrival_memo_.resize(static_cast<size_t>(rows * n), 0.0);
        arrival_known_.resize(static_cast<size_t>(rows * n), 0);
        memo_rows_ = rows;
    }
    const size_t key = static_cast<size_t>(tau) * static_cast<size_t>(n) +
                       static_cast<size_t>(position);
    if (!arrival_known_[key]) {
        ensure_sums(static_cast<long long>(spec_->bead_count()) * (tau / n) +
                    spec_->beads_before(position));
        arrival_memo_[key] = arrival_raw(tau, position, position == 0);
        arrival_known_[key] = 1;
    }
    double v = arrival_memo_[key];
    if (position == 0 && !wrap_only && tau == 0) v += 1.0;
    return v;
}

double HotEvaluator::link_arrival(long long t, int position) {
    if (t < 0) fail(Errc::out_of_range, "t must be nonnegative");
    if (position < 0 || position >= spec_->link_count())
        fail(Errc::out_of_range, "position out of range");
    return arrival(t, position, false);
}

double HotEvaluator::from_start(long long t, const StateId& target) {
    const int i = target.position;
    if (!spec_->bead_at(i)) return arrival(t, i, false);
    const int k = (target.kind == StateId::Kind::link) ? 0 : target.slot;
    const bool wrap = (i == 0);
    const long long horizon = static_cast<long long>(inside_.size()) - 1;
    double acc = 0.0;
    for (long long a = std::min(t, horizon); a >= 0; --a) {
        const double w = inside_[static_cast<size_t>(a)](k);
        if (w != 0.0) acc += w * arrival(t - a, i, wrap);
    }
    if (wrap && t <= horizon) acc += inside_[static_cast<size_t>(t)](k);
    return acc;
}

double HotEvaluator::bead_state(long long t, int position, int slot) {
    if (t < 0) fail(Errc::out_of_range, "t must be nonnegative");
    if (position < 0 || position >= spec_->link_count() || !spec_->bead_at(position))
        fail(Errc::out_of_range, "no bead at that position");
    if (slot < 0 || slot > spec_->bead_exit() - 1)
        fail(Errc::out_of_range, "bead slot out of range");
    return from_start(t, slot == 0 ? StateId::link(position)
                                   : StateId::interior(position, slot));
}

void HotEvaluator::ensure_start_rows(long long t) {
    const int size = spec_->size();
    while (static_cast<long long>(start_rows_.size()) <= t) {
        const long long tau = static_cast<long long>(start_rows_.size());
        std::vector<double> row(static_cast<size_t>(size));
        for (int idx = 0; idx < size; ++idx)
            row[static_cast<size_t>(idx)] = from_start(tau, spec_->state_of(idx));
        start_rows_.push_back(std::move(row));
    }
}

double HotEvaluator::from_interior(long long t, int entry, const StateId& target) {
    if (t < 0) fail(Errc::out_of_range, "t must be nonnegative");
    const int last = spec_->link_count() - 1;
    if (!spec_->bead_at(last) || entry < 1 || entry > spec_->bead_exit() - 1)
        fail(Errc::invalid_start, "no interior state " + std::to_string(entry) +
                                      " in a bead at the last position");
    const int tidx = spec_->index_of(target);
    const auto& w = first_hit_[static_cast<size_t>(entry)];
    const long long amax = std::min(t, static_cast<long long>(w.size()) - 1);
    if (amax >= 1) ensure_start_rows(t - 1);
    double acc = 0.0;
    // First exit from the bead at the last position lands exactly on the
    // start link, so the tail of the trajectory restarts from there.
    for (long long a = 1; a <= amax; ++a)
        if (w[static_cast<size_t>(a)] != 0.0)
            acc += w[static_cast<size_t>(a)] *
                   start_rows_[static_cast<size_t>(t - a)][static_cast<size_t>(tidx)];
    if (target.position == last) {
        const int k = (target.kind == StateId::Kind::link) ? 0 : target.slot;
        const auto& rows = inside_from_[static_cast<size_t>(entry)];
        if (t < static_cast<long long>(rows.size()))
            acc += rows[static_cast<size_t>(t)](k);
    }
    return acc;
}

double HotEvaluator::probability(long long t, const StateId& start,
                                 const StateId& target) {
    if (t < 0) fail(Errc::out_of_range, "t must be nonnegative");
    spec_->index_of(target);
    if (start == StateId::link(0)) return from_start(t, target);
    if (start.kind == StateId::Kind::interior &&
        start.position == spec_->link_count() - 1)
        return from_interior(t, start.slot, target);
    fail(Errc::invalid_start, "start must be the link at position 0 or an interior "
                              "state of a bead at the last position");
}

double hot_link(const NecklaceSpec& spec, long long t, int position) {
    HotEvaluator h(spec);
    return h.link_arrival(t, position);
}

double hot_bead_state(const NecklaceSpec& spec, long long t, int position, int slot) {
    HotEvaluator h(spec);
    return h.bead_state(t, position, slot);
}

double hot_from_bead_state(const NecklaceSpec& spec, long long t, int entry,
                           const StateId& target) {
    HotEvaluator h(spec);
    return h.from_interior(t, entry, target);
}

} // namespace necklace
