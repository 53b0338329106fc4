#pragma once

#include <vector>

#include "necklace/chain.hpp"

namespace necklace {

/// A pmf on the integer lattice, stored as a dense window starting at origin.
struct LatticePmf {
    long long origin = 0;
    std::vector<double> mass;

    double at(long long v) const {
        long long idx = v - origin;
        return (idx >= 0 && idx < static_cast<long long>(mass.size()))
                   ? mass[static_cast<size_t>(idx)]
                   : 0.0;
    }
    double total() const;
    double mean() const;
};

/// Direct convolution; window tails with cumulative mass below tail_trim are
/// dropped on each side.
LatticePmf convolve(const LatticePmf& a, const LatticePmf& b, double tail_trim = 1e-20);

/// Distribution of the sum of `count` independent first-passage times.
LatticePmf sum_pmf(const FirstPassagePmf& fpt, long long count);

/// Evaluates t-step transition probabilities of a necklace by counting full
/// loops around the cycle and convolving first-passage times, without ever
/// applying the operator.  Caches convolution powers, in-bead trajectories
/// and arrival sums for reuse across queries on one chain.
class HotEvaluator {
public:
    explicit HotEvaluator(const NecklaceSpec& spec);

    /// Probability of arriving at the link at `position` (from outside it)
    /// at time t, started at the link at position 0.  Equals the transition
    /// probability only when the position carries no bead.
    double link_arrival(long long t, int position);

    /// P^t(s_0, state at `position` with bead slot k), k = 0..b-1, where
    /// slot 0 addresses the entrance link of the bead at that position.
    double bead_state(long long t, int position, int slot);

    /// P^t from the interior state `entry` (1..b-1) of the bead at the last
    /// position to an arbitrary target, by first-exit decomposition.
    double from_interior(long long t, int entry, const StateId& target);

    /// Dispatch on any allowed start: the link at position 0, or an interior
    /// state of a bead at the last position.
    double probability(long long t, const StateId& start, const StateId& target);

    const LatticePmf& sums(long long count);
    const NecklaceSpec& spec() const { return *spec_; }

private:
    double from_start(long long t, const StateId& target);
    double arrival(long long tau, int position, bool wrap_only);
    double arrival_raw(long long tau, int position, bool wrap_only) const;
    void ensure_sums(long long count);
    void ensure_start_rows(long long t);

    const NecklaceSpec* spec_;
    LatticePmf base_;              // first-passage pmf as a lattice window
    std::vector<LatticePmf> sums_; // sums_[j] = law of S_j

    // inside_[a][k] = Pr[in-bead walk from the entrance sits at k after a
    // steps without exiting]; horizon chosen so the neglected weight of any
    // sum against these rows is below 5e-15.
    std::vector<Eigen::RowVectorXd> inside_;
    // Per interior entry l: first-exit pmf w_l and the matching trajectories.
    std::vector<std::vector<double>> first_hit_;
    std::vector<std::vector<Eigen::RowVectorXd>> inside_from_;

    std::vector<std::vector<double>> start_rows_; // start_rows_[t][index]
    std::vector<double> arrival_memo_;
    std::vector<char> arrival_known_;
    long long memo_rows_ = 0;

    static constexpr double kTailTol = 5e-15;
};

double hot_link(const NecklaceSpec& spec, long long t, int position);
double hot_bead_state(const NecklaceSpec& spec, long long t, int position, int slot);
double hot_from_bead_state(const NecklaceSpec& spec, long long t, int entry,
                           const StateId& target);

} // namespace necklace
