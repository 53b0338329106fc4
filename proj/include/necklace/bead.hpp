#pragma once

#include <vector>

#include <Eigen/Dense>

#include "necklace/errors.hpp"

namespace necklace {

/// A bead: an absorbing Markov chain on states 0..b where 0 is the entrance,
/// b is the only absorbing state, every state lies on a path from 0 to b, and
/// the first-passage time from 0 to b has lattice span 1.  Transition rows are
/// supplied for states 0..b-1 only; the absorbing row is implied.
class BeadSpec {
public:
    /// Checks stochasticity, absence of extra absorbing states, reachability
    /// and the span condition, in that order.
    static BeadSpec validate(const std::vector<std::vector<double>>& rows);

    /// One hold state: rows [[hold, 1-hold]].
    static BeadSpec simple(double hold);

    int exit_state() const { return exit_; }
    int state_count() const { return exit_ + 1; }

    /// Transition rows for states 0..b-1, shape b x (b+1).
    const Eigen::MatrixXd& rows() const { return rows_; }

    /// Full (b+1)x(b+1) matrix with the exit held absorbing.
    Eigen::MatrixXd absorbing_matrix() const;

    /// Closure: the exit is rewired back to the entrance with probability 1.
    Eigen::MatrixXd closure_matrix() const;

    /// Lattice span of the first-passage support; 1 after validation.
    int span() const { return span_; }

private:
    BeadSpec(Eigen::MatrixXd rows, int span)
        : rows_(std::move(rows)), exit_(static_cast<int>(rows_.rows())), span_(span) {}

    Eigen::MatrixXd rows_; // b x (b+1)
    int exit_;
    int span_;
};

/// First-passage distribution from the entrance to the exit, truncated where
/// the accumulated mass reaches 1 - eps_tail.  mass[i] = Pr[X = i+1].
struct FirstPassagePmf {
    std::vector<double> mass;
    double eps_tail = 1e-14;
    double mean = 0.0;
    double variance = 0.0;
    int tail_start = 1;      // survival is certified geometric beyond this time
    double tail_rate = 0.5;  // Pr[X > t] < tail_rate^t for horizon >= t > tail_start

    int horizon() const { return static_cast<int>(mass.size()); }
    double at(long long t) const {
        return (t >= 1 && t <= horizon()) ? mass[static_cast<size_t>(t - 1)] : 0.0;
    }
    double total() const;
    int min_support() const;
};

struct Moments {
    double mean;
    double variance;
};

FirstPassagePmf first_passage_pmf(const BeadSpec& bead, double eps_tail = 1e-14,
                                  long long horizon_cap = 1'000'000);

/// Mean and variance of a pmf supported on 1..mass.size(), taken as stored
/// (no correction for truncated tail mass).
Moments pmf_moments(const std::vector<double>& mass);

/// Stationary distribution of the closure, solved directly; entries positive,
/// exit mass equals 1/(mean+1).
Eigen::VectorXd closure_stationary(const BeadSpec& bead);

/// Expected visits to each state 0..b-1 before absorption, started at the
/// entrance.  Truncated once the exactly-bounded neglected tail drops below eps.
std::vector<double> taboo_sums(const BeadSpec& bead, double eps = 1e-14,
                               long long horizon_cap = 1'000'000);

struct BeadAnalysis {
    BeadSpec spec;
    FirstPassagePmf fpt;
    Eigen::VectorXd closure_pi; // size b+1
    std::vector<double> taboo;  // size b

    double mean() const { return fpt.mean; }
    double variance() const { return fpt.variance; }
};

BeadAnalysis analyze_bead(const BeadSpec& bead, double eps_tail = 1e-14);

} // namespace necklace
