#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "necklace/bead.hpp"

namespace necklace {

/// Address of a state: the link at a position, or an interior bead state
/// (slot 1..b-1) at a position carrying a bead.  The link at a bead position
/// doubles as that bead's entrance (slot 0).
struct StateId {
    enum class Kind : std::uint8_t { link, interior };

    Kind kind = Kind::link;
    int position = 0;
    int slot = 0;

    static StateId link(int position) { return {Kind::link, position, 0}; }
    static StateId interior(int position, int slot) {
        return {Kind::interior, position, slot};
    }
    friend bool operator==(const StateId&, const StateId&) = default;
};

std::string to_string(const StateId& id);

/// Row-stochastic sparse operator; rows are renormalised by their exact sums
/// at construction so repeated application keeps mass drift at rounding level.
class TransitionOperator {
public:
    explicit TransitionOperator(Eigen::SparseMatrix<double, Eigen::RowMajor> mat);
    static TransitionOperator from_dense(const Eigen::MatrixXd& mat);

    int size() const { return static_cast<int>(mat_.rows()); }
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return mat_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat_); }

private:
    Eigen::SparseMatrix<double, Eigen::RowMajor> mat_;
};

/// A necklace: n links on a directed cycle, with a copy of the bead replacing
/// the edge out of every position whose indicator bit is 1.  States are
/// indexed by position, link first, then interior slots in order.
class NecklaceSpec {
public:
    NecklaceSpec(BeadAnalysis bead, std::vector<int> indicator);

    int link_count() const { return n_; }
    int bead_count() const { return m_; }
    int bead_exit() const { return bead_.spec.exit_state(); }
    int size() const { return total_; }

    bool bead_at(int position) const { return indicator_[static_cast<size_t>(position)] != 0; }
    const std::vector<int>& indicator() const { return indicator_; }

    /// Number of beads strictly before the position; defined for 0..n.
    int beads_before(int position) const { return prefix_[static_cast<size_t>(position)]; }

    const BeadAnalysis& bead() const { return bead_; }
    double mean_fpt() const { return bead_.mean(); }
    double var_fpt() const { return bead_.variance(); }

    /// n + (mean-1) m, the stationary normaliser and time-scale base length.
    double weight() const { return n_ + (mean_fpt() - 1.0) * m_; }

    int index_of(const StateId& id) const;
    StateId state_of(int index) const;

private:
    BeadAnalysis bead_;
    std::vector<int> indicator_;
    std::vector<int> prefix_;  // size n+1
    std::vector<int> offsets_; // linear index of each link, size n+1 (sentinel)
    int n_;
    int m_;
    int total_;
};

struct Necklace {
    NecklaceSpec spec;
    TransitionOperator op;
};

Necklace build_necklace(BeadAnalysis bead, std::vector<int> indicator);

/// Named indicator families: "alternating", "block", "all", "fixed-count:m".
std::vector<int> indicator_gallery(const std::string& name, int n);

/// Closed-form stationary distribution; checked against the operator to 1e-10.
Eigen::VectorXd stationary(const Necklace& chain);

Eigen::VectorXd point_mass(const NecklaceSpec& spec, const StateId& start);

/// start * P^steps by repeated sparse application.  Mass drift is watched each
/// step; negatives are clamped and the result renormalised only on output.
Eigen::VectorXd evolve(const TransitionOperator& op, const Eigen::VectorXd& start,
                       long long steps);

double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace necklace
