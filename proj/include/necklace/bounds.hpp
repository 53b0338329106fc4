#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "necklace/errors.hpp"

namespace necklace {

/// A stochastic matrix together with a distribution it is reversible for.
struct ReversibleOperator {
    Eigen::MatrixXd op;
    Eigen::VectorXd pi;
};

/// Time reversal P~(x,y) = pi(y) P(y,x) / pi(x).  pi must be stationary for P
/// (residual below 1e-10) with every state carrying positive mass.
Eigen::MatrixXd reverse_operator(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi);

/// Multiplicative symmetrization P * P~, reversible with respect to pi.
ReversibleOperator mult_symmetrization(const Eigen::MatrixXd& P,
                                       const Eigen::VectorXd& pi);

struct SpectralResult {
    double beta1 = 1.0;
    bool connected = true;
};

/// Second-largest eigenvalue via the symmetric conjugate D^{1/2} K D^{-1/2}.
/// A disconnected support graph short-circuits to beta1 = 1.
SpectralResult second_eigenvalue(const ReversibleOperator& K);

/// Spectral convergence bound (1 / (2 sqrt(pi(start)))) beta1^{t/2}, clamped
/// to [0,1] on output.
double fill_bound(const Eigen::VectorXd& pi, int start, double beta1, long long t);

/// Upper bound on beta1(K) obtained by comparison with a reference chain on
/// the same state space whose off-diagonal support covers K's.
double comparison_bound(const ReversibleOperator& K, const ReversibleOperator& ref);

struct GrowthReport {
    bool passed = false;
    double worst_ratio = 0.0; // min over (x,r) of V(x,r) / required volume
    int witness_state = 0;
    int witness_radius = 0;
    int diameter = 0;
    double amplitude = 0.0; // A
    double dimension = 0.0; // d
    Eigen::MatrixXi dist;   // pairwise graph distances
    Eigen::MatrixXd volume; // volume(x, r) for r = 0..diameter
};

/// Exhaustive (A, d) moderate-growth check of the support graph of K under
/// pi: V(x,r) >= (1/A) ((r+1)/diameter)^d for every state and 0 <= r <= diameter.
GrowthReport moderate_growth(const Eigen::MatrixXd& K, const Eigen::VectorXd& pi,
                             double amplitude, double dimension);

/// One path per ordered pair (from, to), stored as vertex sequences at
/// index from * size + to; diagonal entries stay empty.
using PathFamily = std::vector<std::vector<int>>;

/// Shortest paths with lexicographically smallest vertex sequence.
PathFamily geodesic_paths(const Eigen::MatrixXd& K);

struct NashConstants {
    double a = 0.0;
    double a1 = 0.0;
    int witness_x = 0;
    int witness_y = 0;
    int witness_radius = 0;
};

/// Congestion constant of the Nash-inequality argument, by exhaustive
/// evaluation over directed support edges of M and radii 1..diameter, and the
/// companion constant a1 from the growth certificate.
NashConstants nash_constants(const ReversibleOperator& M, const PathFamily& paths,
                             const GrowthReport& growth);

struct NashBound {
    long long t = 0;
    double raw = 0.0;
    double bound = 0.0; // raw clamped to [0,1]
};

/// TV bound (a1/2) exp(-extra / (a diameter^2)) at t = ceil(a diameter^2) + extra + 1.
NashBound nash_bound(const NashConstants& consts, int diameter, long long extra_steps);

enum class StepsMethod { llt, nash };

/// Steps guaranteeing TV below eps for the n-state one-deterministic-edge
/// hold chain (hold p on n-1 positions): from the limiting profile, or from
/// the closed-form Nash budget.
long long steps_needed(StepsMethod method, double eps, int n, double p);

struct Section4 {
    Eigen::MatrixXd P;           // cycle chain with one two-step bead
    Eigen::MatrixXd Ppow;        // its (n-1)-st power: hold p on n-1 positions
    Eigen::VectorXd pi;          // stationary for both
    ReversibleOperator K;        // mult. symmetrization of Ppow
    ReversibleOperator lazy_path; // reference: lazy walk on the n-path
};

/// The worked quartet of n-state chains used by the bound experiments.
Section4 build_section4(int n, double p);

} // namespace necklace
