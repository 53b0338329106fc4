#pragma once

#include <vector>

#include "necklace/chain.hpp"

namespace necklace {

/// Heat kernel at time c on the unit circle: the standard Gaussian of
/// variance c wrapped around R/Z.  Periodic and symmetric in x; integrates
/// to 1 over one period.
double wrapped_gaussian(double c, double x);

/// Same lattice sum truncated at a fixed number of terms per side.
double wrapped_gaussian_fixed(double c, double x, int terms);

/// (n + (mean-1) m)^3 / (variance m): steps per unit of limiting time.
double time_scale_real(int links, int beads, double mean_fpt, double var_fpt);

/// Nearest integer step count for limiting time c.
long long time_scale(int links, int beads, double mean_fpt, double var_fpt, double c);

/// Limiting time recovered from an integer step count.
double back_solve_c(const NecklaceSpec& spec, long long t);

/// Limiting total-variation distance: half the L1 distance of the wrapped
/// Gaussian from flat, by midpoint quadrature refined until two successive
/// grid resolutions agree to 1e-8.
double tv_limit(double c);

struct LltReport {
    double c = 0.0;
    long long t = 0;
    std::vector<double> abscissa;  // per state, before reduction mod 1
    std::vector<double> predicted; // per state
    std::vector<double> exact;     // per state, from the operator
    double max_abs_error = 0.0;
    double scaled_error = 0.0; // link_count * max_abs_error
};

/// Wrapped-Gaussian prediction of the whole t-step distribution against the
/// exact one.  The start must be the link at position 0 or an interior state
/// of a bead at the last position.
LltReport llt_predict(const Necklace& chain, long long t, const StateId& start);

enum class ProfileMode { raw, rearranged, normalized };

struct ProfilePoint {
    double x = 0.0;
    double y = 0.0;
    StateId state;
};

/// Distribution snapshot for plotting: by state index (raw), re-parametrised
/// by position on the limiting circle (rearranged), or additionally divided
/// by the stationary mass (normalized).
std::vector<ProfilePoint> figure_profile(const Necklace& chain, long long t,
                                         const StateId& start, ProfileMode mode);

struct TvPoint {
    double c = 0.0;
    long long t = 0;
    double exact = 0.0;
    double limit = 0.0;
};

std::vector<TvPoint> tv_curve(const Necklace& chain, const StateId& start,
                              const std::vector<double>& cs);

/// Hold probability minimising the time-scale constant (q+pk)^3/(pqk) of a
/// one-hold-state necklace whose bead fraction m/n tends to k in (0,1].
double optimal_hold(double bead_fraction);

} // namespace necklace
