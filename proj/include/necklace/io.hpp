#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "necklace/bead.hpp"
#include "necklace/bounds.hpp"
#include "necklace/chain.hpp"
#include "necklace/limit.hpp"

namespace necklace {

/// Shortest round-trippable decimal form (17 significant digits).
std::string format17(double v);

/// Bead from {"rows": [[...], ...]} (b rows of b+1 transition entries).
BeadSpec bead_from_json(const nlohmann::json& j);
nlohmann::json bead_to_json(const BeadSpec& bead);

/// Chain from {"bead": ..., "r": [0,1,...]} or
/// {"bead": ..., "pattern": "alternating"|"block"|"all"|"fixed-count:m", "n": n}.
Necklace necklace_from_json(const nlohmann::json& j);

/// Distribution rows: state_id,position,kind,k,probability and, when a
/// reference distribution is supplied, stationary and tv_contribution
/// (half the absolute difference) columns.
void write_distribution_csv(std::ostream& os, const NecklaceSpec& spec,
                            const Eigen::VectorXd& p,
                            const Eigen::VectorXd* reference = nullptr);

/// Profile rows x,y,position,kind,k preceded by '#' metadata lines (mode, n,
/// m, bead, t, c); normalized mode appends a '#' footer with the maximum
/// absolute deviation from the limiting profile at the same c.
void write_profile_csv(std::ostream& os, const Necklace& chain,
                       const std::vector<ProfilePoint>& points, ProfileMode mode,
                       long long t, double c);

/// Rows c,t,tv_exact,tv_limit,abs_diff.
void write_tv_csv(std::ostream& os, const std::vector<TvPoint>& points);

/// Full bound report for the n-state hold chain: spectral gap data, the
/// comparison and growth certificates, Nash constants, and step budgets.
nlohmann::json bound_report(int n, double p, double eps, int start,
                            const std::vector<long long>& fill_times);

} // namespace necklace
