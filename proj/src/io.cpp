#include "necklace/io.hpp"

#include <cmath>
#include <cstdio>

namespace necklace {

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

BeadSpec bead_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
    return BeadSpec::validate(rows);
}

nlohmann::json bead_to_json(const BeadSpec& bead) {
    std::vector<std::vector<double>> rows;
    const auto& M = bead.rows();
    for (int i = 0; i < M.rows(); ++i)
        rows.emplace_back(M.row(i).begin(), M.row(i).end());
    return nlohmann::json{{"rows", rows}};
}

Necklace necklace_from_json(const nlohmann::json& j) {
    const BeadSpec bead = bead_from_json(j.at("bead"));
    std::vector<int> r;
    if (j.contains("r"))
        r = j.at("r").get<std::vector<int>>();
    else
        r = indicator_gallery(j.at("pattern").get<std::string>(), j.at("n").get<int>());
    return build_necklace(analyze_bead(bead), std::move(r));
}

void write_distribution_csv(std::ostream& os, const NecklaceSpec& spec,
                            const Eigen::VectorXd& p,
                            const Eigen::VectorXd* reference) {
    os << "state_id,position,kind,k,probability";
    if (reference) os << ",stationary,tv_contribution";
    os << "\n";
    for (int idx = 0; idx < spec.size(); ++idx) {
        const StateId id = spec.state_of(idx);
        os << to_string(id) << ',' << id.position << ','
           << (id.kind == StateId::Kind::link ? "link" : "interior") << ',' << id.slot
           << ',' << format17(p(idx));
        if (reference)
            os << ',' << format17((*reference)(idx)) << ','
               << format17(0.5 * std::abs(p(idx) - (*reference)(idx)));
        os << "\n";
    }
}

namespace {

const char* mode_name(ProfileMode mode) {
    switch (mode) {
    case ProfileMode::raw: return "raw";
    case ProfileMode::rearranged: return "rearranged";
    case ProfileMode::normalized: return "normalized";
    }
    return "raw";
}

} // namespace

void write_profile_csv(std::ostream& os, const Necklace& chain,
                       const std::vector<ProfilePoint>& points, ProfileMode mode,
                       long long t, double c) {
    os << "# mode=" << mode_name(mode) << "\n";
    os << "# n=" << chain.spec.link_count() << "\n";
    os << "# m=" << chain.spec.bead_count() << "\n";
    os << "# bead=" << bead_to_json(chain.spec.bead().spec).dump() << "\n";
    os << "# t=" << t << "\n";
    os << "# c=" << format17(c) << "\n";
    os << "x,y,position,kind,k\n";
    double dev = 0.0;
    for (const ProfilePoint& pt : points) {
        os << format17(pt.x) << ',' << format17(pt.y) << ',' << pt.state.position << ','
           << (pt.state.kind == StateId::Kind::link ? "link" : "interior") << ','
           << pt.state.slot << "\n";
        if (mode == ProfileMode::normalized)
            dev = std::max(dev, std::abs(pt.y - wrapped_gaussian(c, pt.x)));
    }
    if (mode == ProfileMode::normalized)
        os << "# max_abs_dev_from_theta=" << format17(dev) << "\n";
}

void write_tv_csv(std::ostream& os, const std::vector<TvPoint>& points) {
    os << "c,t,tv_exact,tv_limit,abs_diff\n";
    for (const TvPoint& pt : points)
        os << format17(pt.c) << ',' << pt.t << ',' << format17(pt.exact) << ','
           << format17(pt.limit) << ',' << format17(std::abs(pt.exact - pt.limit))
           << "\n";
}

nlohmann::json bound_report(int n, double p, double eps, int start,
                            const std::vector<long long>& fill_times) {
    const Section4 sec = build_section4(n, p);
    const double q = 1.0 - p;
    const SpectralResult spectral = second_eigenvalue(sec.K);
    const SpectralResult cycle = second_eigenvalue(mult_symmetrization(sec.P, sec.pi));
    const double comparison = comparison_bound(sec.K, sec.lazy_path);

    const GrowthReport growth = moderate_growth(
        sec.K.op, sec.K.pi, 1.0 / q + 1.0 / (n - 1), 1.0);
    const PathFamily paths = geodesic_paths(sec.K.op);
    const NashConstants consts = nash_constants(sec.K, paths, growth);
    const NashBound nb = nash_bound(consts, growth.diameter, 0);

    nlohmann::json fill = nlohmann::json::array();
    for (long long t : fill_times)
        fill.push_back({{"t", t},
                        {"bound", fill_bound(sec.pi, start, spectral.beta1, t)}});

    const TransitionOperator op = TransitionOperator::from_dense(sec.Ppow);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
    if (start < 0 || start >= n) fail(Errc::out_of_range, "start index out of range");
    origin(start) = 1.0;
    const auto tv_at = [&](long long t) {
        return tv_distance(evolve(op, origin, t), sec.pi);
    };
    const long long t_llt = steps_needed(StepsMethod::llt, eps, n, p);
    const long long t_nash = steps_needed(StepsMethod::nash, eps, n, p);

    return nlohmann::json{
        {"n", n},
        {"p", p},
        {"start", start},
        {"beta1", spectral.beta1},
        {"connected", spectral.connected},
        {"cycle", {{"beta1", cycle.beta1}, {"connected", cycle.connected}}},
        {"comparison_bound", comparison},
        {"fill_curve", fill},
        {"growth",
         {{"A", growth.amplitude},
          {"d", growth.dimension},
          {"gamma", growth.diameter},
          {"passed", growth.passed},
          {"worst_ratio", growth.worst_ratio},
          {"witness",
           {{"state", growth.witness_state}, {"radius", growth.witness_radius}}}}},
        {"nash",
         {{"a", consts.a},
          {"a1", consts.a1},
          {"t", nb.t},
          {"raw", nb.raw},
          {"bound", nb.bound}}},
        {"steps",
         {{"eps", eps},
          {"llt", {{"t", t_llt}, {"tv", tv_at(t_llt)}}},
          {"nash", {{"t", t_nash}, {"tv", tv_at(t_nash)}}}}}};
}

} // namespace necklace
