// Command-line surface: build chains from bead specs, run the experiment
// suites, and emit deterministic CSV/JSON artifacts.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "necklace/bead.hpp"
#include "necklace/bounds.hpp"
#include "necklace/chain.hpp"
#include "necklace/hot.hpp"
#include "necklace/io.hpp"
#include "necklace/limit.hpp"

namespace {

using namespace necklace;

[[noreturn]] void usage_error(const std::string& msg) {
    throw CLI::ValidationError(msg);
}

bool parse_int(const std::string& s, int& out) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) return false;
        out = v;
        return true;
    } catch (...) {
        return false;
    }
}

BeadSpec load_bead(const std::string& src) {
    if (src.rfind("simple:", 0) == 0) {
        const std::string arg = src.substr(7);
        double hold = 0.0;
        size_t pos = 0;
        try {
            hold = std::stod(arg, &pos);
        } catch (...) {
            pos = std::string::npos;
        }
        if (pos != arg.size() || !(hold > 0.0 && hold < 1.0))
            usage_error("simple bead parameter must lie in (0,1): " + src);
        return BeadSpec::simple(hold);
    }
    std::string text;
    if (!src.empty() && src.front() == '{') {
        text = src;
    } else {
        std::ifstream f(src, std::ios::binary);
        if (!f) usage_error("bead file not found: " + src);
        std::ostringstream buf;
        buf << f.rdbuf();
        text = buf.str();
    }
    return bead_from_json(nlohmann::json::parse(text));
}

StateId parse_state(const std::string& s) {
    if (s == "s0") return StateId::link(0);
    std::vector<std::string> parts;
    size_t from = 0;
    while (true) {
        size_t colon = s.find(':', from);
        if (colon == std::string::npos) {
            parts.push_back(s.substr(from));
            break;
        }
        parts.push_back(s.substr(from, colon - from));
        from = colon + 1;
    }
    int pos = 0, slot = 0;
    if (parts.size() == 2 && parts[0] == "link" && parse_int(parts[1], pos))
        return StateId::link(pos);
    if (parts.size() == 3 && parts[0] == "interior" && parse_int(parts[1], pos) &&
        parse_int(parts[2], slot))
        return StateId::interior(pos, slot);
    usage_error("state must be s0, link:<i> or interior:<i>:<k>, got: " + s);
}

void emit(const std::string& out, const std::string& payload) {
    if (out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) usage_error("cannot open output file: " + out);
    f << payload;
}

struct Opts {
    std::string bead;
    std::string pattern;
    std::vector<int> r;
    int n = 0;
    double c = 0.0;
    std::vector<double> cs;
    long long t = 0;
    std::string start = "s0";
    std::string target;
    std::string mode = "normalized";
    std::string out;
    std::string format = "csv";
    double p = 0.5;
    double eps = 0.01;
    double k = 0.0;
    bool oracle = false;
    int origin = 0;
};

struct Given {
    CLI::Option* pattern = nullptr;
    CLI::Option* r = nullptr;
    CLI::Option* n = nullptr;
    CLI::Option* c = nullptr;
    CLI::Option* t = nullptr;
};

void add_chain_flags(CLI::App* sub, Opts& o, Given& g) {
    sub->add_option("--bead", o.bead,
                    "bead source: simple:<p>, a JSON file path, or inline JSON")
        ->required();
    g.pattern = sub->add_option("--pattern", o.pattern,
                                "indicator family: alternating|block|all|fixed-count:<m>");
    g.r = sub->add_option("--r", o.r, "explicit 0/1 indicator, one entry per position")
              ->delimiter(',');
    g.n = sub->add_option("--n", o.n, "number of positions on the cycle");
}

void add_time_flags(CLI::App* sub, Opts& o, Given& g) {
    g.c = sub->add_option("--c", o.c, "limiting time; the step count is derived");
    g.t = sub->add_option("--t", o.t, "raw step count");
}

Necklace make_chain(const Opts& o, const Given& g) {
    BeadSpec bead = load_bead(o.bead);
    const bool pattern_given = g.pattern->count() > 0;
    const bool r_given = g.r->count() > 0;
    if (pattern_given == r_given)
        usage_error("exactly one of --pattern and --r is required");
    std::vector<int> r;
    if (r_given) {
        if (g.n->count() > 0 && static_cast<int>(o.r.size()) != o.n)
            usage_error("--n disagrees with the length of --r");
        r = o.r;
    } else {
        if (g.n->count() == 0) usage_error("--pattern requires --n");
        r = indicator_gallery(o.pattern, o.n);
    }
    return build_necklace(analyze_bead(bead), std::move(r));
}

long long resolve_t(const NecklaceSpec& spec, const Opts& o, const Given& g) {
    const bool c_given = g.c->count() > 0;
    const bool t_given = g.t->count() > 0;
    if (c_given == t_given) usage_error("exactly one of --c and --t is required");
    if (t_given) {
        if (o.t < 0) usage_error("--t must be nonnegative");
        return o.t;
    }
    if (!(o.c > 0.0)) usage_error("--c must be positive");
    return time_scale(spec.link_count(), spec.bead_count(), spec.mean_fpt(),
                      spec.var_fpt(), o.c);
}

void run_validate(const Opts& o) {
    const BeadAnalysis bead = analyze_bead(load_bead(o.bead));
    std::ostringstream os;
    os << "b=" << bead.spec.exit_state() << "\n";
    os << "mu=" << format17(bead.mean()) << "\n";
    os << "sigma2=" << format17(bead.variance()) << "\n";
    os << "span=" << bead.spec.span() << "\n";
    os << "eps_tail=" << format17(bead.fpt.eps_tail) << "\n";
    os << "horizon=" << bead.fpt.horizon() << "\n";
    os << "min_support=" << bead.fpt.min_support() << "\n";
    os << "tail_start=" << bead.fpt.tail_start << "\n";
    os << "tail_rate=" << format17(bead.fpt.tail_rate) << "\n";
    emit(o.out, os.str());
}

void run_evolve(const Opts& o, const Given& g) {
    const Necklace chain = make_chain(o, g);
    const long long t = resolve_t(chain.spec, o, g);
    const StateId start = parse_state(o.start);
    const Eigen::VectorXd pi = stationary(chain);
    const Eigen::VectorXd dist = evolve(chain.op, point_mass(chain.spec, start), t);
    if (o.format == "csv") {
        std::ostringstream os;
        write_distribution_csv(os, chain.spec, dist, &pi);
        emit(o.out, os.str());
        return;
    }
    nlohmann::json states = nlohmann::json::array();
    for (int idx = 0; idx < chain.spec.size(); ++idx) {
        const StateId id = chain.spec.state_of(idx);
        states.push_back({{"state_id", to_string(id)},
                          {"position", id.position},
                          {"kind", id.kind == StateId::Kind::link ? "link" : "interior"},
                          {"k", id.slot},
                          {"probability", dist(idx)},
                          {"stationary", pi(idx)},
                          {"tv_contribution", 0.5 * std::abs(dist(idx) - pi(idx))}});
    }
    const nlohmann::json doc{{"t", t},
                             {"start", to_string(start)},
                             {"tv_from_stationary", tv_distance(dist, pi)},
                             {"states", states}};
    emit(o.out, doc.dump(2) + "\n");
}

void run_figure(const Opts& o, const Given& g) {
    const Necklace chain = make_chain(o, g);
    const long long t = resolve_t(chain.spec, o, g);
    const StateId start = parse_state(o.start);
    ProfileMode mode = ProfileMode::normalized;
    if (o.mode == "raw")
        mode = ProfileMode::raw;
    else if (o.mode == "rearranged")
        mode = ProfileMode::rearranged;
    else if (o.mode != "normalized")
        usage_error("--mode must be raw, rearranged or normalized");
    const std::vector<ProfilePoint> points = figure_profile(chain, t, start, mode);
    std::ostringstream os;
    write_profile_csv(os, chain, points, mode, t, back_solve_c(chain.spec, t));
    emit(o.out, os.str());
}

void run_tv(const Opts& o, const Given& g) {
    const Necklace chain = make_chain(o, g);
    if (o.cs.empty()) usage_error("at least one --c value is required");
    for (double c : o.cs)
        if (!(c > 0.0)) usage_error("--c values must be positive");
    const StateId start = parse_state(o.start);
    const std::vector<TvPoint> points = tv_curve(chain, start, o.cs);
    std::ostringstream os;
    write_tv_csv(os, points);
    emit(o.out, os.str());
}

void run_bounds(const Opts& o) {
    if (o.n < 5) usage_error("--n must be at least 5");
    if (!(o.p > 0.0 && o.p < 1.0)) usage_error("--p must lie in (0,1)");
    if (!(o.eps > 0.0 && o.eps < 1.0)) usage_error("--eps must lie in (0,1)");
    std::vector<long long> fill_times{0};
    for (long long t = 1; t <= (1LL << 20); t *= 2) fill_times.push_back(t);
    const nlohmann::json doc = bound_report(o.n, o.p, o.eps, o.origin, fill_times);
    emit(o.out, doc.dump(2) + "\n");
}

void run_optimal(const Opts& o) {
    if (!(o.k > 0.0 && o.k <= 1.0)) usage_error("--k must lie in (0,1]");
    emit(o.out, format17(optimal_hold(o.k)) + "\n");
}

void run_hot(const Opts& o, const Given& g) {
    const Necklace chain = make_chain(o, g);
    const long long t = resolve_t(chain.spec, o, g);
    const StateId start = parse_state(o.start);
    HotEvaluator eval(chain.spec);

    std::vector<int> targets;
    if (o.target.empty()) {
        targets.resize(static_cast<size_t>(chain.spec.size()));
        for (int idx = 0; idx < chain.spec.size(); ++idx)
            targets[static_cast<size_t>(idx)] = idx;
    } else {
        targets.push_back(chain.spec.index_of(parse_state(o.target)));
    }

    Eigen::VectorXd reference;
    if (o.oracle)
        reference = evolve(chain.op, point_mass(chain.spec, start), t);

    std::ostringstream os;
    os << "state_id,position,kind,k,value";
    if (o.oracle) os << ",oracle,abs_diff";
    os << "\n";
    double max_diff = 0.0;
    for (int idx : targets) {
        const StateId id = chain.spec.state_of(idx);
        const double value = eval.probability(t, start, id);
        os << to_string(id) << ',' << id.position << ','
           << (id.kind == StateId::Kind::link ? "link" : "interior") << ',' << id.slot
           << ',' << format17(value);
        if (o.oracle) {
            const double diff = std::abs(value - reference(idx));
            max_diff = std::max(max_diff, diff);
            os << ',' << format17(reference(idx)) << ',' << format17(diff);
        }
        os << "\n";
    }
    emit(o.out, os.str());
    if (o.oracle && max_diff > 1e-9)
        fail(Errc::numerical_drift,
             "loop-count evaluation disagrees with the operator by " +
                 format17(max_diff));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"necklace chains: exact evolution, loop-count transition "
                 "probabilities, limiting profiles, and convergence bounds"};
    app.require_subcommand(1);

    Opts o;
    Given g_evolve, g_figure, g_tv, g_hot;

    CLI::App* validate = app.add_subcommand("validate", "check a bead and print its report");
    validate->add_option("--bead", o.bead, "bead source")->required();
    validate->add_option("--out", o.out, "output path (default stdout)");
    validate->callback([&] { run_validate(o); });

    CLI::App* evolve_cmd =
        app.add_subcommand("evolve", "exact distribution at time t against stationary");
    add_chain_flags(evolve_cmd, o, g_evolve);
    add_time_flags(evolve_cmd, o, g_evolve);
    evolve_cmd->add_option("--start", o.start, "start state (default s0)");
    evolve_cmd->add_option("--format", o.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    evolve_cmd->add_option("--out", o.out, "output path (default stdout)");
    evolve_cmd->callback([&] { run_evolve(o, g_evolve); });

    CLI::App* figure =
        app.add_subcommand("figure", "profile of the distribution on the limiting circle");
    add_chain_flags(figure, o, g_figure);
    add_time_flags(figure, o, g_figure);
    figure->add_option("--start", o.start, "start state (default s0)");
    figure->add_option("--mode", o.mode, "raw|rearranged|normalized (default normalized)");
    figure->add_option("--out", o.out, "output path (default stdout)");
    figure->callback([&] { run_figure(o, g_figure); });

    CLI::App* tv = app.add_subcommand(
        "tv", "exact vs limiting total-variation distance over a grid of c values");
    add_chain_flags(tv, o, g_tv);
    tv->add_option("--c", o.cs, "limiting times (repeatable)");
    tv->add_option("--start", o.start, "start state (default s0)");
    tv->add_option("--out", o.out, "output path (default stdout)");
    tv->callback([&] { run_tv(o, g_tv); });

    CLI::App* bounds = app.add_subcommand(
        "bounds", "spectral, comparison, growth and Nash bounds for the hold chain");
    bounds->add_option("--n", o.n, "number of states (at least 5)")->required();
    bounds->add_option("--p", o.p, "hold probability in (0,1)")->required();
    bounds->add_option("--eps", o.eps, "target accuracy for step budgets (default 0.01)");
    bounds->add_option("--start", o.origin, "start state index (default 0)");
    bounds->add_option("--out", o.out, "output path (default stdout)");
    bounds->callback([&] { run_bounds(o); });

    CLI::App* optimal =
        app.add_subcommand("optimal-p", "hold probability minimising the time scale");
    optimal->add_option("--k", o.k, "limiting bead fraction in (0,1]")->required();
    optimal->add_option("--out", o.out, "output path (default stdout)");
    optimal->callback([&] { run_optimal(o); });

    CLI::App* hot = app.add_subcommand(
        "hot", "transition probabilities by loop counting, without the operator");
    add_chain_flags(hot, o, g_hot);
    add_time_flags(hot, o, g_hot);
    hot->add_option("--start", o.start, "start state (default s0)");
    hot->add_option("--target", o.target, "single target state (default: all states)");
    hot->add_flag("--oracle", o.oracle, "cross-check against the operator");
    hot->add_option("--out", o.out, "output path (default stdout)");
    hot->callback([&] { run_hot(o, g_hot); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const necklace::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
