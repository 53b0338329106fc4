#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#ifndef NECKLACE_CLI_PATH
#error "NECKLACE_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd =
        std::string(NECKLACE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string value_of(const std::string& text, const std::string& key) {
    const std::string needle = key + "=";
    size_t at = text.find(needle);
    REQUIRE(at != std::string::npos);
    at += needle.size();
    const size_t end = text.find('\n', at);
    return text.substr(at, end - at);
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("cli_test_" + name) {
        std::ofstream f(path, std::ios::binary);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("validate reports the hold bead") {
    const RunResult r = run("validate --bead simple:0.6667");
    CHECK(r.exit_code == 0);
    CHECK(value_of(r.out, "b") == "1");
    CHECK(std::stod(value_of(r.out, "mu")) == doctest::Approx(3.0003).epsilon(1e-3));
    CHECK(std::stod(value_of(r.out, "sigma2")) == doctest::Approx(6.0).epsilon(1e-2));
    CHECK(value_of(r.out, "span") == "1");
    CHECK(std::stod(value_of(r.out, "tail_rate")) < 1.0);
}

TEST_CASE("validate exit codes separate usage from domain errors") {
    CHECK(run("validate --bead simple:1.5").exit_code == 2);
    CHECK(run("validate --bead simple:abc").exit_code == 2);
    CHECK(run("validate").exit_code == 2);
    CHECK(run("validate --bead no_such_file.json").exit_code == 2);

    const TempFile bad("bad_bead.json",
                       R"({"rows": [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]})");
    CHECK(run("validate --bead " + bad.path).exit_code == 1);

    const TempFile broken("broken.json", "{not json");
    CHECK(run("validate --bead " + broken.path).exit_code == 1);

    const TempFile good("good_bead.json",
                        R"({"rows": [[0.1, 0.6, 0.3], [0.2, 0.1, 0.7]]})");
    const RunResult r = run("validate --bead " + good.path);
    CHECK(r.exit_code == 0);
    CHECK(value_of(r.out, "b") == "2");

    CHECK(run("validate --bead '{\"rows\": [[0.5, 0.5]]}'").exit_code == 0);
}

TEST_CASE("global usage errors") {
    CHECK(run("").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
    CHECK(run("evolve --help").exit_code == 0);
}

TEST_CASE("evolve at time zero is a point mass") {
    const RunResult r = run(
        "evolve --bead simple:0.5 --pattern alternating --n 8 --t 0 --start s0");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string header, first;
    std::getline(is, header);
    CHECK(header ==
          "state_id,position,kind,k,probability,stationary,tv_contribution");
    std::getline(is, first);
    CHECK(first.rfind("link:0,0,link,0,1,", 0) == 0);

    std::string line;
    double mass = 0.0;
    is = std::istringstream(r.out);
    std::getline(is, line);
    int rows = 0;
    while (std::getline(is, line)) {
        const size_t p4 = [&] {
            size_t at = 0;
            for (int i = 0; i < 4; ++i) at = line.find(',', at) + 1;
            return at;
        }();
        mass += std::stod(line.substr(p4));
        ++rows;
    }
    CHECK(rows == 8);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evolve rejects ambiguous or missing time") {
    const std::string base =
        "evolve --bead simple:0.5 --pattern alternating --n 8 ";
    CHECK(run(base).exit_code == 2);
    CHECK(run(base + "--t 5 --c 0.1").exit_code == 2);
    CHECK(run(base + "--t -3").exit_code == 2);
    CHECK(run("evolve --bead simple:0.5 --t 5").exit_code == 2);
    CHECK(run("evolve --bead simple:0.5 --pattern alternating --n 8 --r 1 0 --t 5")
              .exit_code == 2);
    CHECK(run(base + "--t 5 --start link:99").exit_code == 1);
    CHECK(run(base + "--t 5 --start nonsense").exit_code == 2);
}

TEST_CASE("evolve emits json when asked") {
    const RunResult r = run(
        "evolve --bead simple:0.5 --r 1 0 1 0 --t 7 --format json");
    CHECK(r.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("t") == 7);
    CHECK(doc.at("states").size() == 4);
    double mass = 0.0;
    for (const auto& s : doc.at("states")) mass += s.at("probability").get<double>();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("figure emits metadata and the deviation footer") {
    const RunResult r =
        run("figure --bead simple:0.6667 --pattern alternating --n 20 --c 0.1 "
            "--mode normalized");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("# mode=normalized", 0) == 0);
    CHECK(r.out.find("# max_abs_dev_from_theta=") != std::string::npos);
    CHECK(r.out.find("x,y,position,kind,k") != std::string::npos);
    CHECK(run("figure --bead simple:0.5 --pattern all --n 6 --c 0.1 --mode bogus")
              .exit_code == 2);
}

TEST_CASE("tv curve table") {
    const RunResult r =
        run("tv --bead simple:0.6667 --pattern alternating --n 30 --c 0.1 --c 0.4");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "c,t,tv_exact,tv_limit,abs_diff");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 2);
    CHECK(run("tv --bead simple:0.5 --pattern all --n 6").exit_code == 2);
    CHECK(run("tv --bead simple:0.5 --pattern all --n 6 --c -0.5").exit_code == 2);
}

TEST_CASE("bounds emits the report and polices n") {
    CHECK(run("bounds --n 4 --p 0.5").exit_code == 2);
    CHECK(run("bounds --n 10 --p 1.5").exit_code == 2);
    const RunResult r = run("bounds --n 6 --p 0.5 --eps 0.05");
    CHECK(r.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("cycle").at("connected") == false);
    CHECK(doc.at("cycle").at("beta1") == 1.0);
    CHECK(doc.at("beta1").get<double>() < 1.0);
    CHECK(doc.at("nash").at("a").get<double>() > 0.0);
    CHECK(doc.at("steps").at("nash").at("t").get<long long>() >
          doc.at("steps").at("llt").at("t").get<long long>());
}

TEST_CASE("optimal hold probability") {
    const RunResult r = run("optimal-p --k 0.5");
    CHECK(r.exit_code == 0);
    CHECK(std::stod(r.out) == doctest::Approx(0.7320508075688772).epsilon(1e-12));
    CHECK(run("optimal-p --k 0").exit_code == 2);
    CHECK(run("optimal-p --k 1.7").exit_code == 2);
}

TEST_CASE("hot agrees with the operator under --oracle") {
    const RunResult r = run(
        "hot --bead simple:0.6667 --pattern block --n 9 --t 40 --oracle");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string header;
    std::getline(is, header);
    CHECK(header == "state_id,position,kind,k,value,oracle,abs_diff");

    const RunResult single = run(
        "hot --bead simple:0.6667 --pattern block --n 9 --t 40 "
        "--target link:3 --oracle");
    CHECK(single.exit_code == 0);
    std::istringstream is2(single.out);
    std::string line;
    std::getline(is2, line);
    std::getline(is2, line);
    CHECK(line.rfind("link:3,3,link,0,", 0) == 0);
    int rows = 1;
    while (std::getline(is2, line)) ++rows;
    CHECK(rows == 1);

    CHECK(run("hot --bead simple:0.5 --pattern all --n 5 --t 3 --start link:2")
              .exit_code == 1);
}

TEST_CASE("identical invocations produce identical bytes") {
    const std::string cmd =
        "evolve --bead simple:0.6667 --pattern alternating --n 12 --c 0.15";
    const RunResult a = run(cmd);
    const RunResult b = run(cmd);
    CHECK(a.exit_code == 0);
    CHECK_FALSE(a.out.empty());
    CHECK(a.out == b.out);

    const TempFile expected("out_target.csv", "");
    const RunResult c = run(cmd + " --out " + expected.path);
    CHECK(c.exit_code == 0);
    CHECK(c.out.empty());
    std::ifstream f(expected.path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == a.out);
}
