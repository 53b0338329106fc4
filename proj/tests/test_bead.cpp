#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "necklace/bead.hpp"
#include "support/gallery.hpp"
#include "support/oracles.hpp"

using namespace necklace;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a structured error");
    return Errc::not_stochastic;
}

} // namespace

TEST_CASE("simple bead has geometric first-passage law") {
    const double p = 2.0 / 3.0, q = 1.0 - p;
    const BeadSpec bead = BeadSpec::simple(p);
    CHECK(bead.exit_state() == 1);
    CHECK(bead.span() == 1);

    const FirstPassagePmf fpt = first_passage_pmf(bead);
    CHECK(fpt.total() == doctest::Approx(1.0).epsilon(1e-13));
    for (long long t = 1; t <= 30; ++t)
        CHECK(fpt.at(t) == doctest::Approx(std::pow(p, double(t - 1)) * q).epsilon(1e-13));
    CHECK(fpt.at(0) == 0.0);
    CHECK(fpt.at(fpt.horizon() + 5) == 0.0);
    CHECK(fpt.min_support() == 1);

    // the pmf is truncated where survival drops below eps_tail, which costs
    // O(horizon^2 * eps_tail) of tail variance
    CHECK(fpt.mean == doctest::Approx(1.0 / q).epsilon(1e-11));
    CHECK(fpt.variance == doctest::Approx(p / (q * q)).epsilon(1e-10));
}

TEST_CASE("two-point bead: mass splits over times 1 and 2") {
    const BeadSpec bead = BeadSpec::validate({{0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}});
    const FirstPassagePmf fpt = first_passage_pmf(bead);
    CHECK(fpt.at(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fpt.at(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fpt.horizon() == 2);
    CHECK(fpt.mean == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(fpt.variance == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("moments match the fundamental-matrix solve") {
    for (const BeadSpec& bead : {gallery::simple_bead(), gallery::rich_bead()}) {
        const FirstPassagePmf fpt = first_passage_pmf(bead);
        const auto exact = oracle::absorbing_moments(bead.rows());
        CHECK(fpt.mean == doctest::Approx(exact.mean).epsilon(1e-10));
        CHECK(fpt.variance == doctest::Approx(exact.variance).epsilon(1e-10));
    }
}

TEST_CASE("validation rejects malformed rows in a fixed order") {
    CHECK_THROWS_AS(BeadSpec::validate({}), std::invalid_argument);
    CHECK_THROWS_AS(BeadSpec::validate({{0.5, 0.5}, {0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(BeadSpec::validate({{0.5, 0.5, 0.0}}), std::invalid_argument);

    CHECK(code_of([] { BeadSpec::validate({{-0.1, 1.1}}); }) == Errc::not_stochastic);
    CHECK(code_of([] { BeadSpec::validate({{0.4, 0.4}}); }) == Errc::not_stochastic);
    CHECK(code_of([] { BeadSpec::validate({{1.0, 0.0}}); }) == Errc::extra_absorbing);
    CHECK(code_of([] {
              BeadSpec::validate({{0.0, 0.5, 0.5}, {0.0, 1.0, 0.0}});
          }) == Errc::extra_absorbing);

    // interior state off every entrance-to-exit path
    CHECK(code_of([] {
              BeadSpec::validate({{0.5, 0.0, 0.5}, {0.0, 0.0, 1.0}});
          }) == Errc::unreachable);
    // interior pair trapped in a loop that never reaches the exit
    CHECK(code_of([] {
              BeadSpec::validate({{0.0, 0.5, 0.0, 0.5},
                                  {0.0, 0.0, 1.0, 0.0},
                                  {0.0, 1.0, 0.0, 0.0}});
          }) == Errc::unreachable);
}

TEST_CASE("span gate accepts gcd-1 supports and nothing else") {
    // deterministic two-step bead: single support point
    CHECK(code_of([] {
              BeadSpec::validate({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
          }) == Errc::span_violation);
    // support {3, 5, 7, ...}: all gaps even
    CHECK(code_of([] {
              BeadSpec::validate({{0.0, 1.0, 0.0, 0.0},
                                  {0.0, 0.0, 1.0, 0.0},
                                  {0.0, 0.5, 0.0, 0.5}});
          }) == Errc::span_violation);
    // support {2, 3, 4, ...}: gaps of 1
    CHECK_NOTHROW(BeadSpec::validate({{0.0, 1.0, 0.0}, {0.3, 0.3, 0.4}}));
    // support {1, 2}
    CHECK_NOTHROW(BeadSpec::validate({{0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}}));
}

TEST_CASE("simple bead parameter must sit strictly inside (0,1)") {
    CHECK(code_of([] { BeadSpec::simple(0.0); }) == Errc::out_of_range);
    CHECK(code_of([] { BeadSpec::simple(1.0); }) == Errc::out_of_range);
    CHECK(code_of([] { BeadSpec::simple(1.5); }) == Errc::out_of_range);
    CHECK_NOTHROW(BeadSpec::simple(0.5));
}

TEST_CASE("tail tolerance domain and horizon cap") {
    const BeadSpec bead = gallery::simple_bead();
    CHECK(code_of([&] { first_passage_pmf(bead, 1e-9); }) == Errc::out_of_range);
    CHECK(code_of([&] { first_passage_pmf(bead, 0.0); }) == Errc::out_of_range);

    const BeadSpec glacial = BeadSpec::simple(1.0 - 1e-8);
    CHECK(code_of([&] { first_passage_pmf(glacial); }) == Errc::horizon_exceeded);
}

TEST_CASE("tail certificate dominates the stored pmf") {
    for (const BeadSpec& bead : {gallery::simple_bead(), gallery::rich_bead()}) {
        const FirstPassagePmf fpt = first_passage_pmf(bead);
        CHECK(fpt.tail_rate > 0.0);
        CHECK(fpt.tail_rate < 1.0);
        CHECK(fpt.tail_start >= fpt.min_support());
        double cumulative = 0.0;
        for (long long t = 1; t <= fpt.horizon(); ++t) {
            cumulative += fpt.at(t);
            if (t <= fpt.tail_start) continue;
            const double cap = std::pow(fpt.tail_rate, double(t));
            CHECK(fpt.at(t) <= cap);
            CHECK(1.0 - cumulative < cap + fpt.eps_tail);
        }
    }
}

TEST_CASE("degenerate pmf moments are rejected") {
    CHECK(code_of([] { pmf_moments({1.0}); }) == Errc::degenerate_variance);
    const Moments m = pmf_moments({0.5, 0.5});
    CHECK(m.mean == doctest::Approx(1.5));
    CHECK(m.variance == doctest::Approx(0.25));
}

TEST_CASE("closure stationary mass at the exit is 1/(mean+1)") {
    for (const BeadSpec& bead : {gallery::simple_bead(), gallery::rich_bead()}) {
        const BeadAnalysis a = analyze_bead(bead);
        const int b = bead.exit_state();
        CHECK(a.closure_pi(b) == doctest::Approx(1.0 / (a.mean() + 1.0)).epsilon(1e-12));
        CHECK(a.closure_pi.minCoeff() > 0.0);
        CHECK(a.closure_pi.sum() == doctest::Approx(1.0).epsilon(1e-13));

        const Eigen::MatrixXd C = bead.closure_matrix();
        const Eigen::VectorXd res = C.transpose() * a.closure_pi - a.closure_pi;
        CHECK(res.lpNorm<Eigen::Infinity>() < 1e-12);
    }

    // second solver: power iteration on the two-path bead's closure
    const BeadSpec two = BeadSpec::validate({{0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}});
    const BeadAnalysis ta = analyze_bead(two);
    const Eigen::MatrixXd C = two.closure_matrix();
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Constant(C.rows(), 1.0 / C.rows());
    for (int it = 0; it < 20000; ++it) {
        Eigen::RowVectorXd next = mu * C;
        if ((next - mu).lpNorm<Eigen::Infinity>() < 1e-16) {
            mu = next;
            break;
        }
        mu = next;
    }
    CHECK((mu.transpose() - ta.closure_pi).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("taboo sums equal closure masses scaled by mean+1") {
    for (const BeadSpec& bead : {gallery::simple_bead(), gallery::rich_bead()}) {
        const BeadAnalysis a = analyze_bead(bead);
        for (int k = 0; k < bead.exit_state(); ++k)
            CHECK(a.taboo[size_t(k)] ==
                  doctest::Approx(a.closure_pi(k) * (a.mean() + 1.0)).epsilon(1e-10));
    }
    // one hold state: expected visits to the entrance before exit is 1/q
    const BeadAnalysis s = analyze_bead(BeadSpec::simple(2.0 / 3.0));
    CHECK(s.taboo[0] == doctest::Approx(3.0).epsilon(1e-12));
}
