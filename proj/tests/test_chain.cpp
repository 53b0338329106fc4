#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "necklace/chain.hpp"
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

TEST_CASE("indicator families") {
    CHECK(indicator_gallery("alternating", 4) == std::vector<int>{1, 0, 1, 0});
    CHECK(indicator_gallery("alternating", 5) == std::vector<int>{1, 0, 1, 0, 1});
    CHECK(indicator_gallery("block", 5) == std::vector<int>{1, 1, 1, 0, 0});
    CHECK(indicator_gallery("block", 4) == std::vector<int>{1, 1, 0, 0});
    CHECK(indicator_gallery("all", 3) == std::vector<int>{1, 1, 1});
    CHECK(indicator_gallery("fixed-count:2", 5) == std::vector<int>{1, 1, 0, 0, 0});

    CHECK(code_of([] { indicator_gallery("bogus", 8); }) == Errc::unknown_pattern);
    CHECK(code_of([] { indicator_gallery("fixed-count:9", 5) ; }) == Errc::out_of_range);
    CHECK(code_of([] { indicator_gallery("fixed-count:x", 5) ; }) == Errc::unknown_pattern);
    CHECK(code_of([] { indicator_gallery("all", 1); }) == Errc::out_of_range);
}

TEST_CASE("state indexing round-trips and counts states") {
    for (const auto& cs : gallery::cases()) {
        const NecklaceSpec& spec = cs.chain.spec;
        const int b = spec.bead_exit();
        CHECK(spec.size() ==
              spec.link_count() + spec.bead_count() * (b - 1));
        for (int idx = 0; idx < spec.size(); ++idx)
            CHECK(spec.index_of(spec.state_of(idx)) == idx);
        CHECK(spec.beads_before(0) == 0);
        CHECK(spec.beads_before(spec.link_count()) == spec.bead_count());
    }
}

TEST_CASE("interior addresses exist only on beads") {
    const Necklace chain = build_necklace(analyze_bead(gallery::rich_bead()),
                                          {1, 0, 1, 0});
    const NecklaceSpec& spec = chain.spec;
    CHECK(spec.index_of(StateId::link(0)) == 0);
    CHECK(spec.index_of(StateId::interior(0, 1)) == 1);
    CHECK(spec.index_of(StateId::link(1)) == 2);
    CHECK(spec.index_of(StateId::link(2)) == 3);
    CHECK(spec.index_of(StateId::interior(2, 1)) == 4);
    CHECK(spec.index_of(StateId::link(3)) == 5);

    CHECK(code_of([&] { spec.index_of(StateId::interior(1, 1)); }) == Errc::out_of_range);
    CHECK(code_of([&] { spec.index_of(StateId::interior(0, 0)); }) == Errc::out_of_range);
    CHECK(code_of([&] { spec.index_of(StateId::interior(0, 2)); }) == Errc::out_of_range);
    CHECK(code_of([&] { spec.index_of(StateId::link(4)); }) == Errc::out_of_range);
    CHECK(code_of([&] { spec.index_of(StateId::link(-1)); }) == Errc::out_of_range);

    CHECK(to_string(StateId::link(3)) == "link:3");
    CHECK(to_string(StateId::interior(2, 1)) == "interior:2:1");
}

TEST_CASE("construction wires bead copies into the cycle") {
    const double p = 2.0 / 3.0, q = 1.0 - p;
    const Necklace chain = build_necklace(analyze_bead(gallery::simple_bead()),
                                          {1, 0, 0});
    const Eigen::MatrixXd P = chain.op.dense();
    // states: link0 (bead entrance), link1, link2
    CHECK(P(0, 0) == doctest::Approx(p));
    CHECK(P(0, 1) == doctest::Approx(q));
    CHECK(P(1, 2) == doctest::Approx(1.0));
    CHECK(P(2, 0) == doctest::Approx(1.0));
    CHECK((P.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("single-position necklace folds the bead onto one link") {
    const Necklace chain = build_necklace(analyze_bead(gallery::simple_bead()), {1});
    CHECK(chain.spec.size() == 1);
    CHECK(chain.op.dense()(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("rows are stochastic on every gallery chain") {
    for (const auto& cs : gallery::cases()) {
        CAPTURE(cs.name);
        const Eigen::VectorXd sums = cs.chain.op.dense().rowwise().sum();
        CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("chain requires at least one bead") {
    CHECK(code_of([] {
              build_necklace(analyze_bead(gallery::simple_bead()), {0, 0, 0});
          }) == Errc::no_beads);
    CHECK(code_of([] {
              build_necklace(analyze_bead(gallery::simple_bead()), {1, 2});
          }) == Errc::out_of_range);
    CHECK_THROWS_AS(build_necklace(analyze_bead(gallery::simple_bead()), {}),
                    std::invalid_argument);
}

TEST_CASE("closed-form stationary matches a dense solve") {
    for (const auto& cs : gallery::cases()) {
        CAPTURE(cs.name);
        const Eigen::VectorXd pi = stationary(cs.chain);
        const Eigen::VectorXd ref = oracle::stationary_dense(cs.chain.op.dense());
        CHECK((pi - ref).lpNorm<Eigen::Infinity>() < 1e-12);
        const Eigen::VectorXd residual =
            cs.chain.op.dense().transpose() * pi - pi;
        CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(pi.minCoeff() > 0.0);
    }
}

TEST_CASE("stationary values follow the two-level weight formula") {
    const Necklace chain = build_necklace(analyze_bead(gallery::simple_bead()),
                                          indicator_gallery("alternating", 10));
    const double W = chain.spec.weight();
    CHECK(W == doctest::Approx(10 + 2.0 * 5).epsilon(1e-11));
    const Eigen::VectorXd pi = stationary(chain);
    for (int i = 0; i < 10; ++i) {
        const double mass = pi(chain.spec.index_of(StateId::link(i)));
        if (chain.spec.bead_at(i))
            CHECK(mass == doctest::Approx(3.0 / W).epsilon(1e-12));
        else
            CHECK(mass == doctest::Approx(1.0 / W).epsilon(1e-12));
    }
}

TEST_CASE("evolution agrees with dense matrix powers") {
    const Necklace chain = build_necklace(analyze_bead(gallery::rich_bead()),
                                          indicator_gallery("block", 7));
    const Eigen::MatrixXd P = chain.op.dense();
    const Eigen::VectorXd start = point_mass(chain.spec, StateId::link(0));
    for (long long t : {0LL, 1LL, 2LL, 3LL, 17LL, 120LL}) {
        const Eigen::VectorXd got = evolve(chain.op, start, t);
        const Eigen::VectorXd want =
            oracle::matrix_power(P, t).transpose() * start;
        CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(got.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(got.minCoeff() >= 0.0);
    }
    CHECK(code_of([&] { evolve(chain.op, start, -1); }) == Errc::out_of_range);
}

TEST_CASE("total variation distance") {
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, b) == doctest::Approx(1.0));
    Eigen::VectorXd c(3);
    c << 1.0, 0.0, 0.0;
    CHECK(code_of([&] { tv_distance(a, c); }) == Errc::dimension_mismatch);
}

TEST_CASE("operator constructor polices shape and mass") {
    Eigen::MatrixXd bad(2, 3);
    bad.setZero();
    CHECK(code_of([&] { TransitionOperator::from_dense(bad); }) ==
          Errc::dimension_mismatch);

    Eigen::MatrixXd neg(2, 2);
    neg << 1.2, -0.2, 0.0, 1.0;
    CHECK(code_of([&] { TransitionOperator::from_dense(neg); }) == Errc::not_stochastic);

    Eigen::MatrixXd low(2, 2);
    low << 0.4, 0.4, 0.5, 0.5;
    CHECK(code_of([&] { TransitionOperator::from_dense(low); }) == Errc::not_stochastic);

    Eigen::MatrixXd drift(2, 2);
    drift << 0.5 + 5e-13, 0.5, 0.25, 0.75;
    const TransitionOperator op = TransitionOperator::from_dense(drift);
    CHECK(op.dense().rowwise().sum().isApproxToConstant(1.0, 1e-15));
}
