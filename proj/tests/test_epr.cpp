#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scsim/epr.hpp"
#include "scsim/errors.hpp"
#include "scsim/rng.hpp"
#include "support.hpp"

using namespace scsim;

namespace {
constexpr double kPi = std::numbers::pi;

Direction random_direction(Rng& rng) {
    return Direction(std::acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2.0 * kPi));
}

PairState random_product_pair(Rng& rng) {
    Eigen::VectorXcd a(2), b(2);
    for (int i = 0; i < 2; ++i) {
        a[i] = Complex(rng.normal(), rng.normal());
        b[i] = Complex(rng.normal(), rng.normal());
    }
    a /= a.norm();
    b /= b.norm();
    return PairState(half(1), Direction::z(), Direction::z(), a * b.transpose());
}
}  // namespace

TEST_CASE("singlet: norm, perfect anticorrelation, rotational invariance") {
    const PairState s = singlet_pair();
    CHECK(std::abs(s.amps.norm() - 1.0) < 1e-14);

    const auto same_axis = joint_table(s, Direction::z(), Direction::z());
    CHECK(same_axis.probs(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(same_axis.probs(1, 1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(same_axis.probs(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(same_axis.probs(1, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // the joint table depends only on the angle between the axes
    Rng rng(314);
    for (int rep = 0; rep < 20; ++rep) {
        const Direction n1 = random_direction(rng), n2 = random_direction(rng);
        const Eigen::Matrix3d r = oracle::random_rotation(
            rng.uniform(0, 2 * kPi), rng.uniform(0, kPi), rng.uniform(0, 2 * kPi));
        const auto before = joint_table(s, n1, n2).probs;
        const auto after = joint_table(s, oracle::rotated(n1, r), oracle::rotated(n2, r)).probs;
        CHECK((before - after).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("joint_table: singlet half-angle law and normalization") {
    const PairState s = singlet_pair();
    for (const double theta : {0.0, 0.4, kPi / 3, kPi / 2, 2.6, kPi}) {
        const auto table = joint_table(s, Direction::z(), Direction(theta, 0.0));
        // P(+,+) = 1/2 sin^2(theta/2), by explicit 2x2 rotation algebra
        const double st = std::sin(theta / 2);
        CHECK(table.probs(0, 0) == doctest::Approx(0.5 * st * st).epsilon(1e-12));
        CHECK(table.probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("joint_table: no-signalling marginals") {
    const PairState s = singlet_pair();
    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        const Direction n1 = random_direction(rng);
        const Direction n2a = random_direction(rng), n2b = random_direction(rng);
        const auto pa = joint_table(s, n1, n2a).probs;
        const auto pb = joint_table(s, n1, n2b).probs;
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(pa.row(i).sum() - pb.row(i).sum()) < 1e-12);
    }
}

TEST_CASE("correlation: -cos(theta) for the singlet") {
    const PairState s = singlet_pair();
    CHECK(correlation(s, Direction::z(), Direction::z()) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(correlation(s, Direction::z(), Direction::x())) < 1e-12);
    CHECK(correlation(s, Direction::z(), Direction(kPi, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        const Direction n1 = random_direction(rng), n2 = random_direction(rng);
        CHECK(correlation(s, n1, n2) ==
              doctest::Approx(-std::cos(angle_between(n1, n2))).epsilon(1e-10));
    }
}

TEST_CASE("chsh: optimal settings reach 2 sqrt 2 analytically") {
    const PairState s = singlet_pair();
    const ChshSettings optimal{Direction::polar(kPi / 4), Direction::polar(3 * kPi / 4),
                               Direction::polar(kPi / 2), Direction::polar(0.0)};
    const auto r = chsh(s, optimal);
    CHECK(std::abs(r.s - 2.0 * std::sqrt(2.0)) < 1e-9);
    CHECK(std::abs(r.s - 2.8284271247461903) < 1e-9);
    CHECK(r.violation);
}

TEST_CASE("chsh: degenerate settings collapse to 2|E|") {
    const PairState s = singlet_pair();
    const Direction a = Direction::polar(0.3), b = Direction::polar(1.1);
    const auto r = chsh(s, ChshSettings{a, a, b, b});
    CHECK(r.s == doctest::Approx(2.0 * std::abs(correlation(s, a, b))).epsilon(1e-12));
    CHECK(r.s <= 2.0 + 1e-9);
}

TEST_CASE("chsh: product states never beat the classical bound") {
    Rng rng(2718);
    for (int rep = 0; rep < 200; ++rep) {
        const PairState p = random_product_pair(rng);
        const ChshSettings st{random_direction(rng), random_direction(rng),
                              random_direction(rng), random_direction(rng)};
        CHECK(chsh(p, st).s <= 2.0 + 1e-9);
    }
}

TEST_CASE("chsh: Tsirelson ceiling over random setting quadruples") {
    const PairState s = singlet_pair();
    const double ceiling = 2.0 * std::sqrt(2.0) + 1e-9;
    Rng rng(161803);
    for (int rep = 0; rep < 10000; ++rep) {
        const ChshSettings st{random_direction(rng), random_direction(rng),
                              random_direction(rng), random_direction(rng)};
        CHECK(chsh(s, st).s <= ceiling);
    }
}

TEST_CASE("sampled_chsh: seed-deterministic, within four standard errors") {
    const PairState s = singlet_pair();
    const ChshSettings optimal{Direction::polar(kPi / 4), Direction::polar(3 * kPi / 4),
                               Direction::polar(kPi / 2), Direction::polar(0.0)};
    const std::int64_t trials = 100000;
    const auto r1 = sampled_chsh(s, optimal, trials, 20250808);
    const auto r2 = sampled_chsh(s, optimal, trials, 20250808);
    CHECK(r1.s == r2.s);  // bitwise
    CHECK(r1.se_s == r2.se_s);

    const double analytic = 2.0 * std::sqrt(2.0);
    CHECK(std::abs(r1.s - analytic) < 4.0 * r1.se_s);
    CHECK(r1.s > 2.0 + 4.0 * r1.se_s);  // violation by many standard errors
    CHECK(r1.s >= 2.78);
    CHECK(r1.s <= 2.88);
}

TEST_CASE("sampled_chsh: zero-probability cells never fire") {
    const PairState s = singlet_pair();
    // identical axes: P(+,+) = P(-,-) = 0 exactly
    const ChshSettings same{Direction::z(), Direction::z(), Direction::z(), Direction::z()};
    std::vector<PairTrial> trials;
    sampled_chsh(s, same, 50000, 31337, &trials);
    for (const auto& t : trials) CHECK(t.sigma1_twice != t.sigma2_twice);
}

TEST_CASE("sampled_chsh: trial count contract") {
    const PairState s = singlet_pair();
    const ChshSettings st{Direction::z(), Direction::x(), Direction::z(), Direction::x()};
    CHECK_THROWS_AS(sampled_chsh(s, st, 999, 1), ContractError);
}

TEST_CASE("pair state: invariants") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = 0.5;
    CHECK_THROWS_AS(PairState(half(1), Direction::z(), Direction::z(), bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(correlation(PairState(half(2), Direction::z(), Direction::z(),
                                          Eigen::MatrixXcd::Identity(3, 3) / std::sqrt(3.0)),
                                Direction::z(), Direction::z()),
                    std::domain_error);
}
