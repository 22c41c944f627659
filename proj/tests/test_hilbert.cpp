#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scsim/errors.hpp"
#include "scsim/hilbert.hpp"
#include "scsim/rng.hpp"
#include "support.hpp"

using namespace scsim;
using oracle::rotate_y;

namespace {
constexpr double kPi = std::numbers::pi;
const HalfInt kHalf = half(1);

Direction random_direction(Rng& rng) {
    return Direction(std::acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2.0 * kPi));
}
}  // namespace

TEST_CASE("wigner small-d: pinned values") {
    CHECK(wigner_small_d(kHalf, kHalf, kHalf, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // oracle: exponentiate the 2x2 spin-y generator directly
    const Eigen::MatrixXcd u2 = rotate_y(kHalf, kPi / 2);
    CHECK(std::abs(u2(0, 0).real() - std::cos(kPi / 4)) < 1e-12);
    CHECK(wigner_small_d(kHalf, kHalf, kHalf, kPi / 2) ==
          doctest::Approx(std::cos(kPi / 4)).epsilon(1e-12));
    // oracle: 3x3 generator gives d^1_00(beta) = cos(beta)
    const Eigen::MatrixXcd u3 = rotate_y(half(2), kPi / 2);
    CHECK(std::abs(u3(1, 1).real()) < 1e-12);
    CHECK(wigner_small_d(half(2), half(0), half(0), kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("wigner small-d: equals the exponentiated generator for j <= 3") {
    Rng rng(2024);
    for (int jt = 1; jt <= 6; ++jt) {
        const HalfInt j = half(jt);
        const auto sigmas = projections(j);
        for (int rep = 0; rep < 25; ++rep) {
            const double beta = rng.uniform(-2.0 * kPi, 2.0 * kPi);
            const Eigen::MatrixXcd u = rotate_y(j, beta);
            for (int r = 0; r < spin_dim(j); ++r)
                for (int c = 0; c < spin_dim(j); ++c)
                    CHECK(std::abs(wigner_small_d(j, sigmas[r], sigmas[c], beta) - u(r, c).real()) <
                          1e-10);
        }
    }
}

TEST_CASE("wigner small-d: invalid quantum numbers") {
    CHECK_THROWS_AS(wigner_small_d(kHalf, half(3), kHalf, 1.0), std::domain_error);
    CHECK_THROWS_AS(wigner_small_d(kHalf, half(0), kHalf, 1.0), std::domain_error);  // parity
    CHECK_THROWS_AS(wigner_small_d(half(2), kHalf, half(0), 1.0), std::domain_error);
}

TEST_CASE("rotation_between: identity and z->x magnitudes") {
    const auto id = rotation_between(kHalf, Direction::z(), Direction::z());
    CHECK((id.entries - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    const auto zx = rotation_between(kHalf, Direction::z(), Direction::x());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(zx.entries(r, c)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
}

TEST_CASE("rotation_between: unitary for random axis pairs") {
    Rng rng(7);
    for (const int jt : {1, 2, 3}) {
        const HalfInt j = half(jt);
        for (int rep = 0; rep < 100; ++rep) {
            const auto m = rotation_between(j, random_direction(rng), random_direction(rng));
            const Eigen::MatrixXcd dev =
                m.entries.adjoint() * m.entries -
                Eigen::MatrixXcd::Identity(spin_dim(j), spin_dim(j));
            CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("rotation_between: composition holds exactly in this convention") {
    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const Direction a = random_direction(rng), b = random_direction(rng),
                        c = random_direction(rng);
        for (const int jt : {1, 2}) {
            const HalfInt j = half(jt);
            const Eigen::MatrixXcd direct = rotation_between(j, a, c).entries;
            const Eigen::MatrixXcd composed =
                rotation_between(j, b, c).entries * rotation_between(j, a, b).entries;
            CHECK((direct - composed).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("overlap_amplitude: basis cases") {
    const SpinState up = SpinState::basis(kHalf, kHalf, Direction::z());
    CHECK(std::abs(overlap_amplitude(up, Direction::z(), kHalf) - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(overlap_amplitude(up, Direction::z(), -kHalf)) < 1e-14);

    const Complex c = overlap_amplitude(up, Direction(kPi / 2, 0.0), kHalf);
    CHECK(std::norm(c) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("overlap amplitudes: completeness for random states and axes") {
    Rng rng(11);
    for (const int jt : {1, 2, 3}) {
        const HalfInt j = half(jt);
        for (int rep = 0; rep < 30; ++rep) {
            Eigen::VectorXcd amps(spin_dim(j));
            for (int i = 0; i < amps.size(); ++i)
                amps[i] = Complex(rng.normal(), rng.normal());
            amps /= amps.norm();
            const SpinState state(j, random_direction(rng), amps);
            const Eigen::VectorXcd c = overlap_amplitudes(state, random_direction(rng));
            CHECK(std::abs(c.squaredNorm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("transition_probability: pinned values and completeness") {
    CHECK(transition_probability(kHalf, Direction::z(), kHalf, Direction::z(), kHalf) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // half-angle law against the small-d oracle
    for (const double theta : {0.3, 0.9, kPi / 2, 2.2}) {
        const double expected = std::cos(theta / 2) * std::cos(theta / 2);
        const double d = wigner_small_d(kHalf, kHalf, kHalf, theta);
        CHECK(d * d == doctest::Approx(expected).epsilon(1e-12));
        CHECK(transition_probability(kHalf, Direction::z(), kHalf, Direction(theta, 0.0), kHalf) ==
              doctest::Approx(expected).epsilon(1e-10));
    }

    Rng rng(13);
    for (const int jt : {1, 2}) {
        const HalfInt j = half(jt);
        for (int rep = 0; rep < 50; ++rep) {
            const Direction n = random_direction(rng), k = random_direction(rng);
            const auto sigmas = projections(j);
            const HalfInt rho = sigmas[static_cast<int>(rng.uniform01() * spin_dim(j))];
            double sum = 0.0;
            for (const HalfInt s : sigmas) sum += transition_probability(rho, n, s, k, j);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("transition_probability: invariant under a global rotation") {
    Rng rng(17);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::Matrix3d r = oracle::random_rotation(
            rng.uniform(0, 2 * kPi), rng.uniform(0, kPi), rng.uniform(0, 2 * kPi));
        const Direction n = random_direction(rng), k = random_direction(rng);
        for (const int jt : {1, 2, 3}) {
            const HalfInt j = half(jt);
            const auto sigmas = projections(j);
            const HalfInt rho = sigmas[static_cast<int>(rng.uniform01() * spin_dim(j))];
            const HalfInt s = sigmas[static_cast<int>(rng.uniform01() * spin_dim(j))];
            const double before = transition_probability(rho, n, s, k, j);
            const double after =
                transition_probability(rho, oracle::rotated(n, r), s, oracle::rotated(k, r), j);
            CHECK(std::abs(before - after) < 1e-10);
        }
    }
}

TEST_CASE("spin state: invariants enforced") {
    Eigen::VectorXcd bad(2);
    bad << 0.5, 0.5;
    CHECK_THROWS_AS(SpinState(kHalf, Direction::z(), bad), std::invalid_argument);
    Eigen::VectorXcd wrong_len(3);
    wrong_len << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(SpinState(kHalf, Direction::z(), wrong_len), std::invalid_argument);
    CHECK_THROWS_AS(SpinState::basis(kHalf, half(3), Direction::z()), std::domain_error);
}

TEST_CASE("rebase round trip") {
    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXcd amps(2);
        amps << Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal());
        amps /= amps.norm();
        const SpinState s(kHalf, Direction::z(), amps);
        const SpinState back = rebase(rebase(s, Direction::x()), Direction::z());
        CHECK((back.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
    }
}
