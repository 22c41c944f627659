#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scsim/errors.hpp"
#include "scsim/potential.hpp"
#include "scsim/quantum.hpp"
#include "scsim/rng.hpp"
#include "support.hpp"

using namespace scsim;

namespace {
constexpr double kPi = std::numbers::pi;
const HalfInt kHalf = half(1);
}  // namespace

TEST_CASE("gaussian packet: real and symmetric at rest, unit norm in general") {
    const GridSpec grid(-8.0, 8.0, 256);
    const auto at_rest = gaussian_packet(grid, 0.0, 0.0, 1.0, 1.0, 1.0);
    CHECK(at_rest.amps.imag().abs().maxCoeff() < 1e-14);
    for (int i = 1; i < grid.count() / 2; ++i) {
        const int mirror = grid.count() - i;  // q_i and q_mirror sit symmetric about q0 = 0
        CHECK(std::abs(at_rest.amps[i] - at_rest.amps[mirror]) < 1e-12);
    }

    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const double sigma = rng.uniform(0.3, 1.2);
        const double q0 = rng.uniform(-1.5, 1.5);
        const double p0 = rng.uniform(-3.0, 3.0);
        const auto psi = gaussian_packet(grid, q0, p0, sigma, 0.7, 1.3);
        CHECK(std::abs(norm(psi) - 1.0) < 1e-12);
        CHECK(mean_momentum(psi) == doctest::Approx(p0).epsilon(1e-8));
    }
}

TEST_CASE("gaussian packet: resolution and margin rules are enforced") {
    const GridSpec grid(-8.0, 8.0, 64);  // dq = 0.25
    CHECK_THROWS_AS(gaussian_packet(grid, 0.0, 0.0, 0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_packet(grid, 6.0, 0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("free packet: spreading matches the analytic width") {
    const GridSpec grid(-20.0, 20.0, 1024);
    const double sigma = 1.0, hbar = 1.0, mass = 1.0, T = 2.0;
    auto psi = gaussian_packet(grid, 0.0, 0.0, sigma, hbar, mass);
    psi = evolve(psi, make_free_potential({-20.0, 20.0}), 1e-3, 2000);
    const double widening = hbar * T / (2.0 * mass * sigma * sigma);
    const double expected = sigma * sigma * (1.0 + widening * widening);
    CHECK(std::abs(position_variance(psi) - expected) < 1e-6);
    CHECK(std::abs(psi.t - T) < 1e-12);
}

TEST_CASE("harmonic packet: refocuses after one period") {
    const GridSpec grid(-12.0, 12.0, 512);
    const auto v = make_harmonic_potential(1.0, 1.0, 0.0, {-12.0, 12.0});
    const auto psi0 = gaussian_packet(grid, 1.5, 0.0, std::sqrt(0.5), 1.0, 1.0);
    const int steps = 12566;  // ~2 pi / 5e-4
    const auto psi = evolve(psi0, v, 2.0 * kPi / steps, steps);
    CHECK(std::abs(inner_product(psi0, psi)) > 1.0 - 1e-6);
}

TEST_CASE("split operator: norm drift below 1e-9 over 1e4 steps") {
    const GridSpec grid(-8.0, 8.0, 512);
    const auto v = make_quartic_perturbed_potential(1.0, 1.0, 0.05, {-8.0, 8.0});
    auto psi = gaussian_packet(grid, 1.0, 1.0, 0.8, 1.0, 1.0);
    SplitOperator op(grid, v, 5e-4, psi.hbar, psi.mass);
    op.advance(psi, 10000);
    CHECK(std::abs(norm(psi) - 1.0) < 1e-9);
}

TEST_CASE("split operator: second-order accuracy under dt halving") {
    const GridSpec grid(-8.0, 8.0, 512);
    const auto v = make_quartic_perturbed_potential(1.0, 1.0, 0.05, {-8.0, 8.0});
    const auto psi0 = gaussian_packet(grid, 1.0, 0.5, 0.8, 1.0, 1.0);
    const double T = 1.0;

    const auto run = [&](int steps) { return evolve(psi0, v, T / steps, steps); };
    const auto reference = run(8000);  // dt/8 baseline
    const auto err = [&](const GridWaveFunction& psi) {
        return std::sqrt((psi.amps - reference.amps).abs2().sum() * grid.spacing());
    };
    const double e1 = err(run(1000));
    const double e2 = err(run(2000));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.125));  // ratio 4 +/- 0.5
}

TEST_CASE("split operator: phase-wrap guard rejects coarse steps") {
    const GridSpec grid(-16.0, 16.0, 256);
    const auto v = make_harmonic_potential(1.0, 2.0, 0.0, {-16.0, 16.0});  // max V = 512
    CHECK_THROWS_AS(SplitOperator(grid, v, 0.01, 1.0, 1.0), ContractError);
}

TEST_CASE("free evolution: boosting shifts the mean by p0 t / m") {
    const GridSpec grid(-24.0, 24.0, 1024);
    const double p0 = 4.0, mass = 2.0, T = 1.5;
    auto psi = gaussian_packet(grid, -3.0, p0, 1.0, 1.0, mass);
    psi = evolve(psi, make_free_potential({-24.0, 24.0}), 1e-3, 1500);
    CHECK(std::abs(mean_position(psi) - (-3.0 + p0 * T / mass)) < 1e-6);
}

TEST_CASE("density: integral equals squared norm and ignores global phase") {
    const GridSpec grid(-8.0, 8.0, 256);
    const auto psi = gaussian_packet(grid, 0.5, 2.0, 0.8, 1.0, 1.0);
    const auto rho = density(psi);
    CHECK(std::abs(rho.integral() - 1.0) < 1e-10);

    GridWaveFunction rotated = psi;
    rotated.amps *= std::exp(Complex(0.0, 1.234));
    CHECK((density(rotated).values - rho.values).abs().maxCoeff() < 1e-14);

    // Gaussian density with the construction variance
    const auto [mu, var] = oracle::field_moments(rho);
    CHECK(mu == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(var == doctest::Approx(0.64).epsilon(1e-8));
}

TEST_CASE("spinor: zero field evolves components identically") {
    const GridSpec grid(-12.0, 12.0, 256);
    const auto beam = gaussian_packet(grid, 0.0, 1.0, 0.8, 1.0, 1.0);
    Eigen::VectorXcd amps(2);
    amps << Complex(0.6, 0.0), Complex(0.0, 0.8);
    const SpinState chi(kHalf, Direction::z(), amps);
    SpinorWaveFunction psi = make_product_state(beam, chi);

    const SpinPotential zero{Direction::z(),
                             [&](HalfInt) { return make_free_potential({-12.0, 12.0}); }};
    const Eigen::ArrayXd norms0 = component_norms2(psi);
    for (int i = 0; i < 200; ++i) psi = step_spinor(std::move(psi), nullptr, zero, 1e-3);

    CHECK(std::abs(total_norm(psi) - 1.0) < 1e-12);
    CHECK(((component_norms2(psi) - norms0).abs() < 1e-12).all());
    // components stay proportional: identical spatial evolution
    CHECK((psi.comps[1].amps * Complex(0.6, 0.0) - psi.comps[0].amps * Complex(0.0, 0.8))
              .abs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("spinor: opposite forces in a linear field, Ehrenfest rate") {
    const GridSpec grid(-32.0, 32.0, 1024);
    const double g = 0.5, hbar = 1.0, mass = 1.0;
    const auto beam = gaussian_packet(grid, 0.0, 0.0, 1.0, hbar, mass);
    const SpinState chi = SpinState::basis(kHalf, kHalf, Direction::x());
    SpinorWaveFunction psi = make_product_state(beam, chi);
    psi = rebase_spinor(psi, Direction::z());

    const SpinPotential hext{Direction::z(), [&](HalfInt sigma) {
                                 return make_linear_potential(-sigma.value() * g, {-32.0, 32.0});
                             }};
    SpinorEvolver ev(psi, nullptr, hext, 1e-3);

    const Eigen::ArrayXd f = component_norms2(psi);
    const auto split = [&]() {
        GridWaveFunction up = psi.comps[0], down = psi.comps[1];
        up.amps /= std::sqrt(f[0]);
        down.amps /= std::sqrt(f[1]);
        return mean_momentum(up) - mean_momentum(down);
    };

    for (int i = 0; i < 1000; ++i) ev.step(psi);
    const double split1 = split();  // t = 1
    for (int i = 0; i < 1000; ++i) ev.step(psi);
    const double split2 = split();  // t = 2

    // d<p>_sigma/dt = sigma g exactly for a linear potential
    CHECK(split1 == doctest::Approx(g * 1.0).epsilon(1e-6));
    CHECK(split2 == doctest::Approx(g * 2.0).epsilon(1e-6));
    CHECK(((component_norms2(psi) - f).abs() < 1e-10).all());
}

TEST_CASE("spinor: basis mismatch demands a rebase first") {
    const GridSpec grid(-12.0, 12.0, 256);
    const auto beam = gaussian_packet(grid, 0.0, 0.0, 1.0, 1.0, 1.0);
    SpinorWaveFunction psi =
        make_product_state(beam, SpinState::basis(kHalf, kHalf, Direction::z()));
    const SpinPotential hext{Direction::x(),
                             [&](HalfInt) { return make_free_potential({-12.0, 12.0}); }};
    CHECK_THROWS_AS(step_spinor(std::move(psi), nullptr, hext, 1e-3), ContractError);
}

TEST_CASE("rebase_spinor: identity, oracle norms, round trip") {
    const GridSpec grid(-12.0, 12.0, 256);
    const auto beam = gaussian_packet(grid, 0.0, 2.0, 0.9, 1.0, 1.0);

    for (const int jt : {1, 2, 3}) {
        const HalfInt j = half(jt);
        const HalfInt mu = half(jt);  // top projection
        const Direction m_axis(0.9, 0.4);
        const Direction n_axis(2.1, 5.0);
        const SpinorWaveFunction psi = make_product_state(beam, SpinState::basis(j, mu, m_axis));

        const SpinorWaveFunction same = rebase_spinor(psi, m_axis);
        for (int i = 0; i < spin_dim(j); ++i)
            CHECK((same.comps[i].amps - psi.comps[i].amps).abs().maxCoeff() < 1e-12);

        const SpinorWaveFunction rotated = rebase_spinor(psi, n_axis);
        CHECK(std::abs(total_norm(rotated) - 1.0) < 1e-12);
        const Eigen::ArrayXd norms = component_norms2(rotated);
        const auto sigmas = projections(j);
        for (int i = 0; i < spin_dim(j); ++i)
            CHECK(norms[i] ==
                  doctest::Approx(transition_probability(sigmas[i], n_axis, mu, m_axis, j))
                      .epsilon(1e-10));

        const SpinorWaveFunction back = rebase_spinor(rotated, m_axis);
        for (int i = 0; i < spin_dim(j); ++i)
            CHECK((back.comps[i].amps - psi.comps[i].amps).abs().maxCoeff() < 1e-10);
    }
}
