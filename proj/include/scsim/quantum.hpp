#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "scsim/direction.hpp"
#include "scsim/grid.hpp"
#include "scsim/halfint.hpp"
#include "scsim/hilbert.hpp"
#include "scsim/potential.hpp"

namespace scsim {

/// Complex amplitudes on a uniform grid together with the physical scales
/// (hbar, mass) the dynamics needs. hbar is a per-wavefunction parameter so
/// the same scenario can be run across a range of hbar values.
struct GridWaveFunction {
    GridWaveFunction(GridSpec grid, double hbar, double mass, Eigen::ArrayXcd amplitudes,
                     double t = 0.0);

    GridSpec grid;
    double hbar;
    double mass;
    double t;
    Eigen::ArrayXcd amps;
};

double norm(const GridWaveFunction& psi);
GridWaveFunction normalized(GridWaveFunction psi);

/// Pointwise |psi|^2.
DensityField density(const GridWaveFunction& psi);

double mean_position(const GridWaveFunction& psi);
double position_variance(const GridWaveFunction& psi);
/// <p> evaluated in the spectral representation.
double mean_momentum(const GridWaveFunction& psi);

Complex inner_product(const GridWaveFunction& a, const GridWaveFunction& b);

/// Normalized Gaussian centred at q0 with plane-wave phase p0 (q - q0)/hbar.
/// Requires sigma_q >= 4 grid spacings and 5 sigma of margin to both edges.
GridWaveFunction gaussian_packet(const GridSpec& grid, double q0, double p0, double sigma_q,
                                 double hbar, double mass);

/// Strang-split propagator with cached spectral plans and phase tables for a
/// fixed (grid, potential, dt). Exactly norm-preserving per step.
class SplitOperator {
  public:
    SplitOperator(const GridSpec& grid, const PotentialField& potential, double dt, double hbar,
                  double mass);
    ~SplitOperator();
    SplitOperator(SplitOperator&&) noexcept;
    SplitOperator& operator=(SplitOperator&&) noexcept;

    void step(GridWaveFunction& psi);
    void advance(GridWaveFunction& psi, int steps);

    double dt() const { return dt_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double dt_;
};

/// Single second-order step exp(-i K dt/2) exp(-i V dt) exp(-i K dt/2).
/// Refuses steps with max|V| dt / hbar >= 0.5 (phase-wrap guard).
GridWaveFunction step_split_operator(GridWaveFunction psi, const PotentialField& potential,
                                     double dt);

GridWaveFunction evolve(GridWaveFunction psi, const PotentialField& potential, double dt,
                        int steps);

/// Spin-dependent potential, diagonal in the basis quantized along `axis`:
/// the sigma branch sees the eigenvalue potential branch(sigma).
struct SpinPotential {
    Direction axis;
    std::function<PotentialField(HalfInt)> branch;
};

/// 2j+1 spatial components sharing one grid; component i carries projection
/// sigma = j - i along the quantization axis.
struct SpinorWaveFunction {
    SpinorWaveFunction(HalfInt j, Direction axis, std::vector<GridWaveFunction> components);

    HalfInt j;
    Direction axis;
    std::vector<GridWaveFunction> comps;

    double t() const { return comps.front().t; }
    const GridSpec& grid() const { return comps.front().grid; }
};

/// Product state psi * chi: component sigma is chi_amplitude(sigma) * psi.
SpinorWaveFunction make_product_state(const GridWaveFunction& psi, const SpinState& chi);

double total_norm(const SpinorWaveFunction& psi);
/// Per-component squared norms, storage order sigma = j ... -j.
Eigen::ArrayXd component_norms2(const SpinorWaveFunction& psi);

/// Components re-expressed in the basis quantized along new_axis.
SpinorWaveFunction rebase_spinor(const SpinorWaveFunction& psi, const Direction& new_axis);

/// One split-operator step of every component under V0 + H_ext eigenvalue.
/// H_ext must be diagonal in the spinor's current basis; rebase first.
SpinorWaveFunction step_spinor(SpinorWaveFunction psi, const PotentialField* background,
                               const SpinPotential& h_ext, double dt);

/// Cached per-component evolvers for long runs.
class SpinorEvolver {
  public:
    SpinorEvolver(const SpinorWaveFunction& prototype, const PotentialField* background,
                  const SpinPotential& h_ext, double dt);

    void step(SpinorWaveFunction& psi);

  private:
    std::vector<SplitOperator> ops_;
    Direction axis_;
};

}  // namespace scsim
