#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "scsim/classical.hpp"
#include "scsim/grid.hpp"
#include "scsim/quantum.hpp"

namespace scsim {

/// Exponent decomposition psi = exp(i S / hbar + U): S is the unwrapped
/// action-valued phase, U the log-amplitude, both defined on the contiguous
/// supported index range where |psi| clears the amplitude floor.
struct PhaseDecomposition {
    GridSpec grid;
    double hbar;
    Eigen::ArrayXd action;         // S
    Eigen::ArrayXd log_amplitude;  // U
    int support_begin;             // inclusive
    int support_end;               // exclusive
    double amplitude_floor;

    bool supported(int i) const { return i >= support_begin && i < support_end; }
};

/// Unwraps the phase outward from the global amplitude maximum. Throws
/// DecompositionError when nodes split the support, listing their locations.
PhaseDecomposition decompose_phase(const GridWaveFunction& psi);

/// First/second derivative of a decomposition field by 4th-order central
/// differences, falling back to lower order at the support edges.
Eigen::ArrayXd support_derivative(const PhaseDecomposition& dec, const Eigen::ArrayXd& field);
Eigen::ArrayXd support_second_derivative(const PhaseDecomposition& dec,
                                         const Eigen::ArrayXd& field);

/// Pointwise semiclassical validity data: ratio |Theta'|^2 / |Theta''| with
/// Theta = S - i hbar U, and the mask ratio > kappa * hbar (evaluated
/// multiplicatively, so vanishing curvature counts as valid).
struct ValidityField {
    GridSpec grid;
    double hbar;
    double kappa;
    Eigen::ArrayXd ratio;                         // +inf where curvature underflows
    Eigen::Array<bool, Eigen::Dynamic, 1> mask;   // criterion holds
    Eigen::Array<bool, Eigen::Dynamic, 1> defined;  // inside the supported range
    /// Fraction of |psi|^2-weighted support where the mask holds.
    double valid_norm_fraction;
};

ValidityField validity_field(const GridWaveFunction& psi, double kappa = 10.0);

/// L1 distance between two densities on the same grid.
double compare(const DensityField& a, const DensityField& b);

struct SweepRow {
    double hbar = 0.0;
    double l1 = 0.0;
    double validity_fraction = 0.0;
    double wall_seconds = 0.0;
    bool flagged = false;  // scenario invalid at this hbar; other columns are zero
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

/// One classical-versus-exact comparison scenario, swept across hbar.
struct SweepScenario {
    explicit SweepScenario(GridSpec g) : grid(g) {}

    GridSpec grid;
    double mass = 1.0;
    double q0 = 0.0;
    double p0 = 0.0;
    double sigma_q = 1.0;
    std::function<PotentialField()> potential;
    double dt = 1e-3;          // exact-solver base step, shrunk per row to meet the phase guard
    double classical_dt = 1e-3;
    double total_time = 1.0;
    std::vector<double> sample_times;  // defaults to {total_time}
    std::int64_t members = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Densities are compared on a grid this many times coarser than the
    /// evolution grid (power of two): fine grids resolve the wavefunction,
    /// coarse cells keep the histogram noise down.
    int compare_coarsen = 1;
};

struct SweepDetailRow {
    double hbar;
    double time;
    double l1;
};

/// Builds, evolves and compares the scenario at every hbar (descending).
/// Rows whose packet cannot be built are flagged and skipped. The row L1 is
/// the value at the final sample time; per-time values land in `detail`.
SweepReport hbar_sweep(const SweepScenario& scenario, std::span<const double> hbar_values,
                       std::vector<SweepDetailRow>* detail = nullptr);

}  // namespace scsim
