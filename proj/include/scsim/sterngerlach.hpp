#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scsim/classical.hpp"
#include "scsim/direction.hpp"
#include "scsim/halfint.hpp"
#include "scsim/hilbert.hpp"
#include "scsim/potential.hpp"
#include "scsim/quantum.hpp"

namespace scsim {

/// A bounded spin-dependent field region: orientation, interval, smooth
/// cosine-squared ramps of width `ramp_width` at both ends, and the coupling
/// strength per unit projection.
struct Apparatus {
    Apparatus(Direction axis, double region_lo, double region_hi, double ramp_width,
              double gradient);

    Direction axis;
    double region_lo;
    double region_hi;
    double ramp_width;
    double gradient;

    /// C^1 envelope: 0 outside the region, 1 on the plateau.
    double envelope(double q) const;
    double envelope_slope(double q) const;
    double envelope_curvature(double q) const;
};

/// Eigenvalue potential seen by the sigma branch: V_sigma = -sigma g env(q).
PotentialField build_sg_potential(const Apparatus& app, HalfInt sigma, HalfInt j);

/// The apparatus as a diagonal spin potential for spinor evolution.
SpinPotential spin_potential(const Apparatus& app, HalfInt j);

struct ApparatusRun {
    double dt = 1e-3;
    double total_time = 1.0;
    int monitor_stride = 4;    // steps between norm/overlap/residual samples
    double separation_overlap = 1e-4;
    const PotentialField* background = nullptr;
    int threads = 1;
};

/// Outcome of evolving one beam through one apparatus with the exact solver.
/// Component i carries c_sigma psi_sigma for sigma = j - i, so its squared
/// norm is the branch population fraction.
struct BranchSetExact {
    HalfInt j;
    Direction axis;
    std::vector<HalfInt> sigmas;
    std::vector<Complex> coeffs;             // incident overlap amplitudes c_sigma
    std::vector<GridWaveFunction> comps;     // evolved components, norm^2 = fraction
    Eigen::ArrayXd fractions;                // at final time
    double max_fraction_drift = 0.0;         // worst norm wander over the run
    bool separated = false;
    double separation_time = 0.0;            // first monitor time the flag held (NaN if never)
    double max_pair_overlap = 0.0;           // at final time
    double entry_time = 0.0;                 // beam support first/last overlaps the region
    double exit_time = 0.0;
    double residual_initial = 0.0;           // L1 cross-term residual at t = t0
    double residual_final = 0.0;
    double final_time = 0.0;

    /// Branch wavefunction psi_sigma normalized to 1; throws on an empty branch.
    GridWaveFunction normalized_branch(int idx) const;
    /// Normalized branch density w_sigma.
    DensityField branch_density(int idx) const;
    /// Incoherent mixture sum_sigma |c_sigma|^2 w_sigma.
    DensityField mixture_density() const;
    /// Coherent single-particle density |sum_sigma c_sigma psi_sigma|^2.
    DensityField coherent_density() const;
};

BranchSetExact run_apparatus_exact(const GridWaveFunction& beam, const SpinState& chi,
                                   const Apparatus& app, const ApparatusRun& cfg);

/// Semiclassical counterpart: fractions from the internal state, one
/// trajectory ensemble per branch.
struct BranchSetClassical {
    HalfInt j;
    Direction axis;
    std::vector<HalfInt> sigmas;
    Eigen::ArrayXd fractions;
    std::vector<TrajectoryEnsemble> ensembles;
    std::vector<DensityField> densities;  // each normalized to 1
    bool separated = false;
    double max_pair_overlap = 0.0;
    double final_time = 0.0;

    DensityField combined_density() const;  // sum fraction_sigma w_sigma
};

BranchSetClassical run_apparatus_semiclassical(const TrajectoryEnsemble& beam,
                                               const SpinState& chi, const Apparatus& app,
                                               const ApparatusRun& cfg, const GridSpec& bin_grid);

struct FilteredBeam {
    GridWaveFunction psi;  // renormalized kept branch
    SpinState chi;         // basis state rho along the apparatus axis
    double discarded;      // 1 - |c_rho|^2
};

struct FilteredEnsemble {
    TrajectoryEnsemble ens;
    SpinState chi;
    double discarded;
};

/// Keeps branch rho, discarding the rest. Refuses unseparated branch sets
/// and empty branches.
FilteredBeam filter(const BranchSetExact& branches, HalfInt rho);
FilteredEnsemble filter(const BranchSetClassical& branches, HalfInt rho);

struct CascadeStage {
    Apparatus apparatus;
    std::optional<HalfInt> keep;  // intermediate stages must filter
};

struct StageReport {
    Direction axis;
    double region_lo = 0.0;
    double region_hi = 0.0;
    double ramp_width = 0.0;
    double gradient = 0.0;
    std::vector<double> fractions;
    std::optional<HalfInt> kept;
    double kept_fraction = 1.0;
    bool separated = true;
    double separation_time = 0.0;
    double entry_time = 0.0;
    double exit_time = 0.0;
    double interference_residual = 0.0;
    double max_fraction_drift = 0.0;
};

struct CascadeResult {
    std::vector<StageReport> stages;
    std::vector<HalfInt> final_sigmas;
    std::vector<double> final_fractions;
    double kept_path_probability = 1.0;
};

/// Pure internal-state bookkeeping: stage fractions are overlap
/// probabilities, filtering collapses onto the kept basis state.
CascadeResult cascade_analytic(const SpinState& chi, std::span<const CascadeStage> stages);

/// Full wave propagation through every stage; the filtered packet is
/// re-centred onto the launch position between stages (an exact circular
/// shift by a whole number of cells).
CascadeResult cascade_exact(const GridWaveFunction& beam, const SpinState& chi,
                            std::span<const CascadeStage> stages, const ApparatusRun& cfg);

/// One specimen's outcome labels, assignable only at or after branch
/// separation (construction is restricted to the sampling routines).
class SpecimenRecord {
  public:
    std::int64_t id() const { return id_; }
    const std::vector<HalfInt>& outcomes() const { return outcomes_; }
    bool kept() const { return kept_; }

  private:
    SpecimenRecord(std::int64_t id, std::vector<HalfInt> outcomes, bool kept)
        : id_(id), outcomes_(std::move(outcomes)), kept_(kept) {}

    std::int64_t id_;
    std::vector<HalfInt> outcomes_;
    bool kept_;

    friend struct SpecimenSampler;
};

struct SpecimenTable {
    std::vector<SpecimenRecord> records;
    std::vector<HalfInt> sigmas;
    std::vector<double> empirical_fractions;  // final-stage distribution among survivors
    std::vector<double> expected_fractions;
    double survival_fraction = 1.0;
    bool binomial_ok = true;  // empirical within 4 binomial sigma of expected
    std::uint64_t seed = 0;
};

/// Assigns branch labels to `count` specimens with probabilities given by
/// the branch fractions. Requires the separated flag.
SpecimenTable sample_specimens(const BranchSetExact& branches, std::int64_t count,
                               std::uint64_t seed);

/// Specimen-level cascade: per stage, outcomes are drawn from the stage's
/// fraction table; filtered-out specimens stop at the filter.
SpecimenTable cascade_sampled(const SpinState& chi, std::span<const CascadeStage> stages,
                              std::int64_t count, std::uint64_t seed);

}  // namespace scsim
