#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "scsim/grid.hpp"
#include "scsim/potential.hpp"
#include "scsim/quantum.hpp"

namespace scsim {

/// Single classical trajectory with its full time history.
struct Trajectory {
    Eigen::ArrayXd times;
    Eigen::ArrayXd positions;
    Eigen::ArrayXd momenta;
    double mass = 1.0;

    int steps() const { return static_cast<int>(times.size()) - 1; }
    double energy(const PotentialField& v, int i) const {
        return 0.5 * momenta[i] * momenta[i] / mass + v.value(positions[i]);
    }
};

/// Leapfrog (kick-drift-kick) integration of Hamilton's equations.
/// Negative dt integrates backwards; T is the unsigned duration.
/// Throws EscapeError if the trajectory leaves the potential's domain.
Trajectory integrate_trajectory(double q0, double p0, double mass, const PotentialField& v,
                                double dt, double T);

struct EnsembleSnapshot {
    double t;
    Eigen::ArrayXd positions;
    Eigen::ArrayXd momenta;
    Eigen::ArrayXd jacobians;
};

/// Weighted family of classical trajectories, propagated together with the
/// variational (monodromy) flow so each member carries the Jacobian
/// |dq(t)/dq(0)| of the trajectory family it samples.
class TrajectoryEnsemble {
  public:
    /// Positions sampled from |psi|^2 by inverse-CDF on the grid; momenta
    /// and momentum-field slope from the phase gradient of psi. Warns on
    /// stderr when psi fails the semiclassical validity criterion.
    static TrajectoryEnsemble from_wavefunction(const GridWaveFunction& psi, std::int64_t count,
                                                std::uint64_t seed);

    /// Independent Gaussian positions and momenta (no position-momentum
    /// correlation; the family Jacobian starts from dp/dq = 0).
    static TrajectoryEnsemble gaussian_cloud(double q0, double p0, double sigma_q, double sigma_p,
                                             double mass, std::int64_t count, std::uint64_t seed);

    static TrajectoryEnsemble single(double q0, double p0, double mass);

    std::int64_t size() const { return q_.size(); }
    double mass() const { return mass_; }
    double time() const { return t_; }

    const Eigen::ArrayXd& positions() const { return q_; }
    const Eigen::ArrayXd& momenta() const { return p_; }
    const Eigen::ArrayXd& weights() const { return w_; }
    /// |dq(t)/dq(0)| per member, including the initial momentum-field slope.
    Eigen::ArrayXd jacobians() const;
    /// det of the raw phase-space monodromy; 1 for symplectic flows.
    Eigen::ArrayXd monodromy_determinants() const;

    double weight_total() const { return kahan_sum(w_); }
    double live_weight() const;

    const std::vector<EnsembleSnapshot>& history() const { return history_; }
    const EnsembleSnapshot& snapshot_at(double t) const;

    std::int64_t escaped_count() const { return escaped_.count(); }
    const Eigen::Array<bool, Eigen::Dynamic, 1>& escaped() const { return escaped_; }
    const Eigen::ArrayXd& exit_times() const { return exit_time_; }
    std::int64_t caustic_count() const { return caustic_.count(); }

    double wkb_valid_fraction() const { return wkb_valid_fraction_; }

    friend TrajectoryEnsemble propagate_ensemble(TrajectoryEnsemble ens, const PotentialField& v,
                                                 double dt, double T,
                                                 std::span<const double> record_times,
                                                 int threads);

  private:
    TrajectoryEnsemble() = default;

    double mass_ = 1.0;
    double t_ = 0.0;
    Eigen::ArrayXd q_, p_, w_;
    Eigen::ArrayXd dpdq0_;
    Eigen::ArrayXd m11_, m12_, m21_, m22_;
    Eigen::Array<bool, Eigen::Dynamic, 1> escaped_;
    Eigen::ArrayXd exit_time_;
    Eigen::Array<bool, Eigen::Dynamic, 1> caustic_;
    std::vector<EnsembleSnapshot> history_;
    double wkb_valid_fraction_ = 1.0;

    void init_arrays(std::int64_t count);
    void record(double label);
    void check_weights() const;
};

/// All members integrated under v; weights unchanged, Jacobians updated by
/// the variational equations. Escapes are flagged per member, not fatal.
/// record_times (absolute, multiples of dt) select binnable snapshots.
TrajectoryEnsemble propagate_ensemble(TrajectoryEnsemble ens, const PotentialField& v, double dt,
                                      double T, std::span<const double> record_times = {},
                                      int threads = 1);

/// Cloud-in-cell histogram of the ensemble at a recorded time. Integral
/// equals the live (non-escaped) weight; throws CoverageError when support
/// falls outside the grid.
DensityField bin_density(const TrajectoryEnsemble& ens, double t, const GridSpec& grid);

}  // namespace scsim
