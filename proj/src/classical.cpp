#include "scsim/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "scsim/correspondence.hpp"
#include "scsim/errors.hpp"
#include "scsim/rng.hpp"

namespace scsim {

namespace {

struct StepPlan {
    long long steps;
    double dt;  // signed, adjusted so steps * dt lands exactly on the duration
};

StepPlan plan_steps(double dt, double T) {
    if (dt == 0.0) throw std::invalid_argument("dt must be nonzero");
    if (!(T > 0)) throw std::invalid_argument("duration must be positive");
    const long long n = std::max<long long>(1, std::llround(T / std::abs(dt)));
    return {n, std::copysign(T / static_cast<double>(n), dt)};
}

}  // namespace

Trajectory integrate_trajectory(double q0, double p0, double mass, const PotentialField& v,
                                double dt, double T) {
    if (mass <= 0) throw std::invalid_argument("mass must be positive");
    const auto [n, dt_eff] = plan_steps(dt, T);
    dt = dt_eff;

    Trajectory tr;
    tr.mass = mass;
    tr.times.resize(n + 1);
    tr.positions.resize(n + 1);
    tr.momenta.resize(n + 1);

    double q = q0, p = p0;
    tr.times[0] = 0.0;
    tr.positions[0] = q;
    tr.momenta[0] = p;

    double f = v.gradient(q);
    for (long long i = 1; i <= n; ++i) {
        p -= 0.5 * dt * f;
        q += dt * p / mass;
        f = v.gradient(q);
        p -= 0.5 * dt * f;

        // elapsed time, so the record stays increasing for reversed runs too
        const double t = i * std::abs(dt);
        if (v.domain() && !v.domain()->contains(q))
            throw EscapeError("trajectory left the declared domain at t = " + fmt_double(t), t);
        tr.times[i] = t;
        tr.positions[i] = q;
        tr.momenta[i] = p;
    }
    return tr;
}

// ---------------------------------------------------------------------------
// ensemble

void TrajectoryEnsemble::init_arrays(std::int64_t count) {
    q_.resize(count);
    p_.resize(count);
    w_.resize(count);
    dpdq0_ = Eigen::ArrayXd::Zero(count);
    m11_ = Eigen::ArrayXd::Ones(count);
    m12_ = Eigen::ArrayXd::Zero(count);
    m21_ = Eigen::ArrayXd::Zero(count);
    m22_ = Eigen::ArrayXd::Ones(count);
    escaped_ = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(count, false);
    exit_time_ = Eigen::ArrayXd::Constant(count, std::numeric_limits<double>::quiet_NaN());
    caustic_ = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(count, false);
}

Eigen::ArrayXd TrajectoryEnsemble::jacobians() const {
    return (m11_ + m12_ * dpdq0_).abs();
}

Eigen::ArrayXd TrajectoryEnsemble::monodromy_determinants() const {
    return m11_ * m22_ - m12_ * m21_;
}

double TrajectoryEnsemble::live_weight() const {
    return kahan_sum(escaped_.select(Eigen::ArrayXd::Zero(w_.size()), w_));
}

void TrajectoryEnsemble::record(double label) {
    history_.push_back({label, q_, p_, jacobians()});
}

void TrajectoryEnsemble::check_weights() const {
    const double total = kahan_sum(w_);
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("ensemble weights must sum to 1 (got " + fmt_double(total) +
                                    ")");
}

const EnsembleSnapshot& TrajectoryEnsemble::snapshot_at(double t) const {
    const EnsembleSnapshot* best = nullptr;
    double best_err = std::numeric_limits<double>::infinity();
    for (const auto& s : history_) {
        const double err = std::abs(s.t - t);
        if (err < best_err) {
            best_err = err;
            best = &s;
        }
    }
    if (!best || best_err > 1e-9 * std::max(1.0, std::abs(t)))
        throw ContractError("no recorded snapshot at t = " + fmt_double(t) +
                            "; pass it in record_times when propagating");
    return *best;
}

TrajectoryEnsemble TrajectoryEnsemble::single(double q0, double p0, double mass) {
    TrajectoryEnsemble e;
    e.mass_ = mass;
    e.init_arrays(1);
    e.q_[0] = q0;
    e.p_[0] = p0;
    e.w_[0] = 1.0;
    e.check_weights();
    e.record(0.0);
    return e;
}

TrajectoryEnsemble TrajectoryEnsemble::gaussian_cloud(double q0, double p0, double sigma_q,
                                                      double sigma_p, double mass,
                                                      std::int64_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("member count must be positive");
    TrajectoryEnsemble e;
    e.mass_ = mass;
    e.init_arrays(count);
    Rng rng(seed);
    for (std::int64_t i = 0; i < count; ++i) {
        e.q_[i] = q0 + sigma_q * rng.normal();
        e.p_[i] = p0 + sigma_p * rng.normal();
    }
    e.w_.setConstant(1.0 / static_cast<double>(count));
    e.check_weights();
    e.record(0.0);
    return e;
}

TrajectoryEnsemble TrajectoryEnsemble::from_wavefunction(const GridWaveFunction& psi,
                                                         std::int64_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("member count must be positive");
    const Eigen::ArrayXd prob = psi.amps.abs2();
    const double total = kahan_sum(prob);
    if (!(total > 0)) throw std::domain_error("cannot sample from a zero-norm wavefunction");

    const auto dec = decompose_phase(psi);
    const auto validity = validity_field(psi);
    if (validity.valid_norm_fraction < 0.99)
        std::fprintf(stderr,
                     "warning: sampling a wavefunction that fails the semiclassical validity "
                     "criterion on %.1f%% of its support\n",
                     100.0 * (1.0 - validity.valid_norm_fraction));

    const Eigen::ArrayXd dS = support_derivative(dec, dec.action);
    const Eigen::ArrayXd d2S = support_second_derivative(dec, dec.action);

    // cumulative mass per cell (cell i is centred on grid point i)
    std::vector<double> cum(prob.size() + 1, 0.0);
    for (Eigen::Index i = 0; i < prob.size(); ++i) cum[i + 1] = cum[i] + prob[i];
    const double z = cum.back();

    TrajectoryEnsemble e;
    e.mass_ = psi.mass;
    e.init_arrays(count);
    e.wkb_valid_fraction_ = validity.valid_norm_fraction;

    const GridSpec& g = psi.grid;
    const double dq = g.spacing();
    const int lo = dec.support_begin, hi = dec.support_end;  // [lo, hi)
    Rng rng(seed);
    for (std::int64_t i = 0; i < count; ++i) {
        const double target = rng.uniform01() * z;
        const auto it = std::upper_bound(cum.begin() + 1, cum.end(), target);
        int cell = static_cast<int>(it - cum.begin()) - 1;
        cell = std::clamp(cell, 0, static_cast<int>(prob.size()) - 1);
        const double frac = prob[cell] > 0 ? (target - cum[cell]) / prob[cell] : 0.5;
        const double q = g.point(cell) + (frac - 0.5) * dq;
        e.q_[i] = q;

        // interpolate the phase-gradient momentum field at q
        double x = (q - g.lower()) / dq;
        x = std::clamp(x, static_cast<double>(lo), static_cast<double>(hi - 1));
        const int i0 = std::min(static_cast<int>(x), hi - 2);
        const double u = x - i0;
        e.p_[i] = (1.0 - u) * dS[i0] + u * dS[i0 + 1];
        e.dpdq0_[i] = (1.0 - u) * d2S[i0] + u * d2S[i0 + 1];
    }
    e.w_.setConstant(1.0 / static_cast<double>(count));
    e.check_weights();
    e.record(0.0);
    return e;
}

TrajectoryEnsemble propagate_ensemble(TrajectoryEnsemble ens, const PotentialField& v, double dt,
                                      double T, std::span<const double> record_times,
                                      int threads) {
    if (ens.size() == 0) throw std::invalid_argument("cannot propagate an empty ensemble");
    const auto [nsteps, dt_eff] = plan_steps(dt, T);
    dt = dt_eff;
    const double t0 = ens.t_;

    // map record times onto step indices
    std::vector<std::pair<long long, double>> marks;  // (step, label)
    for (double tr : record_times) {
        const double off = (tr - t0) / dt;
        const long long k = std::llround(off);
        if (k < 0 || k > nsteps ||
            std::abs(off - static_cast<double>(k)) > 1e-6 * std::max(1.0, std::abs(off)))
            throw ContractError("record time " + fmt_double(tr) +
                                " is not a step multiple inside the propagation window");
        marks.emplace_back(k, tr);
    }
    std::sort(marks.begin(), marks.end());

    const bool bounded = v.domain().has_value();
    const Interval dom = bounded ? *v.domain() : Interval{0, 0};
    if (ens.history_.empty()) ens.record(t0);

    auto run_segment = [&](long long from_step, long long to_step) {
        const long long seg = to_step - from_step;
        if (seg <= 0) return;
        parallel_for_chunks(ens.size(), threads, [&](std::int64_t b, std::int64_t eidx) {
            const std::int64_t n = eidx - b;
            auto q = ens.q_.segment(b, n);
            auto p = ens.p_.segment(b, n);
            auto m11 = ens.m11_.segment(b, n);
            auto m12 = ens.m12_.segment(b, n);
            auto m21 = ens.m21_.segment(b, n);
            auto m22 = ens.m22_.segment(b, n);

            Eigen::ArrayXd f = v.gradient(q);
            Eigen::ArrayXd c = v.curvature(q);
            for (long long s = 0; s < seg; ++s) {
                // kick
                p -= 0.5 * dt * f;
                m21 -= (0.5 * dt) * c * m11;
                m22 -= (0.5 * dt) * c * m12;
                // drift
                q += dt * p / ens.mass_;
                m11 += (dt / ens.mass_) * m21;
                m12 += (dt / ens.mass_) * m22;
                // kick at the new position
                f = v.gradient(q);
                c = v.curvature(q);
                p -= 0.5 * dt * f;
                m21 -= (0.5 * dt) * c * m11;
                m22 -= (0.5 * dt) * c * m12;

                if (bounded) {
                    const double t_now = t0 + (from_step + s + 1) * dt;
                    for (std::int64_t i = 0; i < n; ++i) {
                        if (!ens.escaped_[b + i] && !dom.contains(q[i])) {
                            ens.escaped_[b + i] = true;
                            ens.exit_time_[b + i] = t_now;
                        }
                    }
                }

                // caustic flag: family Jacobian collapsed or crossed zero
                for (std::int64_t i = 0; i < n; ++i) {
                    if (m11[i] + m12[i] * ens.dpdq0_[b + i] <= 1e-10)
                        ens.caustic_[b + i] = true;
                }
            }
        });
    };

    long long done = 0;
    for (const auto& [k, label] : marks) {
        run_segment(done, k);
        done = k;
        ens.t_ = t0 + done * dt;
        ens.record(label);
    }
    run_segment(done, nsteps);
    ens.t_ = t0 + nsteps * dt;
    if (marks.empty() || marks.back().first != nsteps) ens.record(ens.t_);
    return ens;
}

DensityField bin_density(const TrajectoryEnsemble& ens, double t, const GridSpec& grid) {
    const EnsembleSnapshot& snap = ens.snapshot_at(t);
    const double dq = grid.spacing();
    const int n = grid.count();
    Eigen::ArrayXd deposit = Eigen::ArrayXd::Zero(n);
    double missing = 0.0;

    for (Eigen::Index i = 0; i < snap.positions.size(); ++i) {
        // escape status as of the snapshot time, not the current time
        if (ens.escaped()[i] && ens.exit_times()[i] <= snap.t) continue;
        const double x = (snap.positions[i] - grid.lower()) / dq;
        if (x < 0.0 || x > static_cast<double>(n - 1)) {
            missing += ens.weights()[i];
            continue;
        }
        const int i0 = std::min(static_cast<int>(x), n - 2);
        const double frac = x - i0;
        deposit[i0] += ens.weights()[i] * (1.0 - frac);
        deposit[i0 + 1] += ens.weights()[i] * frac;
    }
    if (missing > 0.0)
        throw CoverageError("binning grid does not cover the ensemble: " + fmt_double(missing) +
                                " of the population falls outside",
                            missing);
    return DensityField(grid, deposit / dq);
}

}  // namespace scsim
