#include "scsim/sterngerlach.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "scsim/errors.hpp"
#include "scsim/numeric.hpp"
#include "scsim/rng.hpp"

namespace scsim {

namespace {
constexpr double kEmptyBranch = 1e-14;
constexpr double kRegionMassFloor = 1e-6;
}  // namespace

Apparatus::Apparatus(Direction ax, double lo, double hi, double ramp, double g)
    : axis(ax), region_lo(lo), region_hi(hi), ramp_width(ramp), gradient(g) {
    if (!(hi > lo)) throw std::invalid_argument("field region needs region_hi > region_lo");
    if (!(ramp > 0)) throw std::invalid_argument("ramp width must be positive");
    if (2 * ramp > hi - lo)
        throw std::invalid_argument("ramps do not fit inside the field region");
}

double Apparatus::envelope(double q) const {
    if (q <= region_lo || q >= region_hi) return 0.0;
    if (q < region_lo + ramp_width) {
        const double s = std::sin(0.5 * std::numbers::pi * (q - region_lo) / ramp_width);
        return s * s;
    }
    if (q > region_hi - ramp_width) {
        const double s = std::sin(0.5 * std::numbers::pi * (region_hi - q) / ramp_width);
        return s * s;
    }
    return 1.0;
}

double Apparatus::envelope_slope(double q) const {
    const double c = 0.5 * std::numbers::pi / ramp_width;
    if (q <= region_lo || q >= region_hi) return 0.0;
    if (q < region_lo + ramp_width)
        return c * std::sin(std::numbers::pi * (q - region_lo) / ramp_width);
    if (q > region_hi - ramp_width)
        return -c * std::sin(std::numbers::pi * (region_hi - q) / ramp_width);
    return 0.0;
}

double Apparatus::envelope_curvature(double q) const {
    const double c = 0.5 * std::numbers::pi * std::numbers::pi / (ramp_width * ramp_width);
    if (q <= region_lo || q >= region_hi) return 0.0;
    if (q < region_lo + ramp_width)
        return c * std::cos(std::numbers::pi * (q - region_lo) / ramp_width);
    if (q > region_hi - ramp_width)
        return c * std::cos(std::numbers::pi * (region_hi - q) / ramp_width);
    return 0.0;
}

PotentialField build_sg_potential(const Apparatus& app, HalfInt sigma, HalfInt j) {
    if (!valid_projection(j, sigma))
        throw std::domain_error("projection " + sigma.str() + " invalid for spin " + j.str());
    const double s = sigma.value();
    const double g = app.gradient;
    const Apparatus a = app;
    auto lift = [](auto fn) {
        return [fn](const Eigen::ArrayXd& q) {
            Eigen::ArrayXd out(q.size());
            for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = fn(q[i]);
            return out;
        };
    };
    return PotentialField(
        "sg(sigma=" + sigma.str() + ")",
        lift([a, s, g](double q) { return -s * g * a.envelope(q); }),
        lift([a, s, g](double q) { return -s * g * a.envelope_slope(q); }),
        lift([a, s, g](double q) { return -s * g * a.envelope_curvature(q); }),
        Interval{app.region_lo, app.region_hi});
}

SpinPotential spin_potential(const Apparatus& app, HalfInt j) {
    return SpinPotential{app.axis,
                         [app, j](HalfInt sigma) { return build_sg_potential(app, sigma, j); }};
}

// ---------------------------------------------------------------------------
// exact pipeline

namespace {

double pair_overlap(const GridWaveFunction& a, const GridWaveFunction& b, double fa, double fb) {
    const double raw = kahan_sum((a.amps.abs() * b.amps.abs()).eval()) * a.grid.spacing();
    return raw / std::sqrt(fa * fb);
}

double cross_term_residual(const std::vector<GridWaveFunction>& comps) {
    Eigen::ArrayXcd coherent = comps.front().amps;
    for (std::size_t i = 1; i < comps.size(); ++i) coherent += comps[i].amps;
    Eigen::ArrayXd incoherent = comps.front().amps.abs2();
    for (std::size_t i = 1; i < comps.size(); ++i) incoherent += comps[i].amps.abs2();
    return kahan_sum((coherent.abs2() - incoherent).abs().eval()) * comps.front().grid.spacing();
}

double region_mass(const std::vector<GridWaveFunction>& comps, const Apparatus& app) {
    const GridSpec& g = comps.front().grid;
    const Eigen::ArrayXd q = g.points();
    double m = 0.0;
    for (const auto& c : comps) {
        const Eigen::ArrayXd d = c.amps.abs2();
        for (Eigen::Index i = 0; i < q.size(); ++i)
            if (q[i] >= app.region_lo && q[i] <= app.region_hi) m += d[i];
    }
    return m * g.spacing();
}

}  // namespace

GridWaveFunction BranchSetExact::normalized_branch(int idx) const {
    if (fractions[idx] < kEmptyBranch)
        throw ContractError("empty branch sigma = " + sigmas[idx].str());
    GridWaveFunction psi = comps[idx];
    psi.amps /= std::sqrt(fractions[idx]);
    return psi;
}

DensityField BranchSetExact::branch_density(int idx) const {
    if (fractions[idx] < kEmptyBranch)
        throw ContractError("empty branch sigma = " + sigmas[idx].str());
    return DensityField(comps[idx].grid, comps[idx].amps.abs2() / fractions[idx]);
}

DensityField BranchSetExact::mixture_density() const {
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(comps.front().grid.count());
    for (const auto& c : comps) sum += c.amps.abs2();
    return DensityField(comps.front().grid, sum);
}

DensityField BranchSetExact::coherent_density() const {
    Eigen::ArrayXcd coherent = comps.front().amps;
    for (std::size_t i = 1; i < comps.size(); ++i) coherent += comps[i].amps;
    return DensityField(comps.front().grid, coherent.abs2());
}

BranchSetExact run_apparatus_exact(const GridWaveFunction& beam, const SpinState& chi,
                                   const Apparatus& app, const ApparatusRun& cfg) {
    const HalfInt j = chi.j();
    const int dim = spin_dim(j);
    const long long nsteps = std::llround(cfg.total_time / cfg.dt);
    if (nsteps < 1 || std::abs(nsteps * cfg.dt - cfg.total_time) > 1e-6 * cfg.total_time)
        throw std::invalid_argument("total_time must be an integer number of steps");

    BranchSetExact out;
    out.j = j;
    out.axis = app.axis;
    out.sigmas = projections(j);

    // incident product state expanded in the apparatus basis
    const Eigen::VectorXcd c = overlap_amplitudes(chi, app.axis);
    out.coeffs.assign(c.data(), c.data() + dim);
    out.comps.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        GridWaveFunction comp = beam;
        comp.amps *= c[i];
        out.comps.push_back(std::move(comp));
    }

    std::vector<SplitOperator> ops;
    ops.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        PotentialField v = build_sg_potential(app, out.sigmas[i], j);
        if (cfg.background) v = add_potentials(*cfg.background, v);
        ops.emplace_back(beam.grid, v, cfg.dt, beam.hbar, beam.mass);
    }

    Eigen::ArrayXd f0(dim);
    for (int i = 0; i < dim; ++i)
        f0[i] = kahan_sum(out.comps[i].amps.abs2()) * beam.grid.spacing();
    out.residual_initial = cross_term_residual(out.comps);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.separation_time = nan;
    out.entry_time = nan;
    out.exit_time = nan;

    auto monitor = [&](double t) {
        Eigen::ArrayXd f(dim);
        for (int i = 0; i < dim; ++i)
            f[i] = kahan_sum(out.comps[i].amps.abs2()) * beam.grid.spacing();
        out.max_fraction_drift = std::max(out.max_fraction_drift, (f - f0).abs().maxCoeff());

        double worst = 0.0;
        for (int a = 0; a < dim; ++a)
            for (int b = a + 1; b < dim; ++b) {
                if (f[a] < kEmptyBranch || f[b] < kEmptyBranch) continue;
                worst = std::max(worst, pair_overlap(out.comps[a], out.comps[b], f[a], f[b]));
            }
        const bool sep = worst < cfg.separation_overlap;
        if (sep && std::isnan(out.separation_time)) out.separation_time = t;
        const double inside = region_mass(out.comps, app);
        if (inside > kRegionMassFloor) {
            if (std::isnan(out.entry_time)) out.entry_time = t;
            out.exit_time = t;
        }
        out.separated = sep;
        out.max_pair_overlap = worst;
        out.fractions = f;
    };

    monitor(beam.t);
    long long done = 0;
    while (done < nsteps) {
        const long long seg = std::min<long long>(cfg.monitor_stride, nsteps - done);
        parallel_for_index(dim, cfg.threads,
                           [&](std::int64_t i) { ops[i].advance(out.comps[i], static_cast<int>(seg)); });
        done += seg;
        monitor(beam.t + done * cfg.dt);
    }

    out.residual_final = cross_term_residual(out.comps);
    out.final_time = beam.t + nsteps * cfg.dt;
    return out;
}

// ---------------------------------------------------------------------------
// semiclassical pipeline

DensityField BranchSetClassical::combined_density() const {
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(densities.front().grid.count());
    for (std::size_t i = 0; i < densities.size(); ++i) sum += fractions[i] * densities[i].values;
    return DensityField(densities.front().grid, sum);
}

BranchSetClassical run_apparatus_semiclassical(const TrajectoryEnsemble& beam,
                                               const SpinState& chi, const Apparatus& app,
                                               const ApparatusRun& cfg, const GridSpec& bin_grid) {
    const HalfInt j = chi.j();
    const int dim = spin_dim(j);

    BranchSetClassical out;
    out.j = j;
    out.axis = app.axis;
    out.sigmas = projections(j);
    out.fractions = overlap_amplitudes(chi, app.axis).array().abs2();

    const double t_final = beam.time() + cfg.total_time;
    const std::array<double, 1> record{t_final};
    out.ensembles.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        PotentialField v = build_sg_potential(app, out.sigmas[i], j);
        if (cfg.background) v = add_potentials(*cfg.background, v);
        out.ensembles.push_back(
            propagate_ensemble(beam, v, cfg.dt, cfg.total_time, record, cfg.threads));
    }

    out.densities.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        DensityField w = bin_density(out.ensembles[i], t_final, bin_grid);
        const double z = w.integral();
        if (z > 0) w.values /= z;
        out.densities.push_back(std::move(w));
    }

    double worst = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = a + 1; b < dim; ++b)
            worst = std::max(
                worst, kahan_sum((out.densities[a].values * out.densities[b].values).sqrt().eval()) *
                           bin_grid.spacing());
    out.max_pair_overlap = worst;
    out.separated = worst < cfg.separation_overlap;
    out.final_time = t_final;
    return out;
}

// ---------------------------------------------------------------------------
// filtering and cascades

FilteredBeam filter(const BranchSetExact& branches, HalfInt rho) {
    if (!branches.separated)
        throw ContractError("cannot filter before the branches are separated");
    const int idx = projection_index(branches.j, rho);
    if (branches.fractions[idx] < kEmptyBranch)
        throw ContractError("empty branch sigma = " + rho.str());
    return FilteredBeam{branches.normalized_branch(idx),
                        SpinState::basis(branches.j, rho, branches.axis),
                        1.0 - branches.fractions[idx]};
}

FilteredEnsemble filter(const BranchSetClassical& branches, HalfInt rho) {
    if (!branches.separated)
        throw ContractError("cannot filter before the branches are separated");
    const int idx = projection_index(branches.j, rho);
    if (branches.fractions[idx] < kEmptyBranch)
        throw ContractError("empty branch sigma = " + rho.str());
    return FilteredEnsemble{branches.ensembles[idx],
                            SpinState::basis(branches.j, rho, branches.axis),
                            1.0 - branches.fractions[idx]};
}

namespace {

void check_stage_filters(std::span<const CascadeStage> stages) {
    if (stages.empty()) throw std::invalid_argument("cascade needs at least one stage");
    for (std::size_t i = 0; i + 1 < stages.size(); ++i)
        if (!stages[i].keep)
            throw ContractError("intermediate cascade stages must specify a kept branch");
}

}  // namespace

CascadeResult cascade_analytic(const SpinState& chi, std::span<const CascadeStage> stages) {
    check_stage_filters(stages);
    CascadeResult out;
    SpinState state = chi;
    for (const auto& stage : stages) {
        const Apparatus& app = stage.apparatus;
        const Eigen::ArrayXd f = overlap_amplitudes(state, app.axis).array().abs2();
        StageReport rep;
        rep.axis = app.axis;
        rep.region_lo = app.region_lo;
        rep.region_hi = app.region_hi;
        rep.ramp_width = app.ramp_width;
        rep.gradient = app.gradient;
        rep.fractions.assign(f.data(), f.data() + f.size());
        rep.kept = stage.keep;
        if (stage.keep) {
            const int idx = projection_index(state.j(), *stage.keep);
            if (f[idx] < kEmptyBranch)
                throw ContractError("empty branch sigma = " + stage.keep->str());
            rep.kept_fraction = f[idx];
            out.kept_path_probability *= f[idx];
            state = SpinState::basis(state.j(), *stage.keep, app.axis);
        } else {
            out.final_fractions = rep.fractions;
        }
        out.stages.push_back(std::move(rep));
    }
    out.final_sigmas = projections(chi.j());
    if (out.final_fractions.empty()) out.final_fractions = out.stages.back().fractions;
    return out;
}

namespace {

/// Exact re-centring between cascade stages: circular shift by a whole
/// number of cells (unitary on the periodic grid).
GridWaveFunction recenter(GridWaveFunction psi, double target_q0) {
    const double mean = mean_position(psi);
    const int n = psi.grid.count();
    const long long shift = std::llround((target_q0 - mean) / psi.grid.spacing());
    if (shift == 0) return psi;
    Eigen::ArrayXcd shifted(n);
    for (int i = 0; i < n; ++i) {
        long long src = (i - shift) % n;
        if (src < 0) src += n;
        shifted[i] = psi.amps[src];
    }
    psi.amps = std::move(shifted);
    return psi;
}

}  // namespace

CascadeResult cascade_exact(const GridWaveFunction& beam, const SpinState& chi,
                            std::span<const CascadeStage> stages, const ApparatusRun& cfg) {
    check_stage_filters(stages);
    CascadeResult out;
    GridWaveFunction psi = beam;
    SpinState state = chi;
    const double launch_q0 = mean_position(beam);

    for (const auto& stage : stages) {
        const BranchSetExact run = run_apparatus_exact(psi, state, stage.apparatus, cfg);
        StageReport rep;
        rep.axis = stage.apparatus.axis;
        rep.region_lo = stage.apparatus.region_lo;
        rep.region_hi = stage.apparatus.region_hi;
        rep.ramp_width = stage.apparatus.ramp_width;
        rep.gradient = stage.apparatus.gradient;
        rep.fractions.assign(run.fractions.data(), run.fractions.data() + run.fractions.size());
        rep.kept = stage.keep;
        rep.separated = run.separated;
        rep.separation_time = run.separation_time;
        rep.entry_time = run.entry_time;
        rep.exit_time = run.exit_time;
        rep.interference_residual = run.residual_final;
        rep.max_fraction_drift = run.max_fraction_drift;
        if (stage.keep) {
            FilteredBeam kept = filter(run, *stage.keep);
            rep.kept_fraction = 1.0 - kept.discarded;
            out.kept_path_probability *= rep.kept_fraction;
            psi = recenter(std::move(kept.psi), launch_q0);
            psi.t = 0.0;  // each stage runs on its own clock
            state = kept.chi;
        } else {
            out.final_fractions = rep.fractions;
        }
        out.stages.push_back(std::move(rep));
    }
    out.final_sigmas = projections(chi.j());
    if (out.final_fractions.empty()) out.final_fractions = out.stages.back().fractions;
    return out;
}

// ---------------------------------------------------------------------------
// specimen sampling

struct SpecimenSampler {
    static SpecimenRecord make(std::int64_t id, std::vector<HalfInt> outcomes, bool kept) {
        return SpecimenRecord(id, std::move(outcomes), kept);
    }
};

namespace {

SpecimenTable sample_table(std::span<const std::vector<double>> stage_fractions,
                           std::span<const std::optional<HalfInt>> keeps, HalfInt j,
                           std::int64_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("specimen count must be positive");
    const auto sigmas = projections(j);
    const int dim = spin_dim(j);

    SpecimenTable table;
    table.sigmas = sigmas;
    table.seed = seed;
    table.records.reserve(count);

    std::vector<std::int64_t> final_counts(dim, 0);
    std::int64_t survivors = 0;
    Rng rng(seed);

    for (std::int64_t id = 0; id < count; ++id) {
        std::vector<HalfInt> outcomes;
        outcomes.reserve(stage_fractions.size());
        bool kept = true;
        for (std::size_t s = 0; s < stage_fractions.size() && kept; ++s) {
            const int k = rng.categorical(stage_fractions[s]);
            outcomes.push_back(sigmas[k]);
            if (keeps[s] && sigmas[k] != *keeps[s]) kept = false;
        }
        if (kept) {
            ++survivors;
            ++final_counts[projection_index(j, outcomes.back())];
        }
        table.records.push_back(SpecimenSampler::make(id, std::move(outcomes), kept));
    }

    table.survival_fraction = static_cast<double>(survivors) / static_cast<double>(count);
    table.expected_fractions = stage_fractions.back();
    table.empirical_fractions.resize(dim, 0.0);
    if (survivors > 0)
        for (int i = 0; i < dim; ++i)
            table.empirical_fractions[i] = static_cast<double>(final_counts[i]) / survivors;

    for (int i = 0; i < dim; ++i) {
        const double f = table.expected_fractions[i];
        const double band = 4.0 * std::sqrt(f * (1.0 - f) / std::max<std::int64_t>(survivors, 1));
        if (std::abs(table.empirical_fractions[i] - f) > band) table.binomial_ok = false;
    }
    return table;
}

}  // namespace

SpecimenTable sample_specimens(const BranchSetExact& branches, std::int64_t count,
                               std::uint64_t seed) {
    if (!branches.separated)
        throw ContractError(
            "branch labels cannot be assigned before separation: the separation flag is false");
    const std::vector<std::vector<double>> fracs{std::vector<double>(
        branches.fractions.data(), branches.fractions.data() + branches.fractions.size())};
    const std::vector<std::optional<HalfInt>> keeps{std::nullopt};
    return sample_table(fracs, keeps, branches.j, count, seed);
}

SpecimenTable cascade_sampled(const SpinState& chi, std::span<const CascadeStage> stages,
                              std::int64_t count, std::uint64_t seed) {
    check_stage_filters(stages);
    std::vector<std::vector<double>> fracs;
    std::vector<std::optional<HalfInt>> keeps;
    SpinState state = chi;
    for (const auto& stage : stages) {
        const Eigen::ArrayXd f = overlap_amplitudes(state, stage.apparatus.axis).array().abs2();
        fracs.emplace_back(f.data(), f.data() + f.size());
        keeps.push_back(stage.keep);
        if (stage.keep) state = SpinState::basis(state.j(), *stage.keep, stage.apparatus.axis);
    }
    return sample_table(fracs, keeps, chi.j(), count, seed);
}

}  // namespace scsim
