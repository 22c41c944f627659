#include "scsim/correspondence.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "scsim/errors.hpp"
#include "scsim/rng.hpp"

namespace scsim {

PhaseDecomposition decompose_phase(const GridWaveFunction& psi) {
    const Eigen::ArrayXd mag = psi.amps.abs();
    const double peak = mag.maxCoeff();
    if (!(peak > 0)) throw std::domain_error("cannot decompose a zero wavefunction");
    const double floor = 1e-8 * peak;

    const int n = psi.grid.count();
    int anchor = 0;
    for (int i = 1; i < n; ++i)
        if (mag[i] > mag[anchor]) anchor = i;

    // support: the contiguous above-floor run containing the maximum
    int first = anchor, last = anchor;
    while (first > 0 && mag[first - 1] > floor) --first;
    while (last + 1 < n && mag[last + 1] > floor) ++last;

    // nodes through the bulk leave the connected support short of the norm
    const Eigen::ArrayXd prob = psi.amps.abs2();
    double inside = 0.0;
    for (int i = first; i <= last; ++i) inside += prob[i];
    if (inside < 0.99 * kahan_sum(prob)) {
        std::vector<double> nodes;
        int lo = first, hi = last;
        while (lo > 0 && !(mag[lo - 1] > floor)) nodes.push_back(psi.grid.point(--lo));
        while (hi + 1 < n && !(mag[hi + 1] > floor)) nodes.push_back(psi.grid.point(++hi));
        const std::size_t n_nodes = nodes.size();
        throw DecompositionError(
            "connected support holds " + fmt_double(100.0 * inside / kahan_sum(prob)) +
                "% of the norm (< 99%); " + std::to_string(n_nodes) +
                " node point(s) cut through the bulk",
            std::move(nodes));
    }

    PhaseDecomposition dec{psi.grid,
                           psi.hbar,
                           Eigen::ArrayXd::Zero(n),
                           Eigen::ArrayXd::Zero(n),
                           first,
                           last + 1,
                           floor};

    for (int i = first; i <= last; ++i) dec.log_amplitude[i] = std::log(mag[i]);

    // unwrap outward from the amplitude maximum; each increment is the
    // principal-branch phase difference of neighbouring samples

    dec.action[anchor] = psi.hbar * std::arg(psi.amps[anchor]);
    for (int i = anchor + 1; i <= last; ++i)
        dec.action[i] =
            dec.action[i - 1] + psi.hbar * std::arg(psi.amps[i] * std::conj(psi.amps[i - 1]));
    for (int i = anchor - 1; i >= first; --i)
        dec.action[i] =
            dec.action[i + 1] + psi.hbar * std::arg(psi.amps[i] * std::conj(psi.amps[i + 1]));
    return dec;
}

namespace {

// derivative stencils that degrade gracefully at the support edges
double d1(const Eigen::ArrayXd& f, int i, int lo, int hi, double h) {
    if (i - 2 >= lo && i + 2 < hi)
        return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    if (i - 1 >= lo && i + 1 < hi) return (f[i + 1] - f[i - 1]) / (2.0 * h);
    if (i + 2 < hi) return (-3.0 * f[i] + 4.0 * f[i + 1] - f[i + 2]) / (2.0 * h);
    if (i - 2 >= lo) return (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * h);
    if (i + 1 < hi) return (f[i + 1] - f[i]) / h;
    if (i - 1 >= lo) return (f[i] - f[i - 1]) / h;
    return 0.0;
}

double d2(const Eigen::ArrayXd& f, int i, int lo, int hi, double h) {
    const double h2 = h * h;
    if (i - 2 >= lo && i + 2 < hi)
        return (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) /
               (12.0 * h2);
    if (i - 1 >= lo && i + 1 < hi) return (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    if (i + 2 < hi) return (f[i] - 2.0 * f[i + 1] + f[i + 2]) / h2;
    if (i - 2 >= lo) return (f[i] - 2.0 * f[i - 1] + f[i - 2]) / h2;
    return 0.0;
}

}  // namespace

Eigen::ArrayXd support_derivative(const PhaseDecomposition& dec, const Eigen::ArrayXd& field) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(field.size());
    const double h = dec.grid.spacing();
    for (int i = dec.support_begin; i < dec.support_end; ++i)
        out[i] = d1(field, i, dec.support_begin, dec.support_end, h);
    return out;
}

Eigen::ArrayXd support_second_derivative(const PhaseDecomposition& dec,
                                         const Eigen::ArrayXd& field) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(field.size());
    const double h = dec.grid.spacing();
    for (int i = dec.support_begin; i < dec.support_end; ++i)
        out[i] = d2(field, i, dec.support_begin, dec.support_end, h);
    return out;
}

ValidityField validity_field(const GridWaveFunction& psi, double kappa) {
    const auto dec = decompose_phase(psi);
    const int n = psi.grid.count();
    const double hb = psi.hbar;

    const Eigen::ArrayXd sp = support_derivative(dec, dec.action);
    const Eigen::ArrayXd spp = support_second_derivative(dec, dec.action);
    const Eigen::ArrayXd up = support_derivative(dec, dec.log_amplitude);
    const Eigen::ArrayXd upp = support_second_derivative(dec, dec.log_amplitude);

    ValidityField out{psi.grid,
                      hb,
                      kappa,
                      Eigen::ArrayXd::Zero(n),
                      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false),
                      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false),
                      0.0};

    // curvature guard relative to the largest curvature present
    double curv_peak = 0.0;
    for (int i = dec.support_begin; i < dec.support_end; ++i)
        curv_peak = std::max(curv_peak, std::hypot(spp[i], hb * upp[i]));
    const double curv_floor = 1e-12 * curv_peak;

    const Eigen::ArrayXd prob = psi.amps.abs2();
    double norm_defined = 0.0, norm_valid = 0.0;
    for (int i = dec.support_begin; i < dec.support_end; ++i) {
        const double num = sp[i] * sp[i] + hb * hb * up[i] * up[i];
        const double den = std::hypot(spp[i], hb * upp[i]);
        out.defined[i] = true;
        out.ratio[i] = den > curv_floor ? num / den : std::numeric_limits<double>::infinity();
        out.mask[i] = num > kappa * hb * den;
        norm_defined += prob[i];
        if (out.mask[i]) norm_valid += prob[i];
    }
    out.valid_norm_fraction = norm_defined > 0 ? norm_valid / norm_defined : 0.0;
    return out;
}

double compare(const DensityField& a, const DensityField& b) {
    if (!(a.grid == b.grid)) throw ContractError("density comparison requires identical grids");
    return kahan_sum((a.values - b.values).abs().eval()) * a.grid.spacing();
}

SweepReport hbar_sweep(const SweepScenario& sc, std::span<const double> hbar_values,
                       std::vector<SweepDetailRow>* detail) {
    for (std::size_t i = 1; i < hbar_values.size(); ++i)
        if (!(hbar_values[i] < hbar_values[i - 1]))
            throw std::invalid_argument("hbar values must be strictly descending");

    std::vector<double> times = sc.sample_times;
    if (times.empty()) times = {sc.total_time};

    SweepReport report;
    const PotentialField v = sc.potential();
    const double vmax = v.value(sc.grid.points()).abs().maxCoeff();

    for (std::size_t row = 0; row < hbar_values.size(); ++row) {
        const double hb = hbar_values[row];
        const auto t_start = std::chrono::steady_clock::now();
        SweepRow r;
        r.hbar = hb;

        try {
            // the grid must resolve the local wavelength at this hbar
            if (std::abs(sc.p0) * sc.grid.spacing() / hb >= 0.5 * std::numbers::pi)
                throw std::invalid_argument("grid cannot resolve the phase at this hbar");
            GridWaveFunction psi = gaussian_packet(sc.grid, sc.q0, sc.p0, sc.sigma_q, hb, sc.mass);

            // exact-solver step: shrink until the phase-wrap guard clears
            double dt = sc.dt;
            while (vmax > 0 && vmax * dt / hb >= 0.45) dt *= 0.5;

            TrajectoryEnsemble ens = TrajectoryEnsemble::from_wavefunction(
                psi, sc.members, derive_seed(sc.seed, row));
            ens = propagate_ensemble(std::move(ens), v, sc.classical_dt, sc.total_time, times,
                                     sc.threads);

            const GridSpec compare_grid(sc.grid.lower(), sc.grid.upper(),
                                        sc.grid.count() / sc.compare_coarsen);
            double t_prev = 0.0;
            for (double ts : times) {
                const double span = ts - t_prev;
                if (span < 0) throw std::invalid_argument("sample times must be ascending");
                if (span > 0) {
                    const int steps = std::max<int>(1, static_cast<int>(std::ceil(span / dt)));
                    SplitOperator op(sc.grid, v, span / steps, hb, sc.mass);
                    op.advance(psi, steps);
                }
                t_prev = ts;
                const double l1 = compare(bin_density(ens, ts, compare_grid),
                                          coarsen(density(psi), sc.compare_coarsen));
                if (detail) detail->push_back({hb, ts, l1});
                r.l1 = l1;
            }
            r.validity_fraction = validity_field(psi).valid_norm_fraction;
        } catch (const std::invalid_argument&) {
            r.flagged = true;
            r.l1 = 0.0;
            r.validity_fraction = 0.0;
        }

        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        report.rows.push_back(r);
    }
    return report;
}

}  // namespace scsim
