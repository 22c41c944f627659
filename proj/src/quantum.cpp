#include "scsim/quantum.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scsim/errors.hpp"
#include "scsim/numeric.hpp"

namespace scsim {

GridWaveFunction::GridWaveFunction(GridSpec g, double hb, double m, Eigen::ArrayXcd a, double time)
    : grid(g), hbar(hb), mass(m), t(time), amps(std::move(a)) {
    if (hbar <= 0) throw std::invalid_argument("hbar must be positive");
    if (mass <= 0) throw std::invalid_argument("mass must be positive");
    if (amps.size() != grid.count())
        throw std::invalid_argument("amplitude count does not match grid");
}

double norm(const GridWaveFunction& psi) {
    return std::sqrt(kahan_sum(psi.amps.abs2()) * psi.grid.spacing());
}

GridWaveFunction normalized(GridWaveFunction psi) {
    const double n = norm(psi);
    if (n <= 0) throw std::domain_error("cannot normalize a zero-norm wavefunction");
    psi.amps /= n;
    return psi;
}

DensityField density(const GridWaveFunction& psi) {
    return DensityField(psi.grid, psi.amps.abs2());
}

double mean_position(const GridWaveFunction& psi) {
    const Eigen::ArrayXd w = psi.amps.abs2();
    return kahan_sum((w * psi.grid.points()).eval()) / kahan_sum(w);
}

double position_variance(const GridWaveFunction& psi) {
    const Eigen::ArrayXd w = psi.amps.abs2();
    const double z = kahan_sum(w);
    const double mu = kahan_sum((w * psi.grid.points()).eval()) / z;
    return kahan_sum((w * (psi.grid.points() - mu).square()).eval()) / z;
}

double mean_momentum(const GridWaveFunction& psi) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd in = psi.amps.matrix();
    Eigen::VectorXcd out(in.size());
    fft.fwd(out, in);
    const Eigen::ArrayXd spec = out.array().abs2();
    const Eigen::ArrayXd k = psi.grid.wavenumbers();
    return psi.hbar * kahan_sum((k * spec).eval()) / kahan_sum(spec);
}

Complex inner_product(const GridWaveFunction& a, const GridWaveFunction& b) {
    if (!(a.grid == b.grid)) throw ContractError("inner product requires identical grids");
    return (a.amps.conjugate() * b.amps).sum() * a.grid.spacing();
}

GridWaveFunction gaussian_packet(const GridSpec& grid, double q0, double p0, double sigma_q,
                                 double hbar, double mass) {
    const double dq = grid.spacing();
    if (sigma_q < 4.0 * dq)
        throw std::invalid_argument("packet width " + fmt_double(sigma_q) +
                                    " under-resolved: needs sigma_q >= 4 dq = " +
                                    fmt_double(4.0 * dq));
    if (q0 - 5.0 * sigma_q < grid.lower() || q0 + 5.0 * sigma_q > grid.upper())
        throw std::invalid_argument("packet needs a 5 sigma margin inside the grid");

    const Eigen::ArrayXd q = grid.points();
    const Eigen::ArrayXd x = q - q0;
    const Eigen::ArrayXcd amps =
        (-x.square() / (4.0 * sigma_q * sigma_q)).cast<Complex>().exp() *
        (Complex(0.0, 1.0) * (p0 / hbar) * x.cast<Complex>()).exp();
    return normalized(GridWaveFunction(grid, hbar, mass, amps));
}

// ---------------------------------------------------------------------------
// split-operator propagation

struct SplitOperator::Impl {
    Eigen::VectorXcd half_kinetic;
    Eigen::VectorXcd potential_phase;
    Eigen::FFT<double> fft;
    Eigen::VectorXcd freq;
};

SplitOperator::SplitOperator(const GridSpec& grid, const PotentialField& potential, double dt,
                             double hbar, double mass)
    : impl_(new Impl), dt_(dt) {
    if (dt == 0) throw std::invalid_argument("dt must be nonzero");
    const Eigen::ArrayXd v = potential.value(grid.points());
    const double vmax = v.abs().maxCoeff();
    if (vmax * std::abs(dt) / hbar >= 0.5)
        throw ContractError("time step too coarse: max|V| dt / hbar = " +
                            fmt_double(vmax * std::abs(dt) / hbar) + " >= 0.5");
    const Eigen::ArrayXd k = grid.wavenumbers();
    impl_->half_kinetic =
        (Complex(0.0, -1.0) * (hbar * dt / (4.0 * mass)) * k.square().cast<Complex>())
            .exp()
            .matrix();
    impl_->potential_phase =
        (Complex(0.0, -1.0) * (dt / hbar) * v.cast<Complex>()).exp().matrix();
    impl_->freq.resize(grid.count());
}

SplitOperator::~SplitOperator() = default;
SplitOperator::SplitOperator(SplitOperator&&) noexcept = default;
SplitOperator& SplitOperator::operator=(SplitOperator&&) noexcept = default;

void SplitOperator::step(GridWaveFunction& psi) {
    Eigen::VectorXcd state = psi.amps.matrix();
    impl_->fft.fwd(impl_->freq, state);
    impl_->freq.array() *= impl_->half_kinetic.array();
    impl_->fft.inv(state, impl_->freq);
    state.array() *= impl_->potential_phase.array();
    impl_->fft.fwd(impl_->freq, state);
    impl_->freq.array() *= impl_->half_kinetic.array();
    impl_->fft.inv(state, impl_->freq);
    psi.amps = state.array();
    psi.t += dt_;
}

void SplitOperator::advance(GridWaveFunction& psi, int steps) {
    for (int i = 0; i < steps; ++i) step(psi);
}

GridWaveFunction step_split_operator(GridWaveFunction psi, const PotentialField& potential,
                                     double dt) {
    SplitOperator op(psi.grid, potential, dt, psi.hbar, psi.mass);
    op.step(psi);
    return psi;
}

GridWaveFunction evolve(GridWaveFunction psi, const PotentialField& potential, double dt,
                        int steps) {
    SplitOperator op(psi.grid, potential, dt, psi.hbar, psi.mass);
    op.advance(psi, steps);
    return psi;
}

// ---------------------------------------------------------------------------
// spinor wavefunctions

SpinorWaveFunction::SpinorWaveFunction(HalfInt jj, Direction ax, std::vector<GridWaveFunction> c)
    : j(jj), axis(ax), comps(std::move(c)) {
    require_spin(j);
    if (static_cast<int>(comps.size()) != spin_dim(j))
        throw std::invalid_argument("spinor needs 2j+1 components");
    for (const auto& comp : comps) {
        if (!(comp.grid == comps.front().grid) || comp.hbar != comps.front().hbar ||
            comp.mass != comps.front().mass || comp.t != comps.front().t)
            throw std::invalid_argument("spinor components must share grid, hbar, mass and time");
    }
}

SpinorWaveFunction make_product_state(const GridWaveFunction& psi, const SpinState& chi) {
    std::vector<GridWaveFunction> comps;
    comps.reserve(spin_dim(chi.j()));
    for (int i = 0; i < spin_dim(chi.j()); ++i) {
        GridWaveFunction c = psi;
        c.amps *= chi.amplitudes()[i];
        comps.push_back(std::move(c));
    }
    return SpinorWaveFunction(chi.j(), chi.axis(), std::move(comps));
}

double total_norm(const SpinorWaveFunction& psi) {
    double s = 0.0;
    for (const auto& c : psi.comps) s += kahan_sum(c.amps.abs2());
    return std::sqrt(s * psi.grid().spacing());
}

Eigen::ArrayXd component_norms2(const SpinorWaveFunction& psi) {
    Eigen::ArrayXd out(psi.comps.size());
    for (std::size_t i = 0; i < psi.comps.size(); ++i)
        out[i] = kahan_sum(psi.comps[i].amps.abs2()) * psi.grid().spacing();
    return out;
}

SpinorWaveFunction rebase_spinor(const SpinorWaveFunction& psi, const Direction& new_axis) {
    const auto rot = rotation_between(psi.j, psi.axis, new_axis);
    const int dim = spin_dim(psi.j);
    std::vector<GridWaveFunction> comps;
    comps.reserve(dim);
    for (int s = 0; s < dim; ++s) {
        GridWaveFunction c = psi.comps.front();
        c.amps = rot.entries(s, 0) * psi.comps[0].amps;
        for (int mu = 1; mu < dim; ++mu) c.amps += rot.entries(s, mu) * psi.comps[mu].amps;
        comps.push_back(std::move(c));
    }
    return SpinorWaveFunction(psi.j, new_axis, std::move(comps));
}

SpinorEvolver::SpinorEvolver(const SpinorWaveFunction& prototype, const PotentialField* background,
                             const SpinPotential& h_ext, double dt)
    : axis_(h_ext.axis) {
    if (!same_direction(prototype.axis, h_ext.axis))
        throw ContractError(
            "spin potential is diagonal along a different axis; call rebase_spinor first");
    ops_.reserve(prototype.comps.size());
    const auto sigmas = projections(prototype.j);
    for (std::size_t i = 0; i < prototype.comps.size(); ++i) {
        PotentialField v = h_ext.branch(sigmas[i]);
        if (background) v = add_potentials(*background, v);
        ops_.emplace_back(prototype.grid(), v, dt, prototype.comps.front().hbar,
                          prototype.comps.front().mass);
    }
}

void SpinorEvolver::step(SpinorWaveFunction& psi) {
    if (!same_direction(psi.axis, axis_))
        throw ContractError("spinor axis changed under the evolver");
    for (std::size_t i = 0; i < psi.comps.size(); ++i) ops_[i].step(psi.comps[i]);
}

SpinorWaveFunction step_spinor(SpinorWaveFunction psi, const PotentialField* background,
                               const SpinPotential& h_ext, double dt) {
    SpinorEvolver ev(psi, background, h_ext, dt);
    ev.step(psi);
    return psi;
}

}  // namespace scsim
