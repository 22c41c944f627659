#include "scsim/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace scsim {

namespace {

constexpr int kMaxTwoJ = 60;

// ln(n!) table, filled once
const std::vector<double>& lfact_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(2 * kMaxTwoJ + 2, 0.0);
        long double acc = 0.0L;
        for (std::size_t n = 1; n < t.size(); ++n) {
            acc += std::log(static_cast<long double>(n));
            t[n] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

double lfact(int n) { return lfact_table()[static_cast<std::size_t>(n)]; }

void check_projection(HalfInt j, HalfInt sigma, const char* role) {
    require_spin(j);
    if (j.twice() > kMaxTwoJ)
        throw std::domain_error("spin too large (j <= 30 supported)");
    if (!valid_projection(j, sigma))
        throw std::domain_error(std::string(role) + " = " + sigma.str() +
                                " is not a valid projection for j = " + j.str());
}

}  // namespace

double wigner_small_d(HalfInt j, HalfInt sigma_prime, HalfInt sigma, double beta) {
    check_projection(j, sigma_prime, "sigma'");
    check_projection(j, sigma, "sigma");

    // integer bookkeeping: all of these are whole numbers
    const int jpm = (j.twice() + sigma.twice()) / 2;         // j + m
    const int jmm = (j.twice() - sigma.twice()) / 2;         // j - m
    const int jpmp = (j.twice() + sigma_prime.twice()) / 2;  // j + m'
    const int jmmp = (j.twice() - sigma_prime.twice()) / 2;  // j - m'
    const int mpmm = (sigma_prime.twice() - sigma.twice()) / 2;  // m' - m

    const double c = std::cos(0.5 * beta);
    const double s = std::sin(0.5 * beta);
    const double logpref = 0.5 * (lfact(jpmp) + lfact(jmmp) + lfact(jpm) + lfact(jmm));

    const int smin = std::max(0, -mpmm);
    const int smax = std::min(jpm, jmmp);
    double sum = 0.0;
    for (int k = smin; k <= smax; ++k) {
        const int ec = j.twice() - mpmm - 2 * k;  // exponent of cos(beta/2): 2j + m - m' - 2k
        const int es = mpmm + 2 * k;              // exponent of sin(beta/2): m' - m + 2k
        const double logden = lfact(jpm - k) + lfact(k) + lfact(mpmm + k) + lfact(jmmp - k);
        const double mag = std::exp(logpref - logden) * std::pow(c, ec) * std::pow(s, es);
        sum += ((mpmm + k) % 2 == 0) ? mag : -mag;
    }
    return sum;
}

Eigen::MatrixXcd axis_frame(HalfInt j, const Direction& n) {
    require_spin(j);
    const int dim = spin_dim(j);
    Eigen::MatrixXcd u(dim, dim);
    const auto ms = projections(j);
    for (int r = 0; r < dim; ++r) {
        const Complex zphase = std::exp(Complex(0.0, -ms[r].value() * n.phi()));
        for (int col = 0; col < dim; ++col)
            u(r, col) = zphase * wigner_small_d(j, ms[r], ms[col], n.theta());
    }
    return u;
}

RotationMatrix::RotationMatrix(HalfInt jj, Eigen::MatrixXcd m) : j(jj), entries(std::move(m)) {
    const int dim = spin_dim(j);
    if (entries.rows() != dim || entries.cols() != dim)
        throw std::invalid_argument("rotation matrix dimension mismatch for j = " + j.str());
    const double dev =
        (entries.adjoint() * entries - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (dev > 1e-12)
        throw std::invalid_argument("rotation matrix is not unitary (deviation " +
                                    std::to_string(dev) + ")");
}

RotationMatrix rotation_between(HalfInt j, const Direction& from, const Direction& to) {
    return RotationMatrix(j, axis_frame(j, to).adjoint() * axis_frame(j, from));
}

SpinState::SpinState(HalfInt j, Direction axis, Eigen::VectorXcd amplitudes)
    : j_(j), axis_(axis), amps_(std::move(amplitudes)) {
    require_spin(j_);
    if (amps_.size() != spin_dim(j_))
        throw std::invalid_argument("amplitude vector length must be 2j+1");
    const double n2 = amps_.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-12)
        throw std::invalid_argument("spin state norm deviates from 1 by more than 1e-12");
}

SpinState SpinState::basis(HalfInt j, HalfInt sigma, const Direction& axis) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(spin_dim(j));
    a[projection_index(j, sigma)] = 1.0;
    return SpinState(j, axis, std::move(a));
}

SpinState rebase(const SpinState& state, const Direction& new_axis) {
    const auto rot = rotation_between(state.j(), state.axis(), new_axis);
    Eigen::VectorXcd a = rot.entries * state.amplitudes();
    a /= a.norm();  // scrub accumulated round-off
    return SpinState(state.j(), new_axis, std::move(a));
}

Eigen::VectorXcd overlap_amplitudes(const SpinState& state, const Direction& target) {
    return rotation_between(state.j(), state.axis(), target).entries * state.amplitudes();
}

Complex overlap_amplitude(const SpinState& state, const Direction& target, HalfInt sigma) {
    check_projection(state.j(), sigma, "sigma");
    return overlap_amplitudes(state, target)[projection_index(state.j(), sigma)];
}

double transition_probability(HalfInt rho, const Direction& n, HalfInt sigma, const Direction& k,
                              HalfInt j) {
    check_projection(j, rho, "rho");
    check_projection(j, sigma, "sigma");
    // (chi_rho(n), chi_sigma(k)) is entry (rho, sigma) of the k -> n basis change
    const auto rot = rotation_between(j, k, n);
    return std::norm(rot.entries(projection_index(j, rho), projection_index(j, sigma)));
}

}  // namespace scsim
