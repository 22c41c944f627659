#pragma once

// Test-side oracles, kept independent of the implementation paths they check.

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <complex>

#include "scsim/direction.hpp"
#include "scsim/grid.hpp"
#include "scsim/halfint.hpp"

namespace oracle {

using scsim::HalfInt;

/// Angular-momentum y generator in the (m = j ... -j) basis, hbar = 1.
inline Eigen::MatrixXcd spin_y(HalfInt j) {
    const int dim = scsim::spin_dim(j);
    const double jj = j.value();
    Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(dim, dim);
    // row index i corresponds to m = j - i; J+ |j m> = c |j m+1>
    for (int i = 1; i < dim; ++i) {
        const double m = jj - i;
        plus(i - 1, i) = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
    }
    const Eigen::MatrixXcd minus = plus.adjoint();
    return (plus - minus) / std::complex<double>(0.0, 2.0);
}

/// exp(-i beta Jy) by direct spectral decomposition of the generator.
inline Eigen::MatrixXcd rotate_y(HalfInt j, double beta) {
    const Eigen::MatrixXcd jy = spin_y(j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(jy);
    const Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXcd phase(lam.size());
    for (int i = 0; i < lam.size(); ++i)
        phase[i] = std::exp(std::complex<double>(0.0, -beta * lam[i]));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

/// Direction rotated by a 3x3 rotation.
inline scsim::Direction rotated(const scsim::Direction& d, const Eigen::Matrix3d& r) {
    return scsim::Direction::from_unit(r * d.unit());
}

inline Eigen::Matrix3d random_rotation(double a, double b, double c) {
    return (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(b, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(c, Eigen::Vector3d::UnitZ()))
        .toRotationMatrix();
}

/// 99th percentile of chi-squared with k dof (Wilson-Hilferty approximation,
/// adequate for the k >= 30 used in the sampling tests).
inline double chi2_critical_99(int k) {
    const double z = 2.3263478740408408;  // N(0,1) 99th percentile
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

/// Normal density field on a grid.
inline scsim::DensityField gaussian_density(const scsim::GridSpec& grid, double mean, double var) {
    const Eigen::ArrayXd q = grid.points();
    Eigen::ArrayXd v =
        (-(q - mean).square() / (2.0 * var)).exp() / std::sqrt(2.0 * M_PI * var);
    return scsim::DensityField(grid, std::move(v));
}

/// Mean and variance of a density field.
inline std::pair<double, double> field_moments(const scsim::DensityField& f) {
    const Eigen::ArrayXd q = f.grid.points();
    const double z = f.values.sum();
    const double mu = (f.values * q).sum() / z;
    const double var = (f.values * (q - mu).square()).sum() / z;
    return {mu, var};
}

}  // namespace oracle
