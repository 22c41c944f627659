#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scsim {

/// Unit vector on the sphere stored as polar/azimuth angles, so the implied
/// 3-vector is unit-norm by construction.
class Direction {
  public:
    Direction() : theta_(0.0), phi_(0.0) {}  // +z

    Direction(double theta, double phi) : theta_(theta), phi_(wrap_azimuth(phi)) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi))
            throw std::domain_error("polar angle must lie in [0, pi]");
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }

    Eigen::Vector3d unit() const {
        const double st = std::sin(theta_);
        return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
    }

    static Direction x() { return {std::numbers::pi / 2, 0.0}; }
    static Direction y() { return {std::numbers::pi / 2, std::numbers::pi / 2}; }
    static Direction z() { return {0.0, 0.0}; }

    static Direction from_unit(const Eigen::Vector3d& v) {
        const double n = v.norm();
        if (n < 1e-14) throw std::domain_error("cannot orient along the zero vector");
        const Eigen::Vector3d u = v / n;
        return {std::atan2(std::hypot(u.x(), u.y()), u.z()), std::atan2(u.y(), u.x())};
    }

    /// Direction in the x-z plane at signed angle `alpha` from +z.
    /// Negative angles fold over to phi = pi.
    static Direction polar(double alpha) {
        double a = std::fmod(alpha, 2 * std::numbers::pi);
        if (a < 0) a += 2 * std::numbers::pi;
        if (a <= std::numbers::pi) return {a, 0.0};
        return {2 * std::numbers::pi - a, std::numbers::pi};
    }

  private:
    static double wrap_azimuth(double phi) {
        double p = std::fmod(phi, 2 * std::numbers::pi);
        if (p < 0) p += 2 * std::numbers::pi;
        // fmod can land exactly on the period
        if (p >= 2 * std::numbers::pi) p = 0.0;
        return p;
    }

    double theta_;
    double phi_;
};

inline double angle_between(const Direction& a, const Direction& b) {
    const double c = a.unit().dot(b.unit());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

inline bool same_direction(const Direction& a, const Direction& b, double tol = 1e-12) {
    return a.unit().dot(b.unit()) > 1.0 - tol;
}

}  // namespace scsim
