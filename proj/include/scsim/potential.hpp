#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "scsim/numeric.hpp"

namespace scsim {

/// One-dimensional potential with an evaluation rule, a gradient rule and an
/// optional curvature rule (used by variational integration). Construction
/// self-tests the gradient against central differences of the value.
class PotentialField {
  public:
    using Map = std::function<Eigen::ArrayXd(const Eigen::ArrayXd&)>;

    /// `window` is where the self-test probes; `domain`, when set, declares
    /// the bounds trajectories may not leave.
    PotentialField(std::string name, Map value, Map gradient, std::optional<Map> curvature,
                   Interval window, std::optional<Interval> domain = std::nullopt);

    const std::string& name() const { return name_; }
    int dimension() const { return 1; }
    const std::optional<Interval>& domain() const { return domain_; }

    Eigen::ArrayXd value(const Eigen::ArrayXd& q) const { return value_(q); }
    Eigen::ArrayXd gradient(const Eigen::ArrayXd& q) const { return gradient_(q); }
    /// Analytic curvature when supplied, else central differences of the
    /// gradient with step 1e-5 * window width.
    Eigen::ArrayXd curvature(const Eigen::ArrayXd& q) const;

    double value(double q) const;
    double gradient(double q) const;
    double curvature(double q) const;

    bool has_analytic_curvature() const { return curvature_.has_value(); }

  private:
    std::string name_;
    Map value_;
    Map gradient_;
    std::optional<Map> curvature_;
    Interval window_;
    std::optional<Interval> domain_;
    double fd_step_;
};

PotentialField make_free_potential(Interval window = {-1.0, 1.0});
PotentialField make_harmonic_potential(double mass, double omega, double center, Interval window);
/// V = 1/2 m w^2 q^2 + lambda q^4
PotentialField make_quartic_perturbed_potential(double mass, double omega, double lambda,
                                                Interval window);
PotentialField make_linear_potential(double slope, Interval window);

PotentialField add_potentials(const PotentialField& a, const PotentialField& b);

}  // namespace scsim
