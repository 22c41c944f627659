#include "scsim/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace scsim {

namespace {

Eigen::ArrayXd probe_points(const Interval& w) {
    // fixed probe comb, deterministic without a seed
    const int n = 17;
    Eigen::ArrayXd q(n);
    for (int i = 0; i < n; ++i) q[i] = w.lo + w.width() * (i + 0.5) / n;
    return q;
}

}  // namespace

PotentialField::PotentialField(std::string name, Map value, Map gradient,
                               std::optional<Map> curvature, Interval window,
                               std::optional<Interval> domain)
    : name_(std::move(name)),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      curvature_(std::move(curvature)),
      window_(window),
      domain_(domain),
      fd_step_(1e-5 * window.width()) {
    if (!(window.width() > 0)) throw std::invalid_argument("potential window must have positive width");
    // gradient self-test against central differences of the value rule
    const Eigen::ArrayXd q = probe_points(window_);
    const double h = fd_step_;
    const Eigen::ArrayXd fd = (value_(q + h) - value_(q - h)) / (2.0 * h);
    const Eigen::ArrayXd an = gradient_(q);
    const double scale = std::max(1.0, an.abs().maxCoeff());
    const double err = (fd - an).abs().maxCoeff();
    if (err > 1e-6 * scale)
        throw std::invalid_argument("potential '" + name_ +
                                    "': gradient rule disagrees with finite differences of the value rule");
}

Eigen::ArrayXd PotentialField::curvature(const Eigen::ArrayXd& q) const {
    if (curvature_) return (*curvature_)(q);
    const double h = fd_step_;
    return (gradient_(q + h) - gradient_(q - h)) / (2.0 * h);
}

double PotentialField::value(double q) const {
    Eigen::ArrayXd x(1);
    x[0] = q;
    return value_(x)[0];
}

double PotentialField::gradient(double q) const {
    Eigen::ArrayXd x(1);
    x[0] = q;
    return gradient_(x)[0];
}

double PotentialField::curvature(double q) const {
    Eigen::ArrayXd x(1);
    x[0] = q;
    return curvature(x)[0];
}

PotentialField make_free_potential(Interval window) {
    return PotentialField(
        "free", [](const Eigen::ArrayXd& q) { return Eigen::ArrayXd::Zero(q.size()).eval(); },
        [](const Eigen::ArrayXd& q) { return Eigen::ArrayXd::Zero(q.size()).eval(); },
        [](const Eigen::ArrayXd& q) { return Eigen::ArrayXd::Zero(q.size()).eval(); }, window);
}

PotentialField make_harmonic_potential(double mass, double omega, double center, Interval window) {
    const double k = mass * omega * omega;
    return PotentialField(
        "harmonic",
        [k, center](const Eigen::ArrayXd& q) { return (0.5 * k * (q - center).square()).eval(); },
        [k, center](const Eigen::ArrayXd& q) { return (k * (q - center)).eval(); },
        [k](const Eigen::ArrayXd& q) { return Eigen::ArrayXd::Constant(q.size(), k).eval(); },
        window);
}

PotentialField make_quartic_perturbed_potential(double mass, double omega, double lambda,
                                                Interval window) {
    const double k = mass * omega * omega;
    return PotentialField(
        "quartic-perturbed",
        [k, lambda](const Eigen::ArrayXd& q) {
            return (0.5 * k * q.square() + lambda * q.square().square()).eval();
        },
        [k, lambda](const Eigen::ArrayXd& q) { return (k * q + 4.0 * lambda * q.cube()).eval(); },
        [k, lambda](const Eigen::ArrayXd& q) { return (k + 12.0 * lambda * q.square()).eval(); },
        window);
}

PotentialField make_linear_potential(double slope, Interval window) {
    return PotentialField(
        "linear", [slope](const Eigen::ArrayXd& q) { return (slope * q).eval(); },
        [slope](const Eigen::ArrayXd& q) { return Eigen::ArrayXd::Constant(q.size(), slope).eval(); },
        [](const Eigen::ArrayXd& q) { return Eigen::ArrayXd::Zero(q.size()).eval(); }, window);
}

PotentialField add_potentials(const PotentialField& a, const PotentialField& b) {
    std::optional<PotentialField::Map> curv;
    if (a.has_analytic_curvature() && b.has_analytic_curvature())
        curv = [a, b](const Eigen::ArrayXd& q) { return (a.curvature(q) + b.curvature(q)).eval(); };
    std::optional<Interval> dom;
    if (a.domain()) dom = a.domain();
    if (b.domain()) dom = b.domain();
    // self-test window: keep a's (both rules were already individually tested)
    Interval window{-1.0, 1.0};
    return PotentialField(
        a.name() + "+" + b.name(),
        [a, b](const Eigen::ArrayXd& q) { return (a.value(q) + b.value(q)).eval(); },
        [a, b](const Eigen::ArrayXd& q) { return (a.gradient(q) + b.gradient(q)).eval(); }, curv,
        window, dom);
}

}  // namespace scsim
