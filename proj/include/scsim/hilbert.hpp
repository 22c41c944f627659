#pragma once

#include <Eigen/Dense>
#include <complex>

#include "scsim/direction.hpp"
#include "scsim/halfint.hpp"

namespace scsim {

using Complex = std::complex<double>;

/// Wigner small-d matrix element d^j_{sp,s}(beta) for the active rotation
/// exp(-i beta Jy), computed by the explicit factorial sum
/// (Condon-Shortley phases).
double wigner_small_d(HalfInt j, HalfInt sigma_prime, HalfInt sigma, double beta);

/// Matrix whose column for projection mu holds chi_mu(n) expressed in the
/// z-quantized basis: entries U_{m',mu} = exp(-i m' phi) d^j_{m',mu}(theta).
/// This is the z-y-z Euler rotation (phi, theta, 0) and fixes every phase
/// convention in the project.
Eigen::MatrixXcd axis_frame(HalfInt j, const Direction& n);

/// Unitary basis change for spin amplitudes.
struct RotationMatrix {
    RotationMatrix(HalfInt j, Eigen::MatrixXcd entries);

    HalfInt j;
    Eigen::MatrixXcd entries;
};

/// Matrix M with new_amplitudes = M * old_amplitudes, re-expressing a state
/// quantized along `from` in the basis quantized along `to`. Composition is
/// exact: rotation_between(a,c) == rotation_between(b,c)*rotation_between(a,b).
RotationMatrix rotation_between(HalfInt j, const Direction& from, const Direction& to);

/// Normalized internal state of a spin-j system in a chosen quantization
/// axis; amplitude i belongs to projection sigma = j - i.
class SpinState {
  public:
    SpinState(HalfInt j, Direction axis, Eigen::VectorXcd amplitudes);

    /// chi_sigma(axis): the eigenstate of J.axis with eigenvalue sigma.
    static SpinState basis(HalfInt j, HalfInt sigma, const Direction& axis);

    HalfInt j() const { return j_; }
    const Direction& axis() const { return axis_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    Complex amplitude(HalfInt sigma) const { return amps_[projection_index(j_, sigma)]; }

  private:
    HalfInt j_;
    Direction axis_;
    Eigen::VectorXcd amps_;
};

/// Same state re-expressed along a new quantization axis.
SpinState rebase(const SpinState& state, const Direction& new_axis);

/// All overlap amplitudes c_sigma of `state` onto the basis quantized along
/// `target`, in storage order sigma = j ... -j.
Eigen::VectorXcd overlap_amplitudes(const SpinState& state, const Direction& target);

/// c_sigma: the component of `state` along chi_sigma(target).
Complex overlap_amplitude(const SpinState& state, const Direction& target, HalfInt sigma);

/// |(chi_rho(n), chi_sigma(k))|^2.
double transition_probability(HalfInt rho, const Direction& n, HalfInt sigma, const Direction& k,
                              HalfInt j);

}  // namespace scsim
