#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <stdexcept>

#include "scsim/numeric.hpp"

namespace scsim {

/// Uniform periodic grid over [lower, upper); point counts are powers of
/// two so spectral transforms stay exact and fast.
class GridSpec {
  public:
    GridSpec(double lower, double upper, int count)
        : lower_(lower), upper_(upper), count_(count) {
        if (!(upper > lower)) throw std::invalid_argument("grid needs upper > lower");
        if (count < 64 || !is_power_of_two(count))
            throw std::invalid_argument("grid point count must be a power of two >= 64");
    }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    int count() const { return count_; }
    double length() const { return upper_ - lower_; }
    double spacing() const { return length() / count_; }
    double point(int i) const { return lower_ + i * spacing(); }

    Eigen::ArrayXd points() const {
        return lower_ + spacing() * Eigen::ArrayXd::LinSpaced(count_, 0, count_ - 1);
    }

    /// FFT-ordered wavenumbers: 2*pi/L * {0, 1, ..., N/2-1, -N/2, ..., -1}.
    Eigen::ArrayXd wavenumbers() const {
        Eigen::ArrayXd k(count_);
        const double dk = 2.0 * std::numbers::pi / length();
        for (int i = 0; i < count_; ++i)
            k[i] = dk * (i < count_ / 2 ? i : i - count_);
        return k;
    }

    bool operator==(const GridSpec& o) const {
        return lower_ == o.lower_ && upper_ == o.upper_ && count_ == o.count_;
    }

  private:
    double lower_;
    double upper_;
    int count_;
};

/// Non-negative density sampled on grid points (each point represents the
/// cell of width spacing() centred on it).
struct DensityField {
    DensityField(GridSpec g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.count())
            throw std::invalid_argument("density value count does not match grid");
    }

    GridSpec grid;
    Eigen::ArrayXd values;

    double integral() const { return kahan_sum(values) * grid.spacing(); }
};

/// Integral-preserving restriction onto a grid coarser by `factor` (a power
/// of two). Each coarse cell is a window centred on its grid point, with
/// half-weight fine cells on the window boundary, so coarse and fine cells
/// stay aligned.
inline DensityField coarsen(const DensityField& fine, int factor) {
    if (factor == 1) return fine;
    if (factor < 1 || !is_power_of_two(factor))
        throw std::invalid_argument("coarsening factor must be a power of two");
    const int n = fine.grid.count() / factor;
    GridSpec grid(fine.grid.lower(), fine.grid.upper(), n);
    Eigen::ArrayXd values = Eigen::ArrayXd::Zero(n);
    const int hw = factor / 2;
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int off = -hw; off <= hw; ++off) {
            const int i = factor * k + off;
            if (i < 0 || i >= fine.grid.count()) continue;
            const double w = (off == -hw || off == hw) ? 0.5 : 1.0;
            acc += w * fine.values[i];
        }
        values[k] = acc / factor;
    }
    return DensityField(grid, std::move(values));
}

}  // namespace scsim
