#pragma once

#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace scsim {

/// Exact half-integer quantum number, stored as twice its value so that
/// j = 1/2, 1, 3/2, ... never touch floating point.
class HalfInt {
  public:
    constexpr HalfInt() = default;
    constexpr HalfInt(int whole) : twice_(2 * whole) {}

    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
    friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    int twice_ = 0;
};

constexpr HalfInt half(int twice) { return HalfInt::from_twice(twice); }

constexpr int spin_dim(HalfInt j) { return j.twice() + 1; }

/// True when sigma is a legal projection for spin j: |sigma| <= j and
/// sigma differs from j by an integer.
constexpr bool valid_projection(HalfInt j, HalfInt sigma) {
    if (j.twice() < 0) return false;
    if (std::abs(sigma.twice()) > j.twice()) return false;
    return (j.twice() - sigma.twice()) % 2 == 0;
}

/// Projections in storage order: j, j-1, ..., -j.
inline std::vector<HalfInt> projections(HalfInt j) {
    std::vector<HalfInt> out;
    out.reserve(spin_dim(j));
    for (int t = j.twice(); t >= -j.twice(); t -= 2) out.push_back(half(t));
    return out;
}

/// Row/column index of sigma in the storage order above.
inline int projection_index(HalfInt j, HalfInt sigma) {
    if (!valid_projection(j, sigma))
        throw std::domain_error("projection " + sigma.str() + " invalid for spin " + j.str());
    return (j.twice() - sigma.twice()) / 2;
}

inline void require_spin(HalfInt j) {
    if (j.twice() < 0) throw std::domain_error("spin must be non-negative, got " + j.str());
}

}  // namespace scsim
