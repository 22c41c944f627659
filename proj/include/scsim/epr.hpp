#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "scsim/direction.hpp"
#include "scsim/halfint.hpp"
#include "scsim/hilbert.hpp"

namespace scsim {

/// Correlated internal state of two fragments: amps(i1, i2) is the joint
/// amplitude for projections sigma1 = j - i1 along axis1 and sigma2 = j - i2
/// along axis2. Frobenius norm 1.
struct PairState {
    PairState(HalfInt j, Direction axis1, Direction axis2, Eigen::MatrixXcd amps);

    HalfInt j;
    Direction axis1;
    Direction axis2;
    Eigen::MatrixXcd amps;
};

/// The rotationally invariant two-fragment state (|+-> - |-+>)/sqrt(2),
/// j = 1/2, in a common z basis.
PairState singlet_pair();

/// Joint outcome probabilities for measurements along (n1, n2).
struct JointTable {
    Direction n1;
    Direction n2;
    Eigen::MatrixXd probs;  // rows: sigma1 = j..-j, cols: sigma2 = j..-j
};

JointTable joint_table(const PairState& pair, const Direction& n1, const Direction& n2);

/// E(n1, n2) = sum sign(sigma1) sign(sigma2) P(sigma1, sigma2); j = 1/2 only.
double correlation(const PairState& pair, const Direction& n1, const Direction& n2);

struct ChshSettings {
    Direction a, a_prime, b, b_prime;
};

struct ChshResult {
    ChshSettings settings;
    double e_ab = 0.0, e_abp = 0.0, e_apb = 0.0, e_apbp = 0.0;
    double s = 0.0;  // |E(a,b) + E(a,b') + E(a',b) - E(a',b')|
    bool violation = false;

    // filled by the sampled estimator
    bool sampled = false;
    std::int64_t trials_per_setting = 0;
    double se_ab = 0.0, se_abp = 0.0, se_apb = 0.0, se_apbp = 0.0;
    double se_s = 0.0;
};

ChshResult chsh(const PairState& pair, const ChshSettings& settings);

/// One sampled coincidence: outcome projections (as twice-values) for the
/// two opposed fragments under the given setting pair.
struct PairTrial {
    int setting;  // 0: (a,b), 1: (a,b'), 2: (a',b), 3: (a',b')
    int sigma1_twice;
    int sigma2_twice;
};

/// Monte Carlo CHSH: `count` coincidences per setting pair drawn from the
/// joint tables, with binomial standard errors. count >= 1000.
ChshResult sampled_chsh(const PairState& pair, const ChshSettings& settings, std::int64_t count,
                        std::uint64_t seed, std::vector<PairTrial>* trials = nullptr);

}  // namespace scsim
