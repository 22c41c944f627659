#include "scsim/epr.hpp"

#include <cmath>
#include <stdexcept>

#include "scsim/errors.hpp"
#include "scsim/rng.hpp"

namespace scsim {

PairState::PairState(HalfInt jj, Direction a1, Direction a2, Eigen::MatrixXcd a)
    : j(jj), axis1(a1), axis2(a2), amps(std::move(a)) {
    require_spin(j);
    const int dim = spin_dim(j);
    if (amps.rows() != dim || amps.cols() != dim)
        throw std::invalid_argument("pair amplitudes must be (2j+1) x (2j+1)");
    if (std::abs(amps.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("pair state must have Frobenius norm 1");
}

PairState singlet_pair() {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    a(0, 1) = r;   // |+->
    a(1, 0) = -r;  // |-+>
    return PairState(half(1), Direction::z(), Direction::z(), std::move(a));
}

JointTable joint_table(const PairState& pair, const Direction& n1, const Direction& n2) {
    const auto r1 = rotation_between(pair.j, pair.axis1, n1);
    const auto r2 = rotation_between(pair.j, pair.axis2, n2);
    const Eigen::MatrixXcd b = r1.entries * pair.amps * r2.entries.transpose();
    return JointTable{n1, n2, b.cwiseAbs2()};
}

double correlation(const PairState& pair, const Direction& n1, const Direction& n2) {
    if (pair.j != half(1))
        throw std::domain_error("correlation is defined for j = 1/2 fragments");
    const Eigen::MatrixXd p = joint_table(pair, n1, n2).probs;
    return p(0, 0) + p(1, 1) - p(0, 1) - p(1, 0);
}

ChshResult chsh(const PairState& pair, const ChshSettings& st) {
    ChshResult r;
    r.settings = st;
    r.e_ab = correlation(pair, st.a, st.b);
    r.e_abp = correlation(pair, st.a, st.b_prime);
    r.e_apb = correlation(pair, st.a_prime, st.b);
    r.e_apbp = correlation(pair, st.a_prime, st.b_prime);
    r.s = std::abs(r.e_ab + r.e_abp + r.e_apb - r.e_apbp);
    r.violation = r.s > 2.0;
    return r;
}

namespace {

struct SampledE {
    double e;
    double se;
};

SampledE sample_setting(const PairState& pair, const Direction& n1, const Direction& n2,
                        std::int64_t count, Rng& rng, int setting_index,
                        std::vector<PairTrial>* trials) {
    const Eigen::MatrixXd p = joint_table(pair, n1, n2).probs;
    const double flat[4] = {p(0, 0), p(0, 1), p(1, 0), p(1, 1)};
    std::int64_t counts[4] = {0, 0, 0, 0};
    for (std::int64_t i = 0; i < count; ++i) {
        const int cell = rng.categorical({flat, 4});
        ++counts[cell];
        if (trials) {
            const int i1 = cell / 2, i2 = cell % 2;
            trials->push_back({setting_index, i1 == 0 ? 1 : -1, i2 == 0 ? 1 : -1});
        }
    }
    const double e = static_cast<double>(counts[0] + counts[3] - counts[1] - counts[2]) /
                     static_cast<double>(count);
    const double se = std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(count));
    return {e, se};
}

}  // namespace

ChshResult sampled_chsh(const PairState& pair, const ChshSettings& st, std::int64_t count,
                        std::uint64_t seed, std::vector<PairTrial>* trials) {
    if (count < 1000) throw ContractError("sampled CHSH needs at least 1000 trials per setting");
    ChshResult r;
    r.settings = st;
    r.sampled = true;
    r.trials_per_setting = count;

    // one independent stream per setting pair
    Rng rng0 = Rng::stream(seed, 0);
    Rng rng1 = Rng::stream(seed, 1);
    Rng rng2 = Rng::stream(seed, 2);
    Rng rng3 = Rng::stream(seed, 3);

    const SampledE ab = sample_setting(pair, st.a, st.b, count, rng0, 0, trials);
    const SampledE abp = sample_setting(pair, st.a, st.b_prime, count, rng1, 1, trials);
    const SampledE apb = sample_setting(pair, st.a_prime, st.b, count, rng2, 2, trials);
    const SampledE apbp = sample_setting(pair, st.a_prime, st.b_prime, count, rng3, 3, trials);

    r.e_ab = ab.e;
    r.e_abp = abp.e;
    r.e_apb = apb.e;
    r.e_apbp = apbp.e;
    r.se_ab = ab.se;
    r.se_abp = abp.se;
    r.se_apb = apb.se;
    r.se_apbp = apbp.se;
    r.s = std::abs(r.e_ab + r.e_abp + r.e_apb - r.e_apbp);
    r.se_s = std::sqrt(ab.se * ab.se + abp.se * abp.se + apb.se * apb.se + apbp.se * apbp.se);
    r.violation = r.s > 2.0;
    return r;
}

}  // namespace scsim
