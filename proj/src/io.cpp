#include "scsim/io.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "scsim/errors.hpp"
#include "scsim/numeric.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts are unsupported");

namespace scsim {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void put_f64(std::ostream& out, double x) { out.write(reinterpret_cast<const char*>(&x), 8); }
void put_u64(std::ostream& out, std::uint64_t x) {
    out.write(reinterpret_cast<const char*>(&x), 8);
}

double get_f64(std::istream& in) {
    double x;
    in.read(reinterpret_cast<char*>(&x), 8);
    return x;
}
std::uint64_t get_u64(std::istream& in) {
    std::uint64_t x;
    in.read(reinterpret_cast<char*>(&x), 8);
    return x;
}

}  // namespace

void write_density_csv(const std::filesystem::path& path, const DensityField& field) {
    std::ofstream out = open_out(path);
    out << "q,value\n";
    for (int i = 0; i < field.grid.count(); ++i)
        out << fmt_double(field.grid.point(i)) << ',' << fmt_double(field.values[i]) << '\n';
}

void write_wavefunction_csv(const std::filesystem::path& path, const GridWaveFunction& psi) {
    std::ofstream out = open_out(path);
    out << "q,re,im\n";
    for (int i = 0; i < psi.grid.count(); ++i)
        out << fmt_double(psi.grid.point(i)) << ',' << fmt_double(psi.amps[i].real()) << ','
            << fmt_double(psi.amps[i].imag()) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const SweepReport& report) {
    std::ofstream out = open_out(path);
    out << "hbar,l1_distance,validity_fraction,wall_time_seconds\n";
    for (const auto& r : report.rows)
        out << fmt_double(r.hbar) << ',' << fmt_double(r.l1) << ','
            << fmt_double(r.validity_fraction) << ',' << fmt_double(r.wall_seconds) << '\n';
}

void write_sweep_detail_csv(const std::filesystem::path& path,
                            const std::vector<SweepDetailRow>& rows) {
    std::ofstream out = open_out(path);
    out << "hbar,time,l1_distance\n";
    for (const auto& r : rows)
        out << fmt_double(r.hbar) << ',' << fmt_double(r.time) << ',' << fmt_double(r.l1) << '\n';
}

void write_specimens_csv(const std::filesystem::path& path, const SpecimenTable& table) {
    std::ofstream out = open_out(path);
    out << "id,stage,sigma,seed\n";
    for (const auto& rec : table.records)
        for (std::size_t s = 0; s < rec.outcomes().size(); ++s)
            out << rec.id() << ',' << s << ',' << rec.outcomes()[s].str() << ',' << table.seed
                << '\n';
}

void write_pair_trials_csv(const std::filesystem::path& path,
                           const std::vector<PairTrial>& trials) {
    std::ofstream out = open_out(path);
    out << "setting,sigma1,sigma2\n";
    for (const auto& t : trials)
        out << t.setting << ',' << (t.sigma1_twice > 0 ? "1/2" : "-1/2") << ','
            << (t.sigma2_twice > 0 ? "1/2" : "-1/2") << '\n';
}

// ---------------------------------------------------------------------------
// binary formats

namespace {
constexpr std::uint64_t kWaveMagic = 0x46575343ull;  // "SCWF"
constexpr std::uint64_t kEnsMagic = 0x4e455343ull;   // "SCEN"
}  // namespace

void write_wavefunction_binary(const std::filesystem::path& path, const GridWaveFunction& psi) {
    std::ofstream out = open_out(path, std::ios::binary);
    put_u64(out, kWaveMagic);
    put_u64(out, 1);  // version
    put_f64(out, psi.grid.lower());
    put_f64(out, psi.grid.upper());
    put_u64(out, static_cast<std::uint64_t>(psi.grid.count()));
    put_f64(out, psi.hbar);
    put_f64(out, psi.mass);
    put_f64(out, psi.t);
    for (int i = 0; i < psi.grid.count(); ++i) {
        put_f64(out, psi.amps[i].real());
        put_f64(out, psi.amps[i].imag());
    }
}

GridWaveFunction read_wavefunction_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    if (get_u64(in) != kWaveMagic) throw Error("not a wavefunction snapshot: " + path.string());
    if (get_u64(in) != 1) throw Error("unsupported wavefunction snapshot version");
    const double lower = get_f64(in);
    const double upper = get_f64(in);
    const int count = static_cast<int>(get_u64(in));
    const double hbar = get_f64(in);
    const double mass = get_f64(in);
    const double t = get_f64(in);
    Eigen::ArrayXcd amps(count);
    for (int i = 0; i < count; ++i) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        amps[i] = Complex(re, im);
    }
    if (!in) throw Error("truncated wavefunction snapshot: " + path.string());
    return GridWaveFunction(GridSpec(lower, upper, count), hbar, mass, std::move(amps), t);
}

void write_ensemble_binary(const std::filesystem::path& path, const TrajectoryEnsemble& ens) {
    std::ofstream out = open_out(path, std::ios::binary);
    put_u64(out, kEnsMagic);
    put_u64(out, 1);  // version
    put_u64(out, 1);  // spatial dimension
    put_u64(out, static_cast<std::uint64_t>(ens.size()));
    put_u64(out, ens.history().size());
    put_f64(out, ens.mass());
    for (const auto& snap : ens.history()) put_f64(out, snap.t);
    for (Eigen::Index i = 0; i < ens.size(); ++i) put_f64(out, ens.weights()[i]);
    for (Eigen::Index i = 0; i < ens.size(); ++i) put_f64(out, ens.exit_times()[i]);
    for (const auto& snap : ens.history()) {
        for (Eigen::Index i = 0; i < ens.size(); ++i) put_f64(out, snap.positions[i]);
        for (Eigen::Index i = 0; i < ens.size(); ++i) put_f64(out, snap.momenta[i]);
        for (Eigen::Index i = 0; i < ens.size(); ++i) put_f64(out, snap.jacobians[i]);
    }
}

EnsembleTable read_ensemble_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    if (get_u64(in) != kEnsMagic) throw Error("not an ensemble table: " + path.string());
    if (get_u64(in) != 1) throw Error("unsupported ensemble table version");
    EnsembleTable table;
    table.dimension = static_cast<int>(get_u64(in));
    table.count = static_cast<std::int64_t>(get_u64(in));
    const std::uint64_t ntimes = get_u64(in);
    table.mass = get_f64(in);
    table.times.resize(ntimes);
    for (auto& t : table.times) t = get_f64(in);
    table.weights.resize(table.count);
    table.exit_times.resize(table.count);
    for (auto i = 0; i < table.count; ++i) table.weights[i] = get_f64(in);
    for (auto i = 0; i < table.count; ++i) table.exit_times[i] = get_f64(in);
    for (std::uint64_t s = 0; s < ntimes; ++s) {
        EnsembleSnapshot snap;
        snap.t = table.times[s];
        snap.positions.resize(table.count);
        snap.momenta.resize(table.count);
        snap.jacobians.resize(table.count);
        for (auto i = 0; i < table.count; ++i) snap.positions[i] = get_f64(in);
        for (auto i = 0; i < table.count; ++i) snap.momenta[i] = get_f64(in);
        for (auto i = 0; i < table.count; ++i) snap.jacobians[i] = get_f64(in);
        table.snapshots.push_back(std::move(snap));
    }
    if (!in) throw Error("truncated ensemble table: " + path.string());
    return table;
}

// ---------------------------------------------------------------------------
// JSON results

namespace {

nlohmann::json direction_json(const Direction& d) {
    return {{"theta", d.theta()}, {"phi", d.phi()}};
}

nlohmann::json finite_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

}  // namespace

std::string cascade_json(const CascadeResult& result) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& st : result.stages) {
        nlohmann::json s{{"axis", direction_json(st.axis)},
                         {"apparatus",
                          {{"region", {st.region_lo, st.region_hi}},
                           {"ramp_width", st.ramp_width},
                           {"gradient", st.gradient}}},
                         {"fractions", st.fractions},
                         {"separated", st.separated},
                         {"separation_time", finite_or_null(st.separation_time)},
                         {"entry_time", finite_or_null(st.entry_time)},
                         {"exit_time", finite_or_null(st.exit_time)},
                         {"interference_residual", st.interference_residual},
                         {"max_fraction_drift", st.max_fraction_drift}};
        if (st.kept) {
            s["kept_sigma"] = st.kept->str();
            s["kept_fraction"] = st.kept_fraction;
        }
        stages.push_back(std::move(s));
    }
    std::vector<std::string> sigma_names;
    for (const auto& s : result.final_sigmas) sigma_names.push_back(s.str());
    const nlohmann::json j{{"stages", std::move(stages)},
                           {"final_sigmas", sigma_names},
                           {"final_fractions", result.final_fractions},
                           {"kept_path_probability", result.kept_path_probability}};
    return j.dump(2) + "\n";
}

std::string chsh_json(const ChshResult& r) {
    nlohmann::json j{{"settings",
                      {{"a", direction_json(r.settings.a)},
                       {"a_prime", direction_json(r.settings.a_prime)},
                       {"b", direction_json(r.settings.b)},
                       {"b_prime", direction_json(r.settings.b_prime)}}},
                     {"E_ab", r.e_ab},
                     {"E_ab_prime", r.e_abp},
                     {"E_a_prime_b", r.e_apb},
                     {"E_a_prime_b_prime", r.e_apbp},
                     {"S", r.s},
                     {"violation", r.violation}};
    if (r.sampled) {
        j["trials_per_setting"] = r.trials_per_setting;
        j["SE_ab"] = r.se_ab;
        j["SE_ab_prime"] = r.se_abp;
        j["SE_a_prime_b"] = r.se_apb;
        j["SE_a_prime_b_prime"] = r.se_apbp;
        j["SE_S"] = r.se_s;
    }
    return j.dump(2) + "\n";
}

std::string branch_set_json(const BranchSetExact& b) {
    std::vector<std::string> sigma_names;
    for (const auto& s : b.sigmas) sigma_names.push_back(s.str());
    std::vector<double> fr(b.fractions.data(), b.fractions.data() + b.fractions.size());
    const nlohmann::json j{{"axis", direction_json(b.axis)},
                           {"sigmas", sigma_names},
                           {"fractions", fr},
                           {"max_fraction_drift", b.max_fraction_drift},
                           {"separated", b.separated},
                           {"separation_time", finite_or_null(b.separation_time)},
                           {"max_pair_overlap", b.max_pair_overlap},
                           {"entry_time", finite_or_null(b.entry_time)},
                           {"exit_time", finite_or_null(b.exit_time)},
                           {"interference_residual_initial", b.residual_initial},
                           {"interference_residual_final", b.residual_final},
                           {"final_time", b.final_time}};
    return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), compact implementation for output fingerprints

namespace {

struct Sha256 {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::array<std::uint8_t, 64> block{};
    std::size_t fill = 0;
    std::uint64_t total = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const std::uint8_t* p) {
        static constexpr std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6],
                      hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }

    void update(const char* data, std::size_t len) {
        total += len;
        const auto* p = reinterpret_cast<const std::uint8_t*>(data);
        while (len > 0) {
            const std::size_t take = std::min(len, block.size() - fill);
            std::memcpy(block.data() + fill, p, take);
            fill += take;
            p += take;
            len -= take;
            if (fill == block.size()) {
                compress(block.data());
                fill = 0;
            }
        }
    }

    std::string hex() {
        const std::uint64_t bits = total * 8;
        const char pad = static_cast<char>(0x80);
        update(&pad, 1);
        const char zero = 0;
        while (fill != 56) update(&zero, 1);
        for (int i = 7; i >= 0; --i) {
            const char byte = static_cast<char>((bits >> (8 * i)) & 0xff);
            update(&byte, 1);
        }
        std::ostringstream out;
        for (std::uint32_t v : h)
            for (int i = 3; i >= 0; --i) {
                static const char* digits = "0123456789abcdef";
                out << digits[(v >> (8 * i + 4)) & 0xf] << digits[(v >> (8 * i)) & 0xf];
            }
        return out.str();
    }
};

}  // namespace

std::string sha256_bytes(const std::string& bytes) {
    Sha256 sha;
    sha.update(bytes.data(), bytes.size());
    return sha.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for hashing");
    Sha256 sha;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        sha.update(buf, static_cast<std::size_t>(in.gcount()));
    return sha.hex();
}

}  // namespace scsim
