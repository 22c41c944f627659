#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scsim/classical.hpp"
#include "scsim/correspondence.hpp"
#include "scsim/epr.hpp"
#include "scsim/grid.hpp"
#include "scsim/quantum.hpp"
#include "scsim/sterngerlach.hpp"

namespace scsim {

// CSV ('.' decimal separator, no locale dependence)

void write_density_csv(const std::filesystem::path& path, const DensityField& field);
void write_wavefunction_csv(const std::filesystem::path& path, const GridWaveFunction& psi);
/// Header row: hbar,l1_distance,validity_fraction,wall_time_seconds.
void write_sweep_csv(const std::filesystem::path& path, const SweepReport& report);
void write_sweep_detail_csv(const std::filesystem::path& path,
                            const std::vector<SweepDetailRow>& rows);
/// Columns: id,stage,sigma,seed. One row per traversed stage per specimen.
void write_specimens_csv(const std::filesystem::path& path, const SpecimenTable& table);
/// Columns: setting,sigma1,sigma2.
void write_pair_trials_csv(const std::filesystem::path& path,
                           const std::vector<PairTrial>& trials);

// binary snapshots (little-endian 64-bit floats throughout)

void write_wavefunction_binary(const std::filesystem::path& path, const GridWaveFunction& psi);
GridWaveFunction read_wavefunction_binary(const std::filesystem::path& path);

void write_ensemble_binary(const std::filesystem::path& path, const TrajectoryEnsemble& ens);
/// Raw ensemble table as read back from disk.
struct EnsembleTable {
    int dimension = 1;
    std::int64_t count = 0;
    double mass = 1.0;
    std::vector<double> times;
    Eigen::ArrayXd weights;
    Eigen::ArrayXd exit_times;  // NaN = never escaped
    std::vector<EnsembleSnapshot> snapshots;
};
EnsembleTable read_ensemble_binary(const std::filesystem::path& path);

// structured JSON results

std::string cascade_json(const CascadeResult& result);
std::string chsh_json(const ChshResult& result);
std::string branch_set_json(const BranchSetExact& branches);
void write_text(const std::filesystem::path& path, const std::string& text);

/// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);
/// SHA-256 of a string.
std::string sha256_bytes(const std::string& bytes);

}  // namespace scsim
