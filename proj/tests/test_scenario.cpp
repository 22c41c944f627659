#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scsim/classical.hpp"
#include "scsim/errors.hpp"
#include "scsim/io.hpp"
#include "scsim/potential.hpp"
#include "scsim/quantum.hpp"
#include "scsim/scenario.hpp"

using namespace scsim;
namespace fs = std::filesystem;

namespace {

fs::path scenario_dir() {
    const char* dir = std::getenv("SCSIM_SCENARIO_DIR");
    REQUIRE(dir != nullptr);
    return fs::path(dir);
}

std::string cli_path() {
    const char* cli = std::getenv("SCSIM_CLI");
    REQUIRE(cli != nullptr);
    return cli;
}

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    const fs::path out_file = fs::temp_directory_path() / "scsim_test_stdout.txt";
    const fs::path err_file = fs::temp_directory_path() / "scsim_test_stderr.txt";
    const std::string cmd = "\"" + cli_path() + "\" " + args + " > " + out_file.string() +
                            " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return CliResult{WEXITSTATUS(status), slurp(out_file), slurp(err_file)};
}

fs::path write_temp_spec(const std::string& name, const std::string& text) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("every shipped scenario passes validation") {
    for (const char* name :
         {"correspondence-free.json", "correspondence-harmonic.json",
          "correspondence-sweep-quartic.json", "sg-heavy-beam.json", "cascade-z-theta.json",
          "epr-chsh-optimal.json"}) {
        const auto problems = validate_scenario_file(scenario_dir() / name);
        CAPTURE(name);
        for (const auto& p : problems) CAPTURE(p);
        CHECK(problems.empty());
    }
}

TEST_CASE("validation reports every violation, naming the offending rule") {
    const auto path = write_temp_spec("bad_sweep.json", R"({
        "schema_version": 1,
        "kind": "correspondence-sweep",
        "seed": 1,
        "grid": {"lower": -8.0, "upper": 8.0, "count": 256},
        "mass": 1.0,
        "q0": -7.9,
        "p0": 0.0,
        "sigma_q": 0.1,
        "potential": {"type": "harmonic", "omega": 40.0},
        "hbar_values": [0.1, 0.2],
        "dt": 0.001,
        "classical_dt": 0.001,
        "total_time": 1.0,
        "members": 1000
    })");
    const auto problems = validate_scenario_file(path);
    REQUIRE(problems.size() >= 3);
    bool resolution = false, margin = false, descending = false;
    for (const auto& p : problems) {
        if (p.find("sigma_q >= 4 dq") != std::string::npos) resolution = true;
        if (p.find("margin") != std::string::npos) margin = true;
        if (p.find("descending") != std::string::npos) descending = true;
    }
    CHECK(resolution);
    CHECK(margin);
    CHECK(descending);
}

TEST_CASE("validation flags phase-wrap violations in spin scenarios") {
    const auto path = write_temp_spec("bad_sg.json", R"({
        "schema_version": 1,
        "kind": "sg-run",
        "seed": 1,
        "grid": {"lower": -8.0, "upper": 56.0, "count": 4096},
        "hbar": 0.001,
        "mass": 1.0,
        "beam": {"q0": -2.0, "p0": 5.0, "sigma_q": 0.35},
        "spin": {"j_twice": 1, "mu_twice": 1, "axis": {"theta": 0.0}},
        "apparatus": {"axis": {"theta": 1.5707963}, "region": [0.0, 30.0],
                      "ramp_width": 2.0, "gradient": 5.0},
        "dt": 0.002,
        "total_time": 1.0
    })");
    const auto problems = validate_scenario_file(path);
    bool wrap = false;
    for (const auto& p : problems)
        if (p.find("phase-wrap") != std::string::npos) wrap = true;
    CHECK(wrap);
}

TEST_CASE("run: epr scenario emits the analytic S headline and its outputs") {
    RunOptions opt;
    opt.out_dir = fs::temp_directory_path() / "scsim_epr_out";
    fs::remove_all(opt.out_dir);
    const auto outcome = run_scenario_file(scenario_dir() / "epr-chsh-optimal.json", opt);
    CHECK(outcome.summary.rfind("S = 2.8284271247", 0) == 0);
    REQUIRE(outcome.outputs.size() == 2);
    for (const auto& path : outcome.outputs) CHECK(fs::exists(path));

    const auto doc = nlohmann::json::parse(std::ifstream(opt.out_dir / "chsh.json"));
    CHECK(doc.at("analytic").at("S").get<double>() == doctest::Approx(2.8284271247461903));
    CHECK(doc.at("analytic").at("violation").get<bool>());
    CHECK(doc.at("sampled").at("SE_S").get<double>() > 0.0);
}

TEST_CASE("run: unknown kinds and malformed files raise schema errors") {
    const auto bad_kind = write_temp_spec("bad_kind.json",
                                          R"({"schema_version": 1, "kind": "nope", "seed": 1})");
    CHECK_THROWS_AS(run_scenario_file(bad_kind, RunOptions{}), SchemaError);
    const auto not_json = write_temp_spec("not_json.json", "{ this is not json");
    CHECK_THROWS_AS(run_scenario_file(not_json, RunOptions{}), SchemaError);
}

TEST_CASE("cli: run prints the summary and exits 0") {
    const fs::path out = fs::temp_directory_path() / "scsim_cli_out";
    fs::remove_all(out);
    const auto r = run_cli("run " + (scenario_dir() / "epr-chsh-optimal.json").string() +
                           " --out-dir " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("S = 2.8284271247", 0) == 0);
}

TEST_CASE("cli: schema problems exit 2 naming the field, missing files exit 4") {
    const auto bad = write_temp_spec("cli_bad.json", R"({
        "schema_version": 1, "kind": "epr-chsh", "seed": 1,
        "settings": {"a": 0.0, "a_prime": 0.5, "b": 1.0, "b_prime": 1.5},
        "trials": 10
    })");
    const auto r = run_cli("run " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("trials") != std::string::npos);

    const auto v = run_cli("validate " + bad.string());
    CHECK(v.exit_code == 2);
    CHECK(v.out.find("trials") != std::string::npos);

    const auto ok = run_cli("validate " + (scenario_dir() / "epr-chsh-optimal.json").string());
    CHECK(ok.exit_code == 0);

    const auto missing = run_cli("run /nonexistent/path/spec.json");
    CHECK(missing.exit_code == 4);

    const auto version = run_cli("version");
    CHECK(version.exit_code == 0);
    CHECK(version.out.find("scsim") != std::string::npos);
}

TEST_CASE("cli: identical seed gives identical hashes across thread counts") {
    const fs::path out1 = fs::temp_directory_path() / "scsim_det1";
    const fs::path out2 = fs::temp_directory_path() / "scsim_det2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    const std::string spec = (scenario_dir() / "epr-chsh-optimal.json").string();
    CHECK(run_cli("run " + spec + " --out-dir " + out1.string() + " --threads 1").exit_code == 0);
    CHECK(run_cli("run " + spec + " --out-dir " + out2.string() + " --threads 2").exit_code == 0);
    CHECK(sha256_file(out1 / "chsh.json") == sha256_file(out2 / "chsh.json"));
    CHECK(sha256_file(out1 / "chsh_trials.csv") == sha256_file(out2 / "chsh_trials.csv"));

    // a different seed must change the sampled outputs
    const fs::path out3 = fs::temp_directory_path() / "scsim_det3";
    fs::remove_all(out3);
    CHECK(run_cli("run " + spec + " --out-dir " + out3.string() + " --seed 42").exit_code == 0);
    CHECK(sha256_file(out1 / "chsh_trials.csv") != sha256_file(out3 / "chsh_trials.csv"));
}

TEST_CASE("sha256 matches the published test vector") {
    CHECK(sha256_bytes("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_bytes("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("binary snapshots round-trip exactly") {
    const GridSpec grid(-8.0, 8.0, 128);
    const auto psi = gaussian_packet(grid, 0.3, 1.7, 0.9, 0.6, 1.4);
    const fs::path wf_path = fs::temp_directory_path() / "roundtrip.wf";
    write_wavefunction_binary(wf_path, psi);
    const auto back = read_wavefunction_binary(wf_path);
    CHECK(back.grid == psi.grid);
    CHECK(back.hbar == psi.hbar);
    CHECK(back.mass == psi.mass);
    CHECK((back.amps == psi.amps).all());

    auto ens = TrajectoryEnsemble::gaussian_cloud(0.0, 1.0, 0.5, 0.2, 1.0, 500, 77);
    ens = propagate_ensemble(std::move(ens), make_free_potential({-50, 50}), 1e-2, 1.0,
                             std::array{0.5, 1.0});
    const fs::path ens_path = fs::temp_directory_path() / "roundtrip.ens";
    write_ensemble_binary(ens_path, ens);
    const auto table = read_ensemble_binary(ens_path);
    CHECK(table.count == ens.size());
    CHECK(table.mass == ens.mass());
    REQUIRE(table.snapshots.size() == ens.history().size());
    for (std::size_t s = 0; s < table.snapshots.size(); ++s) {
        CHECK(table.snapshots[s].t == ens.history()[s].t);
        CHECK((table.snapshots[s].positions == ens.history()[s].positions).all());
        CHECK((table.snapshots[s].momenta == ens.history()[s].momenta).all());
        CHECK((table.snapshots[s].jacobians == ens.history()[s].jacobians).all());
    }
    CHECK((table.weights == ens.weights()).all());
}

TEST_CASE("wavefunction csv uses the documented q,re,im columns") {
    const GridSpec grid(-4.0, 4.0, 64);
    const auto psi = gaussian_packet(grid, 0.0, 1.0, 0.5, 1.0, 1.0);
    const fs::path path = fs::temp_directory_path() / "wavefunction.csv";
    write_wavefunction_csv(path, psi);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "q,re,im");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 64);
}

TEST_CASE("density csv uses the documented header and plain decimal points") {
    const GridSpec grid(-1.0, 1.0, 64);
    const DensityField field(grid, Eigen::ArrayXd::Constant(64, 0.5));
    const fs::path path = fs::temp_directory_path() / "density.csv";
    write_density_csv(path, field);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "q,value");
    std::string row;
    std::getline(in, row);
    CHECK(row == "-1,0.5");
}
