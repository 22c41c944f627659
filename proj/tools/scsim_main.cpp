// scsim: config-driven runner for semiclassical limit, Stern-Gerlach and
// EPR/CHSH scenarios. Exit codes: 0 success, 2 schema error, 3 numerical
// contract violation, 4 I/O failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "scsim/errors.hpp"
#include "scsim/scenario.hpp"

namespace {

int run_command(const std::string& spec_path, const scsim::RunOptions& options) {
    try {
        const scsim::RunOutcome outcome = scsim::run_scenario_file(spec_path, options);
        std::printf("%s\n", outcome.summary.c_str());
        return 0;
    } catch (const scsim::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const scsim::Error& e) {
        // distinguish file-level failures raised by the io layer
        const std::string what = e.what();
        const bool io = what.find("cannot open") != std::string::npos ||
                        what.find("failed writing") != std::string::npos;
        std::fprintf(stderr, "%s: %s\n", io ? "i/o error" : "numerical contract violation",
                     e.what());
        return io ? 4 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical contract violation: %s\n", e.what());
        return 3;
    }
}

int validate_command(const std::string& spec_path) {
    const auto problems = scsim::validate_scenario_file(spec_path);
    if (problems.empty()) {
        std::printf("ok: no violations\n");
        return 0;
    }
    std::printf("%zu violation(s):\n", problems.size());
    for (const auto& p : problems) std::printf("  - %s\n", p.c_str());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical limit / Stern-Gerlach / EPR scenario runner"};
    app.require_subcommand(1);

    std::string spec_path;
    scsim::RunOptions options;
    std::uint64_t seed_flag = 0;

    CLI::App* run = app.add_subcommand("run", "execute a scenario spec and write its outputs");
    run->add_option("spec", spec_path, "scenario JSON file")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_flag, "override the spec's master seed");
    run->add_option("--out-dir", options.out_dir, "directory for output files");
    run->add_option("--threads", options.threads,
                    "worker threads (0 = auto; never affects results)");

    CLI::App* validate =
        app.add_subcommand("validate", "check a scenario spec without executing it");
    std::string validate_path;
    validate->add_option("spec", validate_path, "scenario JSON file")->required();

    CLI::App* version = app.add_subcommand("version", "print the version");

    CLI11_PARSE(app, argc, argv);

    if (version->parsed()) {
        std::printf("%s\n", scsim::version_string().c_str());
        return 0;
    }
    if (validate->parsed()) return validate_command(validate_path);
    if (seed_opt->count() > 0) options.seed = seed_flag;
    return run_command(spec_path, options);
}
