#include "scsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "scsim/correspondence.hpp"
#include "scsim/epr.hpp"
#include "scsim/errors.hpp"
#include "scsim/io.hpp"
#include "scsim/numeric.hpp"
#include "scsim/rng.hpp"
#include "scsim/sterngerlach.hpp"

namespace scsim {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// schema walking with full violation collection

struct Checker {
    const json& root;
    std::vector<std::string> problems;

    void fail(const std::string& msg) { problems.push_back(msg); }

    const json* field(const json& obj, const std::string& key, const char* type,
                      const std::string& where) {
        if (!obj.contains(key)) {
            fail(where + ": missing field '" + key + "'");
            return nullptr;
        }
        const json& v = obj.at(key);
        const bool ok = (std::string(type) == "number" && v.is_number()) ||
                        (std::string(type) == "integer" && v.is_number_integer()) ||
                        (std::string(type) == "string" && v.is_string()) ||
                        (std::string(type) == "object" && v.is_object()) ||
                        (std::string(type) == "array" && v.is_array()) ||
                        (std::string(type) == "boolean" && v.is_boolean());
        if (!ok) {
            fail(where + ": field '" + key + "' must be a " + type);
            return nullptr;
        }
        return &v;
    }

    double number(const json& obj, const std::string& key, const std::string& where,
                  double fallback = 0.0) {
        const json* v = field(obj, key, "number", where);
        return v ? v->get<double>() : fallback;
    }

    std::int64_t integer(const json& obj, const std::string& key, const std::string& where,
                         std::int64_t fallback = 0) {
        const json* v = field(obj, key, "integer", where);
        return v ? v->get<std::int64_t>() : fallback;
    }
};

std::optional<Direction> parse_direction(Checker& ck, const json& obj, const std::string& where) {
    try {
        if (obj.contains("polar")) return Direction::polar(obj.at("polar").get<double>());
        if (obj.contains("theta"))
            return Direction(obj.at("theta").get<double>(),
                             obj.value("phi", 0.0));
        ck.fail(where + ": direction needs 'theta'/'phi' or 'polar'");
    } catch (const std::exception& e) {
        ck.fail(where + ": " + e.what());
    }
    return std::nullopt;
}

std::optional<GridSpec> parse_grid(Checker& ck, const json& spec) {
    const json* g = ck.field(spec, "grid", "object", "grid");
    if (!g) return std::nullopt;
    const double lower = ck.number(*g, "lower", "grid");
    const double upper = ck.number(*g, "upper", "grid");
    const std::int64_t count = ck.integer(*g, "count", "grid", 64);
    try {
        return GridSpec(lower, upper, static_cast<int>(count));
    } catch (const std::exception& e) {
        ck.fail(std::string("grid: ") + e.what());
        return std::nullopt;
    }
}

std::optional<PotentialField> parse_potential(Checker& ck, const json& spec, double mass,
                                              const Interval& window) {
    const json* p = ck.field(spec, "potential", "object", "potential");
    if (!p) return std::nullopt;
    const json* type = ck.field(*p, "type", "string", "potential");
    if (!type) return std::nullopt;
    const std::string t = type->get<std::string>();
    try {
        if (t == "free") return make_free_potential(window);
        if (t == "harmonic")
            return make_harmonic_potential(mass, ck.number(*p, "omega", "potential", 1.0),
                                           p->value("center", 0.0), window);
        if (t == "quartic-perturbed")
            return make_quartic_perturbed_potential(mass, ck.number(*p, "omega", "potential", 1.0),
                                                    ck.number(*p, "lambda", "potential"), window);
        if (t == "linear")
            return make_linear_potential(ck.number(*p, "slope", "potential", 1.0), window);
        ck.fail("potential: unknown type '" + t + "'");
    } catch (const std::exception& e) {
        ck.fail(std::string("potential: ") + e.what());
    }
    return std::nullopt;
}

std::optional<Apparatus> parse_apparatus(Checker& ck, const json& obj, const std::string& where) {
    auto axis = obj.contains("axis") ? parse_direction(ck, obj.at("axis"), where + ".axis")
                                     : std::optional<Direction>{};
    if (!obj.contains("axis")) ck.fail(where + ": missing field 'axis'");
    const json* region = ck.field(obj, "region", "array", where);
    const double ramp = ck.number(obj, "ramp_width", where, 1.0);
    const double gradient = ck.number(obj, "gradient", where, 1.0);
    if (!axis || !region) return std::nullopt;
    if (region->size() != 2 || !(*region)[0].is_number() || !(*region)[1].is_number()) {
        ck.fail(where + ": 'region' must be [lo, hi]");
        return std::nullopt;
    }
    try {
        return Apparatus(*axis, (*region)[0].get<double>(), (*region)[1].get<double>(), ramp,
                         gradient);
    } catch (const std::exception& e) {
        ck.fail(where + ": " + e.what());
        return std::nullopt;
    }
}

void check_packet(Checker& ck, const GridSpec& grid, double q0, double sigma_q,
                  const std::string& where) {
    if (sigma_q < 4.0 * grid.spacing())
        ck.fail(where + ": sigma_q = " + fmt_double(sigma_q) +
                " violates the resolution rule sigma_q >= 4 dq = " +
                fmt_double(4.0 * grid.spacing()));
    if (q0 - 5.0 * sigma_q < grid.lower() || q0 + 5.0 * sigma_q > grid.upper())
        ck.fail(where + ": packet violates the 5 sigma margin rule");
}

void check_phase_guard(Checker& ck, double vmax, double dt, double hbar,
                       const std::string& where) {
    if (vmax * dt / hbar >= 0.5)
        ck.fail(where + ": dt violates the phase-wrap guard: max|V| dt / hbar = " +
                fmt_double(vmax * dt / hbar) + " >= 0.5");
}

void check_step_multiple(Checker& ck, double t, double dt, const std::string& what) {
    const double r = t / dt;
    if (std::abs(r - std::round(r)) > 1e-6)
        ck.fail(what + " = " + fmt_double(t) + " is not an integer multiple of dt = " +
                fmt_double(dt));
}

// ---------------------------------------------------------------------------
// per-kind validation

void validate_sweep(Checker& ck, const json& spec) {
    const auto grid = parse_grid(ck, spec);
    const double mass = ck.number(spec, "mass", "sweep", 1.0);
    const double q0 = ck.number(spec, "q0", "sweep");
    ck.number(spec, "p0", "sweep");
    const double sigma_q = ck.number(spec, "sigma_q", "sweep", 1.0);
    const double dt = ck.number(spec, "dt", "sweep", 1e-3);
    const double classical_dt = ck.number(spec, "classical_dt", "sweep", 1e-3);
    const double total_time = ck.number(spec, "total_time", "sweep", 1.0);
    const std::int64_t members = ck.integer(spec, "members", "sweep", 1);
    if (grid) {
        check_packet(ck, *grid, q0, sigma_q, "sweep");
        parse_potential(ck, spec, mass, Interval{grid->lower(), grid->upper()});
    }
    if (members < 1) ck.fail("sweep: members must be positive");
    if (dt <= 0 || classical_dt <= 0 || total_time <= 0)
        ck.fail("sweep: dt, classical_dt and total_time must be positive");

    const json* hb = ck.field(spec, "hbar_values", "array", "sweep");
    if (hb) {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& v : *hb) {
            if (!v.is_number() || !(v.get<double>() > 0)) {
                ck.fail("sweep: hbar_values must be positive numbers");
                break;
            }
            if (!(v.get<double>() < prev)) {
                ck.fail("sweep: hbar_values must be strictly descending");
                break;
            }
            prev = v.get<double>();
        }
    }
    if (spec.contains("sample_times")) {
        double prev = 0.0;
        for (const auto& v : spec.at("sample_times")) {
            if (!v.is_number()) {
                ck.fail("sweep: sample_times must be numbers");
                break;
            }
            const double t = v.get<double>();
            if (t < prev) ck.fail("sweep: sample_times must be ascending");
            if (t > total_time) ck.fail("sweep: sample_times must not exceed total_time");
            if (classical_dt > 0) check_step_multiple(ck, t, classical_dt, "sweep: sample time");
            prev = t;
        }
    }
    if (dt > 0) check_step_multiple(ck, total_time, classical_dt, "sweep: total_time");
    if (spec.contains("compare_coarsen") && grid) {
        const std::int64_t f = ck.integer(spec, "compare_coarsen", "sweep", 1);
        if (f < 1 || !is_power_of_two(static_cast<int>(f)) || grid->count() / f < 64)
            ck.fail("sweep: compare_coarsen must be a power of two leaving >= 64 cells");
    }
}

void validate_beam_spin(Checker& ck, const json& spec, const GridSpec* grid, double hbar,
                        double dt, double gradient_bound) {
    const json* beam = ck.field(spec, "beam", "object", "beam");
    if (beam) {
        const double q0 = ck.number(*beam, "q0", "beam");
        ck.number(*beam, "p0", "beam");
        const double sigma_q = ck.number(*beam, "sigma_q", "beam", 1.0);
        if (grid) check_packet(ck, *grid, q0, sigma_q, "beam");
    }
    const json* spin = ck.field(spec, "spin", "object", "spin");
    if (spin) {
        const std::int64_t jt = ck.integer(*spin, "j_twice", "spin", 1);
        const std::int64_t mt = ck.integer(*spin, "mu_twice", "spin", 1);
        if (jt < 0) ck.fail("spin: j_twice must be non-negative");
        if (!valid_projection(half(static_cast<int>(jt)), half(static_cast<int>(mt))))
            ck.fail("spin: mu_twice is not a valid projection for j_twice");
        if (spin->contains("axis")) parse_direction(ck, spin->at("axis"), "spin.axis");
        if (hbar > 0 && dt > 0)
            check_phase_guard(ck, 0.5 * static_cast<double>(jt) * gradient_bound, dt, hbar,
                              "spin");
    }
}

void validate_sg(Checker& ck, const json& spec) {
    const auto grid = parse_grid(ck, spec);
    const double hbar = ck.number(spec, "hbar", "sg", 1.0);
    ck.number(spec, "mass", "sg", 1.0);
    const double dt = ck.number(spec, "dt", "sg", 1e-3);
    const double total_time = ck.number(spec, "total_time", "sg", 1.0);
    const json* app = ck.field(spec, "apparatus", "object", "apparatus");
    double gbound = 0.0;
    if (app) {
        const auto a = parse_apparatus(ck, *app, "apparatus");
        if (a) gbound = std::abs(a->gradient);
    }
    validate_beam_spin(ck, spec, grid ? &*grid : nullptr, hbar, dt, gbound);
    if (dt <= 0 || total_time <= 0) ck.fail("sg: dt and total_time must be positive");
    if (dt > 0) check_step_multiple(ck, total_time, dt, "sg: total_time");
    if (spec.contains("semiclassical_members") &&
        ck.integer(spec, "semiclassical_members", "sg") < 0)
        ck.fail("sg: semiclassical_members must be non-negative");
    if (spec.contains("bin_count") && grid) {
        const std::int64_t bc = ck.integer(spec, "bin_count", "sg");
        if (bc < 64 || grid->count() % bc != 0 || !is_power_of_two(grid->count() / static_cast<int>(bc)))
            ck.fail("sg: bin_count must divide the grid count by a power of two and stay >= 64");
    }
}

void validate_cascade(Checker& ck, const json& spec) {
    const auto grid = parse_grid(ck, spec);
    const double hbar = ck.number(spec, "hbar", "cascade", 1.0);
    ck.number(spec, "mass", "cascade", 1.0);
    const double dt = ck.number(spec, "dt", "cascade", 1e-3);
    const double total_time = ck.number(spec, "total_time", "cascade", 1.0);
    const json* stages = ck.field(spec, "stages", "array", "cascade");
    double gbound = 0.0;
    std::int64_t jt = 1;
    if (spec.contains("spin") && spec.at("spin").is_object() &&
        spec.at("spin").contains("j_twice") && spec.at("spin").at("j_twice").is_number_integer())
        jt = spec.at("spin").at("j_twice").get<std::int64_t>();
    if (stages) {
        if (stages->empty()) ck.fail("cascade: needs at least one stage");
        for (std::size_t i = 0; i < stages->size(); ++i) {
            const std::string where = "stages[" + std::to_string(i) + "]";
            const json& st = (*stages)[i];
            if (!st.is_object()) {
                ck.fail(where + ": must be an object");
                continue;
            }
            const json* app = ck.field(st, "apparatus", "object", where);
            if (app) {
                const auto a = parse_apparatus(ck, *app, where + ".apparatus");
                if (a) gbound = std::max(gbound, std::abs(a->gradient));
            }
            const bool last = i + 1 == stages->size();
            if (!last && !st.contains("keep_twice"))
                ck.fail(where + ": intermediate stages must specify keep_twice");
            if (st.contains("keep_twice") && st.at("keep_twice").is_number_integer() &&
                !valid_projection(half(static_cast<int>(jt)),
                                  half(static_cast<int>(st.at("keep_twice").get<std::int64_t>()))))
                ck.fail(where + ": keep_twice is not a valid projection");
        }
    }
    validate_beam_spin(ck, spec, grid ? &*grid : nullptr, hbar, dt, gbound);
    if (dt <= 0 || total_time <= 0) ck.fail("cascade: dt and total_time must be positive");
    if (dt > 0) check_step_multiple(ck, total_time, dt, "cascade: total_time");
    if (spec.contains("specimen_count") && ck.integer(spec, "specimen_count", "cascade") < 1)
        ck.fail("cascade: specimen_count must be positive");
}

void validate_chsh(Checker& ck, const json& spec) {
    const json* st = ck.field(spec, "settings", "object", "epr-chsh");
    if (st)
        for (const char* key : {"a", "a_prime", "b", "b_prime"}) {
            if (!st->contains(key)) {
                ck.fail(std::string("epr-chsh: settings missing '") + key + "'");
                continue;
            }
            const json& v = st->at(key);
            if (v.is_number()) continue;  // polar angle in the x-z plane
            if (v.is_object()) {
                parse_direction(ck, v, std::string("settings.") + key);
                continue;
            }
            ck.fail(std::string("epr-chsh: setting '") + key +
                    "' must be a polar angle or a direction object");
        }
    const std::int64_t trials = ck.integer(spec, "trials", "epr-chsh", 1000);
    if (trials < 1000) ck.fail("epr-chsh: trials must be at least 1000");
}

std::vector<std::string> validate_json(const json& spec) {
    Checker ck{spec, {}};
    if (!spec.is_object()) {
        ck.fail("spec: top level must be a JSON object");
        return ck.problems;
    }
    const std::int64_t version = ck.integer(spec, "schema_version", "spec", 1);
    if (version != 1) ck.fail("spec: unsupported schema_version (expected 1)");
    if (spec.contains("seed") && !spec.at("seed").is_number_unsigned() &&
        !spec.at("seed").is_number_integer())
        ck.fail("spec: seed must be an integer");
    const json* kind = ck.field(spec, "kind", "string", "spec");
    if (!kind) return ck.problems;
    const std::string k = kind->get<std::string>();
    if (k == "correspondence-sweep")
        validate_sweep(ck, spec);
    else if (k == "sg-run")
        validate_sg(ck, spec);
    else if (k == "cascade")
        validate_cascade(ck, spec);
    else if (k == "epr-chsh")
        validate_chsh(ck, spec);
    else
        ck.fail("spec: unknown kind '" + k + "'");
    return ck.problems;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("spec is not valid JSON: ") + e.what());
    }
}

json load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

// ---------------------------------------------------------------------------
// execution

Direction setting_direction(const json& v) {
    if (v.is_number()) return Direction::polar(v.get<double>());
    return Direction(v.at("theta").get<double>(), v.value("phi", 0.0));
}

std::filesystem::path out_path(const RunOptions& opt, const std::string& rel) {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p : opt.out_dir / p;
}

std::string fractions_str(std::span<const double> f) {
    std::string out = "[";
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", f[i]);
        out += buf;
    }
    return out + "]";
}

RunOutcome run_chsh(const json& spec, std::uint64_t seed, const RunOptions& opt) {
    const json& st = spec.at("settings");
    const ChshSettings settings{setting_direction(st.at("a")), setting_direction(st.at("a_prime")),
                                setting_direction(st.at("b")), setting_direction(st.at("b_prime"))};
    const std::int64_t trials = spec.value("trials", std::int64_t{100000});
    const PairState pair = singlet_pair();

    const ChshResult analytic = chsh(pair, settings);
    std::vector<PairTrial> trial_log;
    const bool want_trials =
        spec.contains("outputs") && spec.at("outputs").contains("trials_csv");
    const ChshResult sampled =
        sampled_chsh(pair, settings, trials, seed, want_trials ? &trial_log : nullptr);

    RunOutcome out;
    if (spec.contains("outputs")) {
        const json& o = spec.at("outputs");
        if (o.contains("chsh_json")) {
            const auto path = out_path(opt, o.at("chsh_json").get<std::string>());
            json combined{{"analytic", parse_text(chsh_json(analytic))},
                          {"sampled", parse_text(chsh_json(sampled))}};
            write_text(path, combined.dump(2) + "\n");
            out.outputs.push_back(path);
        }
        if (o.contains("trials_csv")) {
            const auto path = out_path(opt, o.at("trials_csv").get<std::string>());
            write_pair_trials_csv(path, trial_log);
            out.outputs.push_back(path);
        }
    }
    char line[160];
    std::snprintf(line, sizeof(line), "S = %.10f (sampled S = %.4f, SE = %.4f, trials = %lld)",
                  analytic.s, sampled.s, sampled.se_s, static_cast<long long>(trials));
    out.summary = line;
    return out;
}

RunOutcome run_sweep(const json& spec, std::uint64_t seed, const RunOptions& opt) {
    Checker ck{spec, {}};
    SweepScenario sc(*parse_grid(ck, spec));
    sc.mass = spec.value("mass", 1.0);
    sc.q0 = spec.at("q0").get<double>();
    sc.p0 = spec.value("p0", 0.0);
    sc.sigma_q = spec.at("sigma_q").get<double>();
    sc.dt = spec.value("dt", 1e-3);
    sc.classical_dt = spec.value("classical_dt", sc.dt);
    sc.total_time = spec.at("total_time").get<double>();
    if (spec.contains("sample_times"))
        sc.sample_times = spec.at("sample_times").get<std::vector<double>>();
    sc.members = spec.value("members", std::int64_t{100000});
    sc.seed = seed;
    sc.threads = resolve_threads(opt.threads);
    sc.compare_coarsen = static_cast<int>(spec.value("compare_coarsen", std::int64_t{1}));
    const double mass = sc.mass;
    const Interval window{sc.grid.lower(), sc.grid.upper()};
    const json pot = spec.at("potential");
    sc.potential = [pot, mass, window] {
        Checker c2{pot, {}};
        json holder{{"potential", pot}};
        auto p = parse_potential(c2, holder, mass, window);
        if (!p) throw SchemaError("potential: " + (c2.problems.empty() ? "invalid" : c2.problems.front()));
        return *p;
    };
    const std::vector<double> hbars = spec.at("hbar_values").get<std::vector<double>>();

    std::vector<SweepDetailRow> detail;
    const SweepReport report = hbar_sweep(sc, hbars, &detail);

    RunOutcome out;
    if (spec.contains("outputs")) {
        const json& o = spec.at("outputs");
        if (o.contains("sweep_csv")) {
            const auto path = out_path(opt, o.at("sweep_csv").get<std::string>());
            write_sweep_csv(path, report);
            out.outputs.push_back(path);
        }
        if (o.contains("detail_csv")) {
            const auto path = out_path(opt, o.at("detail_csv").get<std::string>());
            write_sweep_detail_csv(path, detail);
            out.outputs.push_back(path);
        }
    }
    std::string flagged;
    for (const auto& r : report.rows)
        if (r.flagged) flagged += " [hbar=" + fmt_double(r.hbar) + " flagged]";
    char line[160];
    if (!report.rows.empty())
        std::snprintf(line, sizeof(line),
                      "l1 = %.5f, validity = %.4f at hbar = %.5g (%zu rows)%s",
                      report.rows.back().l1, report.rows.back().validity_fraction,
                      report.rows.back().hbar, report.rows.size(), flagged.c_str());
    else
        std::snprintf(line, sizeof(line), "empty sweep (0 rows)");
    out.summary = line;
    return out;
}

struct BeamSpin {
    GridSpec grid;
    GridWaveFunction beam;
    SpinState chi;
};

BeamSpin build_beam(const json& spec) {
    Checker ck{spec, {}};
    const GridSpec grid = *parse_grid(ck, spec);
    const json& beam = spec.at("beam");
    const json& spin = spec.at("spin");
    const HalfInt j = half(static_cast<int>(spin.at("j_twice").get<std::int64_t>()));
    const HalfInt mu = half(static_cast<int>(spin.at("mu_twice").get<std::int64_t>()));
    Direction axis = Direction::z();
    if (spin.contains("axis")) axis = setting_direction(spin.at("axis"));
    GridWaveFunction psi =
        gaussian_packet(grid, beam.at("q0").get<double>(), beam.value("p0", 0.0),
                        beam.at("sigma_q").get<double>(), spec.at("hbar").get<double>(),
                        spec.value("mass", 1.0));
    return BeamSpin{grid, std::move(psi), SpinState::basis(j, mu, axis)};
}

Apparatus apparatus_from(const json& obj) {
    Checker ck{obj, {}};
    auto app = parse_apparatus(ck, obj, "apparatus");
    if (!app) throw SchemaError("apparatus: " + (ck.problems.empty() ? "invalid" : ck.problems.front()));
    return *app;
}

RunOutcome run_sg(const json& spec, std::uint64_t seed, const RunOptions& opt) {
    BeamSpin in = build_beam(spec);
    const Apparatus app = apparatus_from(spec.at("apparatus"));
    ApparatusRun cfg;
    cfg.dt = spec.value("dt", 1e-3);
    cfg.total_time = spec.at("total_time").get<double>();
    cfg.monitor_stride = static_cast<int>(spec.value("monitor_stride", std::int64_t{8}));
    cfg.threads = resolve_threads(opt.threads);

    const BranchSetExact run = run_apparatus_exact(in.beam, in.chi, app, cfg);

    // optional semiclassical cross-run on the same incident beam
    double semicl_l1 = std::numeric_limits<double>::quiet_NaN();
    const std::int64_t members = spec.value("semiclassical_members", std::int64_t{0});
    if (members > 0) {
        const int bin_count =
            static_cast<int>(spec.value("bin_count", std::int64_t{in.grid.count()}));
        const GridSpec bin_grid(in.grid.lower(), in.grid.upper(), bin_count);
        TrajectoryEnsemble ens =
            TrajectoryEnsemble::from_wavefunction(in.beam, members, derive_seed(seed, 1));
        const BranchSetClassical cls =
            run_apparatus_semiclassical(ens, in.chi, app, cfg, bin_grid);
        semicl_l1 = compare(cls.combined_density(),
                            coarsen(run.mixture_density(), in.grid.count() / bin_count));
    }

    RunOutcome out;
    json extra;
    if (!std::isnan(semicl_l1)) extra["semiclassical_l1"] = semicl_l1;

    if (spec.contains("outputs")) {
        const json& o = spec.at("outputs");
        if (o.contains("branches_json")) {
            const auto path = out_path(opt, o.at("branches_json").get<std::string>());
            json doc = parse_text(branch_set_json(run));
            for (auto& [k, v] : extra.items()) doc[k] = v;
            write_text(path, doc.dump(2) + "\n");
            out.outputs.push_back(path);
        }
        if (o.contains("density_csv")) {
            const auto path = out_path(opt, o.at("density_csv").get<std::string>());
            write_density_csv(path, run.mixture_density());
            out.outputs.push_back(path);
        }
        if (o.contains("specimens_csv")) {
            const std::int64_t count = spec.value("specimen_count", std::int64_t{100000});
            const auto path = out_path(opt, o.at("specimens_csv").get<std::string>());
            write_specimens_csv(path, sample_specimens(run, count, derive_seed(seed, 2)));
            out.outputs.push_back(path);
        }
    }

    std::vector<double> fr(run.fractions.data(), run.fractions.data() + run.fractions.size());
    std::string line = "fractions = " + fractions_str(fr) +
                       (run.separated ? ", separated at t = " + fmt_double(run.separation_time)
                                      : ", not separated");
    if (!std::isnan(semicl_l1)) line += ", semiclassical l1 = " + fmt_double(semicl_l1);
    out.summary = line;
    return out;
}

RunOutcome run_cascade(const json& spec, std::uint64_t seed, const RunOptions& opt) {
    BeamSpin in = build_beam(spec);
    std::vector<CascadeStage> stages;
    for (const auto& st : spec.at("stages")) {
        std::optional<HalfInt> keep;
        if (st.contains("keep_twice"))
            keep = half(static_cast<int>(st.at("keep_twice").get<std::int64_t>()));
        stages.push_back(CascadeStage{apparatus_from(st.at("apparatus")), keep});
    }
    ApparatusRun cfg;
    cfg.dt = spec.value("dt", 1e-3);
    cfg.total_time = spec.at("total_time").get<double>();
    cfg.monitor_stride = static_cast<int>(spec.value("monitor_stride", std::int64_t{8}));
    cfg.threads = resolve_threads(opt.threads);

    std::vector<std::string> pipelines = {"analytic", "exact", "sampled"};
    if (spec.contains("pipelines")) pipelines = spec.at("pipelines").get<std::vector<std::string>>();
    const auto enabled = [&](const char* name) {
        return std::find(pipelines.begin(), pipelines.end(), name) != pipelines.end();
    };

    json doc;
    std::optional<CascadeResult> analytic, exact;
    std::optional<SpecimenTable> sampled;
    if (enabled("analytic")) {
        analytic = cascade_analytic(in.chi, stages);
        doc["analytic"] = parse_text(cascade_json(*analytic));
    }
    if (enabled("exact")) {
        exact = cascade_exact(in.beam, in.chi, stages, cfg);
        doc["exact"] = parse_text(cascade_json(*exact));
    }
    if (enabled("sampled")) {
        const std::int64_t count = spec.value("specimen_count", std::int64_t{100000});
        sampled = cascade_sampled(in.chi, stages, count, derive_seed(seed, 3));
        doc["sampled"] = {{"empirical_fractions", sampled->empirical_fractions},
                          {"expected_fractions", sampled->expected_fractions},
                          {"survival_fraction", sampled->survival_fraction},
                          {"within_binomial_band", sampled->binomial_ok},
                          {"count", static_cast<std::int64_t>(sampled->records.size())}};
    }

    RunOutcome out;
    if (spec.contains("outputs")) {
        const json& o = spec.at("outputs");
        if (o.contains("cascade_json")) {
            const auto path = out_path(opt, o.at("cascade_json").get<std::string>());
            write_text(path, doc.dump(2) + "\n");
            out.outputs.push_back(path);
        }
        if (o.contains("specimens_csv") && sampled) {
            const auto path = out_path(opt, o.at("specimens_csv").get<std::string>());
            write_specimens_csv(path, *sampled);
            out.outputs.push_back(path);
        }
    }

    const CascadeResult* headline = exact ? &*exact : (analytic ? &*analytic : nullptr);
    if (headline)
        out.summary = "kept path probability = " + fmt_double(headline->kept_path_probability) +
                      ", final fractions = " + fractions_str(headline->final_fractions);
    else if (sampled)
        out.summary = "sampled final fractions = " + fractions_str(sampled->empirical_fractions);
    else
        out.summary = "cascade: no pipelines selected";
    return out;
}

}  // namespace

std::vector<std::string> validate_scenario_text(const std::string& text) {
    json spec;
    try {
        spec = parse_text(text);
    } catch (const SchemaError& e) {
        return {e.what()};
    }
    return validate_json(spec);
}

std::vector<std::string> validate_scenario_file(const std::filesystem::path& path) {
    json spec;
    try {
        spec = load_file(path);
    } catch (const SchemaError& e) {
        return {e.what()};
    }
    return validate_json(spec);
}

RunOutcome run_scenario_file(const std::filesystem::path& path, const RunOptions& options) {
    const json spec = load_file(path);
    const auto problems = validate_json(spec);
    if (!problems.empty()) {
        std::string msg = "scenario failed validation:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw SchemaError(msg);
    }
    std::filesystem::create_directories(options.out_dir);

    const std::uint64_t seed =
        options.seed ? *options.seed : spec.value("seed", std::uint64_t{1});
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "epr-chsh") return run_chsh(spec, seed, options);
    if (kind == "correspondence-sweep") return run_sweep(spec, seed, options);
    if (kind == "sg-run") return run_sg(spec, seed, options);
    if (kind == "cascade") return run_cascade(spec, seed, options);
    throw SchemaError("unknown scenario kind '" + kind + "'");
}

std::string version_string() { return "scsim 0.1.0"; }

}  // namespace scsim
