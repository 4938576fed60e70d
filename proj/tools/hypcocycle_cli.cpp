// Command-line front end: run experiments from config files, compare
// spectrum CSVs, run validation suites and export the surface group.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 a validation
// suite or comparison failed.

#include <hypcocycle/config.hpp>
#include <hypcocycle/lyapunov.hpp>
#include <hypcocycle/report.hpp>
#include <hypcocycle/surface.hpp>
#include <hypcocycle/validation.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace hypcocycle;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void print_suite(const SuiteResult& r, std::ostream& out)
{
    out << (r.passed() ? "PASS" : "FAIL") << "  " << r.name << " (" << strprintf("%.1f", r.seconds) << " s)\n";
    for (const auto& c : r.checks)
        out << "  [" << (c.passed ? "ok" : "FAILED") << "] " << c.name << ": " << c.detail << "\n";
}

std::string suites_csv(const std::vector<SuiteResult>& results)
{
    std::string out = "suite,check,passed,detail\n";
    for (const auto& r : results)
        for (const auto& c : r.checks)
            out += csv_quote(r.name) + "," + csv_quote(c.name) + "," + (c.passed ? "1" : "0") + "," +
                   csv_quote(c.detail) + "\n";
    return out;
}

// Flag values of `run`, keyed by config key.
struct RunFlags {
    std::string config;
    std::map<std::string, std::string> values;
};

int do_run(const RunFlags& flags)
{
    ExperimentConfig cfg;
    try {
        cfg = load_config(flags.config);
        for (const auto& [key, value] : flags.values) {
            const std::string full = experiment_key(key);
            if (cfg.given.count(full))
                throw ConfigError("--" + key + " conflicts with '" + full + " = " + cfg.given.at(full) +
                                  "' in the config file");
            cfg.given[full] = value;
        }
        resolve_config(cfg, std::getenv(kSeedEnvironmentVariable));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const FuchsianGroup group = build_genus2();
    std::optional<Representation> rep;
    if (cfg.representation) {
        try {
            rep = build_representation(*cfg.representation, group);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        std::cout << "relator residual: " << format_double(rep->relator_residual()) << "\n";
        if (!rep->exact()) {
            std::cerr << "error: representation: relator residual " << rep->relator_residual()
                      << " exceeds 1e-8 (projective-only representations are rejected)\n";
            return kExitUsage;
        }
    }
    default_workers_setting().store(cfg.workers);

    nlohmann::ordered_json manifest;
    manifest["tool"] = "hypcocycle_cli";
    manifest["version"] = kVersion;
    manifest["timestamp"] = utc_timestamp();
    manifest["config_file"] = flags.config;
    nlohmann::ordered_json resolved;
    resolved["surface"] = cfg.surface;
    resolved["method"] = cfg.method;
    resolved["horizon"] = cfg.horizon;
    resolved["step"] = cfg.step;
    resolved["n_paths"] = cfg.n_paths;
    resolved["n_dirs"] = cfg.n_dirs;
    resolved["n_vectors"] = cfg.n_vectors;
    resolved["reorth_every"] = cfg.reorth_every;
    resolved["seed"] = cfg.seed;
    resolved["workers"] = cfg.workers;
    resolved["output"] = cfg.output;
    manifest["resolved"] = resolved;
    nlohmann::ordered_json defaulted = nlohmann::json::array();
    for (const auto& key : config_schema().at("experiment"))
        if (!cfg.given.count(experiment_key(key)) && key != "method" && !(key == "seed" && cfg.seed_source != "default"))
            defaulted.push_back(key);
    manifest["defaulted_keys"] = defaulted;
    manifest["seed_source"] = cfg.seed_source;
    if (rep) {
        manifest["representation"] = {{"dim", rep->dim()},
                                      {"field", field_name(rep->field())},
                                      {"preset", cfg.representation->preset},
                                      {"relator_residual", rep->relator_residual()},
                                      {"exact", rep->exact()}};
    }
    manifest["surface_relator_residual"] = group.relator_residual();

    const fs::path out_dir(cfg.output);
    int code = kExitOk;
    std::string csv, summary;
    const auto start = std::chrono::steady_clock::now();
    try {
        fs::create_directories(out_dir);
        if (cfg.is_validation()) {
            ValidationContext ctx;
            ctx.seed = cfg.seed;
            ctx.workers = cfg.workers;
            const SuiteResult r = run_suite(cfg.validation_suite(), ctx);
            print_suite(r, std::cout);
            std::ostringstream text;
            print_suite(r, text);
            summary = text.str();
            csv = suites_csv({r});
            code = r.passed() ? kExitOk : kExitFailed;
        } else {
            const RngStream rng(cfg.seed, 0);
            SpectrumReport report;
            if (cfg.method == "brownian") {
                report = benettin_spectrum(*rep, cfg.horizon, cfg.step, cfg.reorth_every, cfg.n_paths, rng, cfg.workers);
            } else if (cfg.method == "geodesic") {
                report = spectrum_from_values(geodesic_grid_values(*rep, cfg.horizon, cfg.n_dirs, cfg.workers),
                                              cfg.horizon, "geodesic", cfg.seed, cfg.workers);
            } else {
                report = spectrum_from_values(brownian_values(*rep, cfg.horizon, cfg.n_paths, rng, {cfg.step, cfg.workers}),
                                              cfg.horizon, "diffusion", cfg.seed, cfg.workers);
            }
            csv = spectrum_csv(report);
            summary = spectrum_summary(report);
            std::cout << summary;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    manifest["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["exit_code"] = code;
    try {
        write_file(out_dir / "results.csv", csv);
        write_file(out_dir / "summary.txt", summary);
        write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::cout << "wrote " << (out_dir / "results.csv").string() << ", summary.txt, manifest.json\n";
    return code;
}

int do_compare(const std::string& a, const std::string& b, const AgreementRule& rule)
{
    std::vector<ComparisonLine> lines;
    try {
        lines = compare_spectra(read_spectrum_csv(a), read_spectrum_csv(b), rule);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    bool all = true;
    for (const auto& l : lines) {
        all = all && l.agree;
        std::cout << strprintf("chi_%d: %.10g vs %.10g, |diff| %.3g, tolerance %.3g  %s\n", l.index, l.a, l.b,
                               std::abs(l.a - l.b), l.tolerance, l.agree ? "agree" : "DISAGREE");
    }
    std::cout << (all ? "all exponents agree\n" : "exponents disagree\n");
    return all ? kExitOk : kExitFailed;
}

int do_validate(const std::string& name, std::uint64_t seed, unsigned workers, double scale, const std::string& csv_path)
{
    ValidationContext ctx;
    ctx.seed = seed;
    if (workers > 0)
        ctx.workers = workers;
    ctx.scale = scale;
    std::vector<std::string> names;
    if (name == "all") {
        for (const char* n : {"cocycle-laws", "geometry", "diffusion", "shadowing", "uniformity", "spectrum", "interval",
                              "expectation", "circle", "regularity"})
            names.emplace_back(n);
    } else {
        if (!validation_suites().count(name)) {
            std::cerr << "error: unknown suite '" << name << "'; available:";
            for (const auto& [n, f] : validation_suites())
                std::cerr << " " << n;
            std::cerr << " all\n";
            return kExitUsage;
        }
        names.push_back(name);
    }
    std::vector<SuiteResult> results;
    bool all = true;
    for (const auto& n : names) {
        try {
            results.push_back(run_suite(n, ctx));
        } catch (const std::exception& e) {
            std::cerr << "error in suite " << n << ": " << e.what() << "\n";
            return kExitUsage;
        }
        print_suite(results.back(), std::cout);
        std::cout.flush();
        all = all && results.back().passed();
    }
    if (!csv_path.empty())
        write_file(csv_path, suites_csv(results));
    return all ? kExitOk : kExitFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lyapunov spectra of representation cocycles over a genus-2 hyperbolic surface"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run an experiment described by a config file");
    run->add_option("config", run_flags.config, "config file")->required()->check(CLI::ExistingFile);
    const char* run_keys[] = {"method", "horizon", "step", "n_paths", "n_dirs", "n_vectors", "reorth_every", "seed", "workers", "output"};
    std::map<std::string, std::string> raw_flags;
    std::map<std::string, CLI::Option*> run_options;
    for (const char* key : run_keys) {
        std::string flag = std::string("--") + key;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        run_options[key] = run->add_option(flag, raw_flags[key],
                                           std::string("sets experiment.") + key + " (error if the config file sets it too)");
    }

    std::string cmp_a, cmp_b;
    AgreementRule rule;
    auto* compare = app.add_subcommand("compare", "compare two spectrum CSV reports");
    compare->add_option("report_a", cmp_a, "first CSV")->required();
    compare->add_option("report_b", cmp_b, "second CSV")->required();
    compare->add_option("--sigmas", rule.sigmas, "combined standard errors allowed")->capture_default_str();
    compare->add_option("--relative", rule.relative, "relative tolerance")->capture_default_str();

    std::string suite = "all";
    std::uint64_t val_seed = 0;
    unsigned val_workers = 0;
    double val_scale = 1.0;
    std::string val_csv;
    auto* validate = app.add_subcommand("validate", "run validation suites");
    validate->add_option("suite", suite, "suite name or 'all'")->capture_default_str();
    validate->add_option("--seed", val_seed, "master seed")->capture_default_str();
    validate->add_option("--workers", val_workers, "worker threads (0 = all cores)");
    validate->add_option("--scale", val_scale, "multiplier for Monte Carlo sample counts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    validate->add_option("--csv", val_csv, "write the checks as CSV");

    std::string dump_out;
    auto* dump = app.add_subcommand("dump-surface", "print the side-pairing generators");
    dump->add_option("--output", dump_out, "write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            for (const auto& [key, option] : run_options)
                if (option->count() > 0)
                    run_flags.values[key] = raw_flags[key];
            return do_run(run_flags);
        }
        if (*compare)
            return do_compare(cmp_a, cmp_b, rule);
        if (*validate) {
            if (const char* env = std::getenv(kSeedEnvironmentVariable); env && *env && validate->count("--seed") == 0)
                val_seed = std::strtoull(env, nullptr, 10);
            return do_validate(suite, val_seed, val_workers, val_scale, val_csv);
        }
        if (*dump) {
            const std::string text = dump_generators(build_genus2());
            if (dump_out.empty())
                std::cout << text;
            else
                write_file(dump_out, text);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
