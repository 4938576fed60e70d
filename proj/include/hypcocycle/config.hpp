#pragma once

// Experiment configuration: flat `key = value` lines grouped under
// `[section]` headers, `#` comments. Unknown sections or keys are errors.
//
//   [surface]
//   name = genus2-octagon
//
//   [representation]
//   dim = 2
//   field = real            # or complex; complex entries are written (re, im)
//   g1 = 2 0 0 0.5          # row-major
//   g2 = 1 0 0 1
//   g3 = 1 0 0 1
//   g4 = 1 0 0 1
//
//   [experiment]
//   method = brownian       # brownian | geodesic | diffusion | validate:<suite>
//   horizon = 60
//   seed = 7

#include <hypcocycle/cocycle.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace hypcocycle {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kSeedEnvironmentVariable = "HYPCOCYCLE_SEED";

struct RepresentationConfig {
    std::string preset; // "", "trivial" or "fuchsian-holonomy"
    int dim = 0;
    Field field = Field::real;
    std::array<Matrix, 4> images;
};

struct ExperimentConfig {
    std::string surface = "genus2-octagon";
    std::optional<RepresentationConfig> representation;
    std::string method;
    double horizon = 20.0;
    double step = 0.01;
    std::size_t n_paths = 1000;
    std::size_t n_dirs = 256;
    std::size_t n_vectors = 64;
    std::size_t reorth_every = 10;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string output = "hypcocycle_out";

    std::string seed_source = "default";
    // section.key -> literal value as written, for every key present in the file.
    std::map<std::string, std::string> given;

    bool is_validation() const { return method.rfind("validate:", 0) == 0; }
    std::string validation_suite() const { return is_validation() ? method.substr(9) : std::string(); }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& text, const std::string& field)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError(field + ": '" + text + "' is not a finite number");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& field)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(field + ": '" + text + "' is not a non-negative integer");
    return v;
}

/// Whitespace-separated matrix entries; complex entries are "(re, im)".
inline std::vector<Complex> parse_entries(const std::string& text, Field field, const std::string& name)
{
    std::vector<Complex> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        if (text[i] == '(') {
            const auto close = text.find(')', i);
            if (close == std::string::npos)
                throw ConfigError(name + ": unterminated complex entry");
            if (field == Field::real)
                throw ConfigError(name + ": complex entry in a real representation");
            const std::string inner = text.substr(i + 1, close - i - 1);
            const auto comma = inner.find(',');
            if (comma == std::string::npos)
                throw ConfigError(name + ": complex entry needs the form (re, im)");
            out.emplace_back(parse_double(trim(inner.substr(0, comma)), name),
                             parse_double(trim(inner.substr(comma + 1)), name));
            i = close + 1;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(')
                ++j;
            out.emplace_back(parse_double(text.substr(i, j - i), name), 0.0);
            i = j;
        }
    }
    return out;
}

} // namespace detail

inline const std::map<std::string, std::set<std::string>>& config_schema()
{
    static const std::map<std::string, std::set<std::string>> schema{
        {"surface", {"name"}},
        {"representation", {"preset", "dim", "field", "g1", "g2", "g3", "g4"}},
        {"experiment",
         {"method", "horizon", "step", "n_paths", "n_dirs", "n_vectors", "reorth_every", "seed", "workers", "output"}},
    };
    return schema;
}

/// Section and key of a flat experiment key such as "seed" or "n_paths".
inline std::string experiment_key(const std::string& key) { return "experiment." + key; }

/// Parses configuration text. `origin` prefixes line-numbered messages.
inline ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config")
{
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    const auto& schema = config_schema();
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty())
            continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(where + ": malformed section header '" + t + "'");
            section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            if (!schema.count(section))
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(where + ": key outside of any section");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (!schema.at(section).count(key))
            throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
        const std::string full = section + "." + key;
        if (cfg.given.count(full))
            throw ConfigError(where + ": duplicate key '" + full + "'");
        if (value.empty())
            throw ConfigError(where + ": empty value for '" + full + "'");
        cfg.given[full] = value;
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), path);
}

/// Interprets the raw key/value map: converts, validates and applies defaults.
/// `seed_env` is the value of the seed override variable, if set.
inline void resolve_config(ExperimentConfig& cfg, const char* seed_env)
{
    const auto& g = cfg.given;
    auto get = [&](const std::string& k) -> const std::string* {
        const auto it = g.find(k);
        return it == g.end() ? nullptr : &it->second;
    };

    if (auto v = get("surface.name"); v && *v != "genus2-octagon")
        throw ConfigError("surface.name: only 'genus2-octagon' is supported, got '" + *v + "'");

    if (auto v = get("experiment.method"))
        cfg.method = *v;
    if (cfg.method.empty())
        throw ConfigError("experiment.method: missing (brownian | geodesic | diffusion | validate:<suite>)");
    if (!cfg.is_validation() && cfg.method != "brownian" && cfg.method != "geodesic" && cfg.method != "diffusion")
        throw ConfigError("experiment.method: unknown method '" + cfg.method + "'");

    if (auto v = get("experiment.horizon")) {
        cfg.horizon = detail::parse_double(*v, "experiment.horizon");
        if (!(cfg.horizon > 0.0))
            throw ConfigError("experiment.horizon: must be > 0");
    }
    if (auto v = get("experiment.step")) {
        cfg.step = detail::parse_double(*v, "experiment.step");
        if (!(cfg.step > 0.0) || cfg.step > kMaxDiffusionStep)
            throw ConfigError("experiment.step: must lie in (0, 0.05]");
    }
    auto count = [&](const char* key, std::size_t& target, std::size_t minimum) {
        if (auto v = get(std::string("experiment.") + key)) {
            target = detail::parse_unsigned(*v, std::string("experiment.") + key);
            if (target < minimum)
                throw ConfigError(std::string("experiment.") + key + ": must be >= " + std::to_string(minimum));
        }
    };
    count("n_paths", cfg.n_paths, 2);
    count("n_dirs", cfg.n_dirs, 2);
    count("n_vectors", cfg.n_vectors, 1);
    count("reorth_every", cfg.reorth_every, 1);
    if (static_cast<double>(cfg.reorth_every) * cfg.step > 1.0 + 1e-12)
        throw ConfigError("experiment.reorth_every: reorth_every * step must be <= 1");
    if (auto v = get("experiment.workers")) {
        const auto w = detail::parse_unsigned(*v, "experiment.workers");
        if (w < 1 || w > 4096)
            throw ConfigError("experiment.workers: must lie in [1, 4096]");
        cfg.workers = static_cast<unsigned>(w);
    }
    if (cfg.workers == 0)
        cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    if (auto v = get("experiment.output"))
        cfg.output = *v;

    if (auto v = get("experiment.seed")) {
        cfg.seed = detail::parse_unsigned(*v, "experiment.seed");
        cfg.seed_source = "config";
    }
    if (seed_env && *seed_env) {
        cfg.seed = detail::parse_unsigned(seed_env, kSeedEnvironmentVariable);
        cfg.seed_source = std::string("environment ") + kSeedEnvironmentVariable;
    }

    const bool has_rep = std::any_of(g.begin(), g.end(), [](const auto& kv) { return kv.first.rfind("representation.", 0) == 0; });
    if (!has_rep) {
        if (!cfg.is_validation())
            throw ConfigError("representation: section missing (required for method '" + cfg.method + "')");
        return;
    }
    RepresentationConfig rep;
    if (auto v = get("representation.field")) {
        if (*v == "real")
            rep.field = Field::real;
        else if (*v == "complex")
            rep.field = Field::complex;
        else
            throw ConfigError("representation.field: expected 'real' or 'complex', got '" + *v + "'");
    }
    if (auto v = get("representation.dim")) {
        const auto d = detail::parse_unsigned(*v, "representation.dim");
        if (d < 1 || d > 64)
            throw ConfigError("representation.dim: must lie in [1, 64]");
        rep.dim = static_cast<int>(d);
    }
    if (auto v = get("representation.preset")) {
        rep.preset = *v;
        if (rep.preset != "trivial" && rep.preset != "fuchsian-holonomy")
            throw ConfigError("representation.preset: expected 'trivial' or 'fuchsian-holonomy', got '" + *v + "'");
        for (int k = 1; k <= 4; ++k)
            if (get("representation.g" + std::to_string(k)))
                throw ConfigError("representation.g" + std::to_string(k) + ": not allowed together with a preset");
        if (rep.preset == "trivial" && rep.dim == 0)
            throw ConfigError("representation.dim: required for the trivial preset");
        if (rep.preset == "fuchsian-holonomy") {
            if (rep.dim != 0 && rep.dim != 2)
                throw ConfigError("representation.dim: the fuchsian-holonomy preset has dim 2");
            if (get("representation.field") && rep.field != Field::complex)
                throw ConfigError("representation.field: the fuchsian-holonomy preset is complex");
            rep.dim = 2;
            rep.field = Field::complex;
        }
        cfg.representation = rep;
        return;
    }
    if (rep.dim == 0)
        throw ConfigError("representation.dim: missing");
    for (int k = 1; k <= 4; ++k) {
        const std::string name = "representation.g" + std::to_string(k);
        const std::string* v = get(name);
        if (!v)
            throw ConfigError(name + ": missing");
        const auto entries = detail::parse_entries(*v, rep.field, name);
        const auto need = static_cast<std::size_t>(rep.dim) * static_cast<std::size_t>(rep.dim);
        if (entries.size() != need)
            throw ConfigError(name + ": expected " + std::to_string(need) + " entries, got " +
                              std::to_string(entries.size()));
        Matrix m(rep.dim, rep.dim);
        for (int i = 0; i < rep.dim; ++i)
            for (int j = 0; j < rep.dim; ++j)
                m(i, j) = entries[static_cast<std::size_t>(i * rep.dim + j)];
        rep.images[static_cast<std::size_t>(k - 1)] = m;
    }
    cfg.representation = rep;
}

/// Builds the representation; throws ConfigError naming the offending field.
inline Representation build_representation(const RepresentationConfig& rc, const FuchsianGroup& group)
{
    if (rc.preset == "trivial")
        return Representation::trivial(rc.dim, rc.field);
    if (rc.preset == "fuchsian-holonomy")
        return Representation::fuchsian_holonomy(group);
    try {
        return Representation(rc.field, rc.images, group);
    } catch (const CocycleError& e) {
        throw ConfigError(std::string("representation: ") + e.what());
    }
}

} // namespace hypcocycle
