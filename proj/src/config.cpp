#include "physmimo/cli.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace physmimo {

using nlohmann::json;

std::string to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::support: return "support";
    case ExperimentKind::eigen: return "eigen";
    case ExperimentKind::saturation: return "saturation";
    case ExperimentKind::ber: return "ber";
    case ExperimentKind::ber_distinct: return "ber_distinct";
    case ExperimentKind::ber_short: return "ber_short";
    }
    return "?";
}

ExperimentKind kind_from_string(const std::string& s)
{
    for (auto k : {ExperimentKind::support, ExperimentKind::eigen, ExperimentKind::saturation, ExperimentKind::ber,
                   ExperimentKind::ber_distinct, ExperimentKind::ber_short})
        if (to_string(k) == s)
            return k;
    throw ConfigError("kind: unknown experiment kind '" + s + "'");
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed)
{
    if (!j.is_object())
        throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(join(path, it.key()) + ": unknown key");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& path)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(join(path, key) + ": " + e.what());
    }
}

// Reads key or key_db (not both) as a linear power.
bool get_power(const json& j, const std::string& key, const std::string& path, double& out)
{
    const bool lin = j.contains(key), db = j.contains(key + "_db");
    if (lin && db)
        throw ConfigError(join(path, key) + ": given both linear and _db forms");
    if (lin)
        out = get<double>(j, key, path);
    else if (db)
        out = db_to_linear(get<double>(j, key + "_db", path));
    return lin || db;
}

std::string scenario_key(Scenario s)
{
    return to_string(s);
}

} // namespace

SystemParams parse_params(const json& j, const std::string& path, const SystemParams& base)
{
    reject_unknown(j, path,
                   {"M", "K", "L", "N", "aoa_counts", "Ps", "Ps_db", "PI", "PI_db", "noise", "spacing_ratio",
                    "scenario"});
    SystemParams p = base;
    if (j.contains("M"))
        p.M = get<int>(j, "M", path);
    if (j.contains("K"))
        p.K = get<int>(j, "K", path);
    if (j.contains("L"))
        p.L = get<int>(j, "L", path);
    if (j.contains("N"))
        p.N = get<int>(j, "N", path);
    if (j.contains("aoa_counts")) {
        const json& a = j.at("aoa_counts");
        if (a.is_number_integer())
            p.aoa_counts = {a.get<int>()};
        else
            p.aoa_counts = get<std::vector<int>>(j, "aoa_counts", path);
    }
    get_power(j, "Ps", path, p.Ps);
    get_power(j, "PI", path, p.PI);
    if (j.contains("noise"))
        p.noise_enabled = get<bool>(j, "noise", path);
    if (j.contains("spacing_ratio"))
        p.spacing_ratio = get<double>(j, "spacing_ratio", path);
    if (j.contains("scenario")) {
        try {
            p.scenario = scenario_from_string(get<std::string>(j, "scenario", path));
        } catch (const ConfigError& e) {
            throw ConfigError(join(path, "scenario") + ": " + e.what());
        }
    }
    return p;
}

json to_json(const SystemParams& p)
{
    return json{{"M", p.M},
                {"K", p.K},
                {"L", p.L},
                {"N", p.N},
                {"aoa_counts", p.aoa_counts},
                {"Ps", p.Ps},
                {"PI", p.PI},
                {"noise", p.noise_enabled},
                {"spacing_ratio", p.spacing_ratio},
                {"scenario", scenario_key(p.scenario)}};
}

ExperimentConfig parse_config(const json& j)
{
    reject_unknown(j, "",
                   {"preset", "scale", "kind", "params", "sweep", "grid", "support_mode", "m_values", "p_values",
                    "n_values", "iid_reference", "trials", "bits", "bins", "seed", "out"});
    ExperimentConfig c;
    if (j.contains("scale"))
        c.scale = get<std::string>(j, "scale", "");
    if (c.scale != "desk" && c.scale != "paper")
        throw ConfigError("scale: must be 'desk' or 'paper', got '" + c.scale + "'");
    if (j.contains("preset")) {
        c = preset_config(get<std::string>(j, "preset", ""), c.scale);
    } else if (!j.contains("kind")) {
        throw ConfigError("kind: missing required key (or give a preset)");
    }
    if (j.contains("kind"))
        c.kind = kind_from_string(get<std::string>(j, "kind", ""));
    if (j.contains("params"))
        c.params = parse_params(j.at("params"), "params", c.params);
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, "sweep", {"variable", "values", "snr_db", "ratio_db"});
        if (s.contains("variable")) {
            const auto v = get<std::string>(s, "variable", "sweep");
            if (v == "ratio_db")
                c.sweep.variable = SweepVariable::ratio_db;
            else if (v == "snr_db")
                c.sweep.variable = SweepVariable::snr_db;
            else
                throw ConfigError("sweep.variable: must be 'ratio_db' or 'snr_db'");
        }
        if (s.contains("values"))
            c.sweep.values = get<std::vector<double>>(s, "values", "sweep");
        if (s.contains("snr_db"))
            c.sweep.snr_db = get<double>(s, "snr_db", "sweep");
        if (s.contains("ratio_db"))
            c.sweep.ratio_db = get<double>(s, "ratio_db", "sweep");
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, "grid", {"x_min", "x_max", "points"});
        if (g.contains("x_min"))
            c.grid.x_min = get<double>(g, "x_min", "grid");
        if (g.contains("x_max"))
            c.grid.x_max = get<double>(g, "x_max", "grid");
        if (g.contains("points"))
            c.grid.points = get<int>(g, "points", "grid");
    }
    if (j.contains("support_mode"))
        c.support_mode = get<std::string>(j, "support_mode", "");
    if (j.contains("m_values"))
        c.m_values = get<std::vector<int>>(j, "m_values", "");
    if (j.contains("p_values"))
        c.p_values = get<std::vector<int>>(j, "p_values", "");
    if (j.contains("n_values"))
        c.n_values = get<std::vector<int>>(j, "n_values", "");
    if (j.contains("iid_reference"))
        c.iid_reference = get<bool>(j, "iid_reference", "");
    if (j.contains("trials"))
        c.trials = get<int>(j, "trials", "");
    if (j.contains("bits"))
        c.bits = get<long long>(j, "bits", "");
    if (j.contains("bins"))
        c.bins = get<int>(j, "bins", "");
    if (j.contains("seed"))
        c.seed = get<std::uint64_t>(j, "seed", "");
    if (j.contains("out"))
        c.out_dir = get<std::string>(j, "out", "");
    validate(c);
    return c;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config file '" + path.string() + "' cannot be opened");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c)
{
    json j{{"scale", c.scale},
           {"kind", to_string(c.kind)},
           {"params", to_json(c.params)},
           {"sweep",
            {{"variable", to_string(c.sweep.variable)},
             {"values", c.sweep.values},
             {"snr_db", c.sweep.snr_db},
             {"ratio_db", c.sweep.ratio_db}}},
           {"grid", {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"points", c.grid.points}}},
           {"support_mode", c.support_mode},
           {"m_values", c.m_values},
           {"p_values", c.p_values},
           {"n_values", c.n_values},
           {"iid_reference", c.iid_reference},
           {"trials", c.trials},
           {"bits", c.bits},
           {"bins", c.bins},
           {"seed", c.seed},
           {"out", c.out_dir}};
    if (!c.preset.empty())
        j["preset"] = c.preset;
    return j;
}

void apply_override(json& j, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set: expected key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* node = &j;
    std::istringstream ks(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ks, part, '.'))
        parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]))
            (*node)[parts[i]] = json::object();
        node = &(*node)[parts[i]];
        if (!node->is_object())
            throw ConfigError("--set " + key + ": '" + parts[i] + "' is not an object");
    }
    // A linear/dB pair cannot both be present.
    const std::string& leaf = parts.back();
    if (leaf.size() > 3 && leaf.substr(leaf.size() - 3) == "_db")
        node->erase(leaf.substr(0, leaf.size() - 3));
    else
        node->erase(leaf + "_db");
    (*node)[leaf] = value;
}

std::vector<std::string> validate(const ExperimentConfig& c)
{
    std::vector<std::string> w;
    try {
        w = c.params.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    auto positive = [](const std::vector<int>& v, const char* key) {
        for (int x : v)
            if (x < 1)
                throw ConfigError(std::string(key) + ": entries must be >= 1");
    };
    positive(c.m_values, "m_values");
    positive(c.p_values, "p_values");
    positive(c.n_values, "n_values");
    if (c.trials < 1)
        throw ConfigError("trials: must be >= 1");
    if (c.bins < 1)
        throw ConfigError("bins: must be >= 1");
    if (!(c.grid.x_min > 0) || !(c.grid.x_max > c.grid.x_min) || c.grid.points < 10)
        throw ConfigError("grid: need 0 < x_min < x_max and points >= 10");
    switch (c.kind) {
    case ExperimentKind::support:
        if (c.support_mode != "onesided" && c.support_mode != "double" && c.support_mode != "distinct")
            throw ConfigError("support_mode: must be onesided, double or distinct");
        if (c.support_mode == "distinct" && c.params.L < 2)
            throw ConfigError("support_mode, params.L: distinct support needs L >= 2");
        break;
    case ExperimentKind::eigen:
        break;
    case ExperimentKind::saturation:
        for (int M : c.m_values)
            if (M < c.params.aoa_count(0))
                throw ConfigError("m_values, params.aoa_counts: physical M=" + std::to_string(M) +
                                  " is below P=" + std::to_string(c.params.aoa_count(0)));
        break;
    case ExperimentKind::ber:
    case ExperimentKind::ber_distinct:
    case ExperimentKind::ber_short:
        if (c.sweep.values.empty())
            throw ConfigError("sweep.values: at least one point required");
        if (c.bits < 10000)
            throw ConfigError("bits: must be >= 10000");
        if (c.kind != ExperimentKind::ber_short && c.params.N <= c.params.K)
            throw ConfigError("params.N, params.K: N must exceed K");
        if (c.kind == ExperimentKind::ber_distinct && c.p_values.empty())
            throw ConfigError("p_values: P4 values required for ber_distinct");
        if (c.kind == ExperimentKind::ber_short) {
            if (c.n_values.empty())
                throw ConfigError("n_values: block lengths required for ber_short");
            for (int N : c.n_values)
                if (N <= c.params.K)
                    throw ConfigError("n_values, params.K: N=" + std::to_string(N) + " must exceed K");
        }
        break;
    }
    return w;
}

std::string config_hash(const ExperimentConfig& c)
{
    // The output location does not change results.
    json j = to_json(c);
    j.erase("out");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace physmimo
