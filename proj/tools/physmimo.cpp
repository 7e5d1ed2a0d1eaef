#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "physmimo/cli.hpp"

using namespace physmimo;
using nlohmann::json;

namespace {

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("params file '" + path + "' cannot be opened");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("params file '" + path + "': " + e.what());
    }
}

// A params file is either a bare params object or a config with a "params" key.
SystemParams load_params(const std::string& path)
{
    const json j = read_json(path);
    SystemParams p = j.contains("params") ? parse_params(j.at("params")) : parse_params(j);
    p.validate();
    return p;
}

json complex_json(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

int cmd_run(const std::string& preset, const std::string& config, const std::string& scale, const std::string& out,
            const std::optional<std::uint64_t>& seed, const std::vector<std::string>& sets)
{
    json j = json::object();
    if (!config.empty())
        j = read_json(config);
    if (!preset.empty())
        j["preset"] = preset;
    if (!scale.empty())
        j["scale"] = scale;
    if (seed)
        j["seed"] = *seed;
    if (!out.empty())
        j["out"] = out;
    for (const auto& s : sets)
        apply_override(j, s);
    const ExperimentConfig c = parse_config(j);
    std::cerr << "config " << config_hash(c) << ": " << to_json(c).dump() << "\n";
    const ResultEnvelope env = run_experiment(c);
    for (const auto& w : env.warnings)
        std::cerr << "warning: " << w << "\n";
    const auto files = write_outputs(env, c.out_dir);
    for (const auto& f : files)
        std::cout << f.string() << "\n";
    std::cerr << "done in " << env.wall_clock_s << " s\n";
    return 0;
}

int cmd_support(const std::string& mode, const std::string& params, const std::string& component)
{
    const SystemParams p = load_params(params);
    SpectralSupport s;
    json extra = json::object();
    if (mode == "onesided") {
        const bool sig = component == "signal";
        if (!sig && component != "interference")
            throw ConfigError("--component: must be signal or interference");
        if (!sig && p.L < 2)
            throw ConfigError("--component interference needs L >= 2");
        s = sig ? support_onesided({p.Ps, p.K, p.M, p.N, p.aoa_count(0)})
                : support_onesided({p.PI, p.K * (p.L - 1), p.M, p.N, p.aoa_count(0)});
    } else if (mode == "double") {
        const DoubleSidedSupport d = support_double_sided({p.K, p.L, p.M, p.N, p.aoa_count(0), p.Ps, p.PI});
        s = d.support;
        extra["validity"] = {{"ratio_linear_cubic", d.validity.ratio_linear_cubic},
                             {"ratio_linear_quadratic", d.validity.ratio_linear_quadratic},
                             {"suspect", d.validity.suspect}};
    } else if (mode == "distinct") {
        s = support_distinct(p.K, p.L, p.M, p.N, p.aoa_count(p.L - 1), p.PI);
    } else {
        throw ConfigError("--mode: must be onesided, double or distinct");
    }
    json iv = json::array(), ivs = json::array();
    for (const auto& [lo, hi] : s.intervals) {
        iv.push_back({lo, hi});
        ivs.push_back({lo * p.N, hi * p.N});
    }
    json out{{"mode", mode},
             {"intervals", iv},
             {"intervals_scaled_by_N", ivs},
             {"coverage_complete", s.coverage_complete},
             {"warnings", s.warnings}};
    out.update(extra);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_stieltjes(const std::string& law, double re, double im, const std::string& params,
                  const std::optional<double>& beta)
{
    const SystemParams p = load_params(params);
    const cd s(re, im);
    json out{{"law", law}, {"s", complex_json(s)}};
    const double KL = static_cast<double>(p.K) * p.L;
    if (law == "mp") {
        const double b = beta ? *beta : static_cast<double>(p.K) / p.aoa_count(0);
        out["beta"] = b;
        out["G"] = complex_json(mp_stieltjes(s, b));
    } else if (law == "onesided") {
        const StieltjesEval e = stieltjes_onesided(s, {p.Ps, p.K, p.M, p.N, p.aoa_count(0)});
        out["G"] = complex_json(e.G);
        out["residual"] = e.residual;
    } else if (law == "iid") {
        const StieltjesEval e = stieltjes_iid_limit(s, p.Ps, KL / p.M, KL / p.N);
        out["G"] = complex_json(e.G);
        out["residual"] = e.residual;
    } else if (law == "double") {
        const StieltjesEval e = stieltjes_double_sided(s, {p.K, p.L, p.M, p.N, p.aoa_count(0), p.Ps, p.PI});
        out["G"] = complex_json(e.G);
        out["residual"] = e.residual;
        out["iterations"] = e.iterations;
    } else if (law == "two_mass") {
        out["G"] = complex_json(two_mass_stieltjes(s, p.Ps, p.PI, p.L));
    } else if (law == "mixture") {
        std::vector<int> counts;
        for (int i = 1; i < p.L; ++i)
            counts.push_back(p.aoa_count(i));
        if (counts.empty())
            throw ConfigError("law mixture: needs L >= 2");
        out["G"] = complex_json(mixture_stieltjes(s, mixture_from_counts(p.K, counts)));
    } else {
        throw ConfigError("--law: must be mp, onesided, iid, double, two_mass or mixture");
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Physical-channel massive MIMO spectra and subspace estimation experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset or config file and write results");
    std::string preset, config, scale, out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
    run->add_option("--preset", preset, "fig1..fig9, intro-saturation, intro-ratio");
    run->add_option("--config", config, "JSON config file");
    run->add_option("--scale", scale, "desk or paper");
    run->add_option("--out", out, "output directory");
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--set", sets, "override a config key, e.g. params.M=200");

    auto* sup = app.add_subcommand("support", "Print the spectral support for a parameter file");
    std::string mode = "double", params, component = "signal";
    sup->add_option("--mode", mode, "onesided, double or distinct");
    sup->add_option("--params", params, "JSON params file")->required();
    sup->add_option("--component", component, "onesided component: signal or interference");

    auto* st = app.add_subcommand("stieltjes", "Evaluate a Stieltjes transform");
    std::string law;
    double re = 0.0, im = 0.0;
    std::optional<double> beta;
    std::string sparams;
    st->add_option("--law", law, "mp, onesided, iid, double, two_mass, mixture")->required();
    st->add_option("--s-re", re, "real part of s")->required();
    st->add_option("--s-im", im, "imaginary part of s")->required();
    st->add_option("--params", sparams, "JSON params file")->required();
    st->add_option("--beta", beta, "MP ratio (default K/P)");

    auto* cfg = app.add_subcommand("config", "Print the resolved config of a preset");
    std::string cpreset, cscale = "desk";
    cfg->add_option("--preset", cpreset, "preset name")->required();
    cfg->add_option("--scale", cscale, "desk or paper");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            if (preset.empty() && config.empty())
                throw ConfigError("run: give --preset or --config");
            return cmd_run(preset, config, scale, out, seed, sets);
        }
        if (*sup)
            return cmd_support(mode, params, component);
        if (*st)
            return cmd_stieltjes(law, re, im, sparams, beta);
        if (*cfg) {
            std::cout << to_json(preset_config(cpreset, cscale)).dump(2) << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
