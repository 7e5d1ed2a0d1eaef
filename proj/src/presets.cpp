#include "physmimo/cli.hpp"

namespace physmimo {

namespace {

// Shared spectrum setting: M=400, P=200, N=1000, K=5, L=4, Ps=-10 dB, PI=-16 dB.
SystemParams spectrum_params()
{
    SystemParams p;
    p.M = 400;
    p.K = 5;
    p.L = 4;
    p.N = 1000;
    p.aoa_counts = {200};
    p.Ps = db_to_linear(-10.0);
    p.PI = db_to_linear(-16.0);
    p.spacing_ratio = 2.0;
    return p;
}

std::vector<double> ratio_grid(double lo, double hi, double step)
{
    std::vector<double> v;
    for (double r = lo; r <= hi + 1e-9; r += step)
        v.push_back(r);
    return v;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "intro-saturation", "intro-ratio"};
}

ExperimentConfig preset_config(const std::string& name, const std::string& scale)
{
    if (scale != "desk" && scale != "paper")
        throw ConfigError("scale: must be 'desk' or 'paper', got '" + scale + "'");
    const bool paper = scale == "paper";
    ExperimentConfig c;
    c.preset = name;
    c.scale = scale;
    c.params = spectrum_params();

    if (name == "fig1" || name == "fig2") {
        c.kind = ExperimentKind::support;
        c.support_mode = name == "fig1" ? "onesided" : "double";
        c.p_values = {25, 50, 100, 200, 400, 1000};
    } else if (name == "fig3") {
        c.kind = ExperimentKind::eigen;
        c.trials = paper ? 100 : 20;
    } else if (name == "fig4") {
        c.kind = ExperimentKind::saturation;
        c.params.aoa_counts = {100};
        c.m_values = {200, 400, 600};
        c.trials = paper ? 1000 : 500;
    } else if (name == "fig5" || name == "fig6") {
        c.kind = ExperimentKind::eigen;
        c.params.scenario = Scenario::distinct_aoas;
        c.params.aoa_counts = {200, 200, 200, name == "fig5" ? 200 : 20};
        c.trials = paper ? 100 : 20;
    } else if (name == "fig7") {
        c.kind = ExperimentKind::ber;
        c.params.N = 400;
        c.params.spacing_ratio = 0.5;
        c.m_values = {200, 400, 600};
        c.iid_reference = true;
        c.sweep.snr_db = -5.0;
        c.sweep.values = ratio_grid(-18.0, 0.0, 3.0);
        c.bits = paper ? 1000000 : 100000;
    } else if (name == "fig8") {
        c.kind = ExperimentKind::ber_distinct;
        c.params.scenario = Scenario::distinct_aoas;
        c.params.N = 400;
        c.params.M = paper ? 400 : 200;
        c.params.aoa_counts = {100, 100, 100, 100};
        c.p_values = {10, 20, 50, 100};
        c.sweep.snr_db = -5.0;
        c.sweep.values = ratio_grid(-18.0, 0.0, 3.0);
        c.bits = paper ? 1000000 : 100000;
    } else if (name == "fig9") {
        c.kind = ExperimentKind::ber_short;
        c.params.scenario = Scenario::iid;
        c.params.K = 15;
        c.params.N = 120;
        c.params.M = paper ? 400 : 200;
        c.n_values = {30, 60, 120};
        c.sweep.snr_db = 0.0;
        c.sweep.values = ratio_grid(-18.0, 0.0, 3.0);
        c.bits = paper ? 1000000 : 100000;
    } else if (name == "intro-saturation") {
        c.kind = ExperimentKind::ber;
        c.params.N = 400;
        c.params.spacing_ratio = 0.5;
        c.params.aoa_counts = {50};
        c.m_values = {100, 200, 400};
        c.sweep.snr_db = -5.0;
        c.sweep.values = ratio_grid(-15.0, -3.0, 3.0);
        c.bits = paper ? 1000000 : 100000;
    } else if (name == "intro-ratio") {
        c.kind = ExperimentKind::ber;
        c.params.M = paper ? 200 : 100;
        c.params.L = 2;
        c.params.N = 400;
        c.params.spacing_ratio = 0.5;
        c.p_values = {25, 50, 100, 200};
        c.iid_reference = true;
        c.sweep.snr_db = 0.0;
        c.sweep.values = ratio_grid(-15.0, 0.0, 3.0);
        c.bits = paper ? 1000000 : 100000;
    } else {
        std::string all;
        for (const auto& n : preset_names())
            all += (all.empty() ? "" : ", ") + n;
        throw ConfigError("preset: unknown preset '" + name + "' (known: " + all + ")");
    }
    return c;
}

} // namespace physmimo
