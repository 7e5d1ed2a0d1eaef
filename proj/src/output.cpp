#include "physmimo/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace physmimo {

using nlohmann::json;

namespace {

json intervals_json(const SpectralSupport& s)
{
    json a = json::array();
    for (const auto& iv : s.intervals)
        a.push_back({iv.first, iv.second});
    return a;
}

json eigen_json(const EigenExperimentResult& r)
{
    json j;
    j["trials"] = r.trials;
    j["eigenvalues"] = r.eigenvalues;
    j["histogram"] = {{"edges", r.histogram.edges}, {"density", r.histogram.density}};
    json sup = json::array();
    for (const auto& s : r.supports)
        sup.push_back({{"label", s.label},
                       {"intervals", intervals_json(s.support)},
                       {"coverage", support_coverage(r.pooled(), s.support)},
                       {"coverage_dilated_5pct", support_coverage(r.pooled(), s.support, 0.05)}});
    j["supports"] = sup;
    const auto sig = r.signal_bulk(), intf = r.interference_bulk();
    json summary{{"signal_median", sig.empty() ? 0.0 : median(sig)}};
    if (!intf.empty())
        summary["interference_median"] = median(intf);
    j["summary"] = summary;
    return j;
}

json ber_json(const BerResult& r)
{
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"x", p.x},
                       {"scheme", to_string(p.scheme)},
                       {"ber", p.ber},
                       {"ci_lo", p.ci_lo},
                       {"ci_hi", p.ci_hi},
                       {"bits", p.bits},
                       {"errors", p.errors},
                       {"blocks", p.blocks}});
    return {{"tag", r.tag}, {"variable", to_string(r.variable)}, {"params", to_json(r.params)}, {"points", pts}};
}

std::string tag_of(const std::vector<std::string>& parts, const std::string& fallback)
{
    std::string t;
    for (const auto& p : parts)
        t += (t.empty() ? "" : ",") + p;
    return t.empty() ? fallback : t;
}

json run_support(const ExperimentConfig& c, std::vector<std::string>& warnings)
{
    const SystemParams& p = c.params;
    std::vector<int> Ps = c.p_values;
    if (Ps.empty())
        Ps = {p.aoa_count(0)};
    json entries = json::array();
    auto push = [&](int P, const std::string& label, const SpectralSupport& s, const json& extra) {
        const SpectralSupport sc = s.scaled(p.N);
        json e{{"P", P}, {"label", label}, {"intervals", intervals_json(sc)}, {"warnings", s.warnings}};
        e.update(extra);
        for (const auto& w : s.warnings)
            warnings.push_back("P=" + std::to_string(P) + " " + label + ": " + w);
        entries.push_back(e);
    };
    for (int P : Ps) {
        if (c.support_mode == "onesided") {
            push(P, "signal", support_onesided({p.Ps, p.K, p.M, p.N, P}, c.grid), json::object());
            if (p.L > 1)
                push(P, "interference", support_onesided({p.PI, p.K * (p.L - 1), p.M, p.N, P}, c.grid),
                     json::object());
        } else if (c.support_mode == "double") {
            const DoubleSidedSupport d = support_double_sided({p.K, p.L, p.M, p.N, P, p.Ps, p.PI}, c.grid);
            push(P, "double", d.support,
                 {{"validity",
                   {{"ratio_linear_cubic", d.validity.ratio_linear_cubic},
                    {"ratio_linear_quadratic", d.validity.ratio_linear_quadratic},
                    {"suspect", d.validity.suspect}}}});
        } else {
            push(P, "distinct", support_distinct(p.K, p.L, p.M, p.N, P, p.PI, c.grid), json::object());
        }
    }
    return {{"mode", c.support_mode}, {"scale_factor", p.N}, {"entries", entries}};
}

json run_ber_family(const ExperimentConfig& c)
{
    const SystemParams& p = c.params;
    json results = json::array();
    std::vector<int> Ms = c.m_values.empty() ? std::vector<int>{p.M} : c.m_values;
    switch (c.kind) {
    case ExperimentKind::ber: {
        const bool aoa = p.scenario != Scenario::iid;
        std::vector<int> Ps = c.p_values.empty() || !aoa ? std::vector<int>{aoa ? p.aoa_count(0) : 0} : c.p_values;
        for (int M : Ms) {
            for (int P : Ps) {
                SystemParams q = p;
                q.M = M;
                std::vector<std::string> parts;
                if (Ms.size() > 1)
                    parts.push_back("M=" + std::to_string(M));
                if (aoa && Ps.size() > 1) {
                    q.aoa_counts.assign(q.aoa_counts.size(), P);
                    parts.push_back("P=" + std::to_string(P));
                }
                results.push_back(ber_json(run_ber_experiment(q, c.sweep, c.bits, c.seed,
                                                              tag_of(parts, aoa ? "physical" : "iid"))));
            }
        }
        if (c.iid_reference && aoa) {
            for (int M : Ms) {
                SystemParams q = p;
                q.M = M;
                q.scenario = Scenario::iid;
                results.push_back(ber_json(run_ber_experiment(
                    q, c.sweep, c.bits, c.seed, Ms.size() > 1 ? "iid,M=" + std::to_string(M) : "iid")));
            }
        }
        break;
    }
    case ExperimentKind::ber_distinct:
        for (const auto& r : run_distinct_aoa_ber(p, c.p_values, c.sweep, c.bits, c.seed))
            results.push_back(ber_json(r));
        break;
    case ExperimentKind::ber_short:
        for (const auto& r : run_short_coherence_ber(p, c.n_values, c.sweep, c.bits, c.seed))
            results.push_back(ber_json(r));
        break;
    default:
        break;
    }
    return {{"results", results}};
}

} // namespace

json ResultEnvelope::to_json() const
{
    return {{"config", physmimo::to_json(config)},
            {"config_hash", config_hash(config)},
            {"seed", config.seed},
            {"version", version},
            {"wall_clock_s", wall_clock_s},
            {"warnings", warnings},
            {"payload", payload}};
}

ResultEnvelope run_experiment(const ExperimentConfig& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    ResultEnvelope env;
    env.config = c;
    env.warnings = validate(c);
    json payload{{"kind", to_string(c.kind)}};
    switch (c.kind) {
    case ExperimentKind::support:
        payload.update(run_support(c, env.warnings));
        break;
    case ExperimentKind::eigen: {
        EigenOptions opt;
        opt.bins = c.bins;
        opt.grid = c.grid;
        const EigenExperimentResult r = run_eigen_experiment(c.params, c.trials, c.seed, opt);
        env.warnings.insert(env.warnings.end(), r.warnings.begin(), r.warnings.end());
        payload.update(eigen_json(r));
        break;
    }
    case ExperimentKind::saturation: {
        const int P = c.params.aoa_count(0);
        std::vector<int> Ms = c.m_values.empty() ? std::vector<int>{c.params.M} : c.m_values;
        json runs = json::array();
        for (int M : Ms) {
            const SaturationResult r = run_saturation_experiment(P, M, c.params, c.trials, c.seed);
            runs.push_back({{"M_physical", M},
                            {"P", P},
                            {"ks", r.ks},
                            {"physical", r.physical.pooled()},
                            {"reference", r.reference.pooled()}});
        }
        payload["runs"] = runs;
        break;
    }
    default:
        payload.update(run_ber_family(c));
        break;
    }
    env.payload = payload;
    env.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return env;
}

namespace {

std::string num(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string safe(std::string s)
{
    std::string o;
    for (char ch : s) {
        if (ch == '=')
            continue;
        o += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
    }
    return o;
}

bool has_data(const json& p)
{
    for (const char* k : {"entries", "results", "runs", "eigenvalues"})
        if (p.contains(k) && !p.at(k).empty())
            return true;
    return false;
}

} // namespace

std::vector<std::pair<std::string, std::string>> emit_plot_data(const ResultEnvelope& env)
{
    const json& p = env.payload;
    if (p.is_null() || !has_data(p))
        throw ConfigError("no data: result payload is empty, nothing to write");
    std::ostringstream head;
    head << "# config_hash=" << config_hash(env.config) << " seed=" << env.config.seed << "\n";
    std::vector<std::pair<std::string, std::string>> files;
    const std::string kind = p.at("kind");

    if (kind == "support") {
        std::ostringstream os;
        os << head.str() << "P,label,k,lo,hi\n";
        for (const auto& e : p.at("entries")) {
            int k = 0;
            for (const auto& iv : e.at("intervals"))
                os << e.at("P").get<int>() << "," << e.at("label").get<std::string>() << "," << ++k << ","
                   << num(iv[0]) << "," << num(iv[1]) << "\n";
        }
        files.emplace_back("support.csv", os.str());
    } else if (kind == "eigen") {
        const auto edges = p.at("histogram").at("edges").get<std::vector<double>>();
        const auto dens = p.at("histogram").at("density").get<std::vector<double>>();
        // Overlay columns come from the most complete support available.
        json primary;
        for (const char* want : {"double", "distinct", "onesided_signal"})
            for (const auto& s : p.at("supports"))
                if (primary.is_null() && s.at("label") == want)
                    primary = s;
        std::ostringstream os;
        os << head.str() << "bin_center,density";
        const std::size_t nint = primary.is_null() ? 0 : primary.at("intervals").size();
        for (std::size_t k = 1; k <= nint; ++k)
            os << ",support_lo_" << k << ",support_hi_" << k;
        os << "\n";
        for (std::size_t i = 0; i < dens.size(); ++i) {
            os << num(0.5 * (edges[i] + edges[i + 1])) << "," << num(dens[i]);
            for (std::size_t k = 0; k < nint; ++k)
                os << "," << num(primary.at("intervals")[k][0]) << "," << num(primary.at("intervals")[k][1]);
            os << "\n";
        }
        files.emplace_back("histogram.csv", os.str());
        std::ostringstream ov;
        ov << head.str() << "label,k,lo,hi\n";
        for (const auto& s : p.at("supports")) {
            int k = 0;
            for (const auto& iv : s.at("intervals"))
                ov << s.at("label").get<std::string>() << "," << ++k << "," << num(iv[0]) << "," << num(iv[1])
                   << "\n";
        }
        files.emplace_back("supports.csv", ov.str());
    } else if (kind == "saturation") {
        std::ostringstream ks;
        ks << head.str() << "M_physical,P,ks\n";
        for (const auto& r : p.at("runs")) {
            const int M = r.at("M_physical");
            ks << M << "," << r.at("P").get<int>() << "," << num(r.at("ks")) << "\n";
            const auto a = r.at("physical").get<std::vector<double>>();
            const auto b = r.at("reference").get<std::vector<double>>();
            double hi = 0.0;
            for (double v : a)
                hi = std::max(hi, v);
            for (double v : b)
                hi = std::max(hi, v);
            const Histogram ha = make_histogram(a, env.config.bins, 0.0, 1.05 * hi);
            const Histogram hb = make_histogram(b, env.config.bins, 0.0, 1.05 * hi);
            std::ostringstream os;
            os << head.str() << "bin_center,density_physical,density_reference\n";
            for (std::size_t i = 0; i < ha.density.size(); ++i)
                os << num(0.5 * (ha.edges[i] + ha.edges[i + 1])) << "," << num(ha.density[i]) << ","
                   << num(hb.density[i]) << "\n";
            files.emplace_back("histogram_M" + std::to_string(M) + ".csv", os.str());
        }
        files.emplace_back("ks.csv", ks.str());
    } else {
        for (const auto& r : p.at("results")) {
            std::ostringstream os;
            os << head.str() << r.at("variable").get<std::string>() << ",scheme,ber,ci_lo,ci_hi,bits\n";
            for (const auto& pt : r.at("points"))
                os << num(pt.at("x")) << "," << pt.at("scheme").get<std::string>() << "," << num(pt.at("ber")) << ","
                   << num(pt.at("ci_lo")) << "," << num(pt.at("ci_hi")) << "," << pt.at("bits").get<long long>()
                   << "\n";
            files.emplace_back("ber_" + safe(r.at("tag").get<std::string>()) + ".csv", os.str());
        }
    }
    return files;
}

std::vector<std::filesystem::path> write_outputs(const ResultEnvelope& env, const std::filesystem::path& dir)
{
    const auto files = emit_plot_data(env);
    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(dir);
        auto put = [&](const std::filesystem::path& path, const std::string& text) {
            written.push_back(path);
            std::ofstream out(path, std::ios::binary);
            out << text;
            if (!out)
                throw ConfigError("cannot write '" + path.string() + "'");
        };
        put(dir / "result.json", env.to_json().dump(2) + "\n");
        for (const auto& [name, text] : files)
            put(dir / name, text);
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        throw;
    }
    return written;
}

} // namespace physmimo
