#include "flowmem/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "flowmem/csv_io.hpp"
#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"
#include "flowmem/rng.hpp"
#include "flowmem/serialize.hpp"

namespace flowmem {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kTailDisagreement = 0.3;

json path_or_null(const std::optional<fs::path>& p) {
    return p ? json(p->generic_string()) : json(nullptr);
}

std::optional<fs::path> read_path(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return fs::path(j.at(key).get<std::string>());
}

json stamp(const RunConfig& config) { return json{{"config_hash", config_hash(config)}}; }

json read_stage(const RunConfig& config, const ArtifactStore& store, const std::string& name) {
    const std::string text = store.read(name);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("malformed artifact " + store.path(name).string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("config_hash")) {
        throw Error("malformed artifact " + store.path(name).string() + ": no config_hash");
    }
    if (j.at("config_hash").get<std::string>() != config_hash(config)) {
        throw Error("stale artifact " + store.path(name).string() +
                    ": produced under a different config");
    }
    return j;
}

std::string to_text(const auto& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

template <typename T>
T parse_artifact(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw Error("schema error in " + where + ": " + e.what());
    }
}

}  // namespace

std::string version() { return FLOWMEM_VERSION; }

std::vector<RegimeWindow> default_regimes() {
    return {{"tariff", "2018-01-01", "2019-12-31"},
            {"covid", "2020-01-20", "2021-12-31"},
            {"disinflation", "2022-11-01", "2024-10-31"}};
}

void RunConfig::validate() const {
    if (flows_path.empty()) throw Error("config: flows input path is required");
    dfa.validate();
    if (cross_check_order) {
        DfaConfig cross = dfa;
        cross.detrend_order = *cross_check_order;
        cross.validate();
    }
    rolling.validate();
    if (surrogates.count < 1) throw Error("config: surrogate count must be >= 1");
    if (!(tails.tail_fraction > 0.0 && tails.tail_fraction <= 1.0)) {
        throw Error("config: tail_fraction must lie in (0, 1]");
    }
    for (const auto& w : regimes) w.validate();
}

json config_to_json(const RunConfig& c) {
    json kinds = json::array();
    for (auto k : c.surrogates.kinds) kinds.push_back(to_string(k));
    return json{
        {"inputs",
         {{"flows", c.flows_path.generic_string()},
          {"prices", path_or_null(c.prices_path)},
          {"returns", path_or_null(c.returns_path)}}},
        {"dfa", c.dfa},
        {"dfa_cross_check_order", c.cross_check_order ? json(*c.cross_check_order) : json(nullptr)},
        {"rolling", c.rolling},
        {"surrogates", {{"kinds", kinds}, {"count", c.surrogates.count}}},
        {"tails",
         {{"tail_fraction", c.tails.tail_fraction},
          {"min_tail", c.tails.min_tail},
          {"side", to_string(c.tails.side)}}},
        {"regimes", c.regimes},
        {"regression",
         {{"fill_policy", to_string(c.regression.fill_policy)},
          {"robust_se", c.regression.robust_se},
          {"lag_k", c.regression.lag_k}}},
        {"seed", c.seed},
        {"output_dir", c.output_dir.generic_string()},
    };
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        if (j.contains("inputs")) {
            const auto& in = j.at("inputs");
            if (in.contains("flows")) c.flows_path = in.at("flows").get<std::string>();
            c.prices_path = read_path(in, "prices");
            c.returns_path = read_path(in, "returns");
        }
        if (j.contains("dfa")) c.dfa = j.at("dfa").get<DfaConfig>();
        if (j.contains("dfa_cross_check_order")) {
            const auto& v = j.at("dfa_cross_check_order");
            c.cross_check_order = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
        }
        if (j.contains("rolling")) c.rolling = j.at("rolling").get<RollingConfig>();
        if (j.contains("surrogates")) {
            const auto& s = j.at("surrogates");
            if (s.contains("kinds")) {
                c.surrogates.kinds.clear();
                for (const auto& k : s.at("kinds")) {
                    c.surrogates.kinds.push_back(parse_surrogate_kind(k.get<std::string>()));
                }
            }
            c.surrogates.count = s.value("count", c.surrogates.count);
        }
        if (j.contains("tails")) {
            const auto& t = j.at("tails");
            c.tails.tail_fraction = t.value("tail_fraction", c.tails.tail_fraction);
            c.tails.min_tail = t.value("min_tail", c.tails.min_tail);
            if (t.contains("side")) c.tails.side = parse_tail_side(t.at("side").get<std::string>());
        }
        c.regimes = j.contains("regimes") ? j.at("regimes").get<std::vector<RegimeWindow>>()
                                          : default_regimes();
        if (j.contains("regression")) {
            const auto& r = j.at("regression");
            if (r.contains("fill_policy")) {
                c.regression.fill_policy = parse_fill_policy(r.at("fill_policy").get<std::string>());
            }
            c.regression.robust_se = r.value("robust_se", c.regression.robust_se);
            c.regression.lag_k = r.value("lag_k", c.regression.lag_k);
        }
        c.seed = j.value("seed", c.seed);
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return c;
}

std::string serialize_config(const RunConfig& config) { return dump_json(config_to_json(config)); }

json config_for_report(const RunConfig& config) {
    json j = config_to_json(config);
    j.erase("output_dir");
    return j;
}

std::string config_hash(const RunConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_label(dump_json(config_for_report(config)))));
    return buf;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

fs::path resolve_input(const fs::path& p, const fs::path& base_dir) {
    return p.is_absolute() ? p : base_dir / p;
}

ArtifactStore::ArtifactStore(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

void ArtifactStore::write(const std::string& name, const std::string& content) const {
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / (name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string ArtifactStore::read(const std::string& name) const {
    const fs::path p = dir_ / name;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("missing artifact: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ArtifactStore::exists(const std::string& name) const { return fs::exists(dir_ / name); }

std::uint64_t stage_seed(const RunConfig& config, const std::string& label) {
    return derive_seed(config.seed, label);
}

FlowPanel load_panel(const RunConfig& config, const fs::path& base_dir) {
    const auto records = read_flow_records(resolve_input(config.flows_path, base_dir));
    return aggregate_daily(records);
}

std::optional<VolatilitySeries> load_volatility(const RunConfig& config, const fs::path& base_dir) {
    if (config.prices_path) {
        const auto prices = read_dated_series(resolve_input(*config.prices_path, base_dir));
        return squared_return_vol(log_returns({prices.calendar, prices.values}));
    }
    if (config.returns_path) {
        const auto returns = read_dated_series(resolve_input(*config.returns_path, base_dir));
        return squared_return_vol({returns.calendar, returns.values});
    }
    return std::nullopt;
}

void stage_ingest(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store) {
    store.write("flows_panel.csv", to_text([&](std::ostream& o) { write_panel_csv(o, panel); }));
    json groups = json::array();
    for (Group g : panel.groups()) groups.push_back(to_string(g));
    json series = json::array();
    for (const auto& k : panel.keys()) series.push_back(series_id(k));
    json j = stamp(config);
    j["n_days"] = panel.length();
    j["first_date"] = panel.calendar().front();
    j["last_date"] = panel.calendar().back();
    j["groups"] = groups;
    j["series"] = series;
    j["artifacts"] = json::array({"flows_panel.csv"});
    store.write("ingest.json", dump_json(j));
}

void stage_tails(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store) {
    json series = json::object();
    json artifacts = json::array();
    for (const auto& key : panel.keys()) {
        const auto values = panel.values(key);
        const std::string id = series_id(key);
        const auto ccdf = empirical_ccdf(values, config.tails.side);
        const double mu = mean(values);
        const double sd = std::sqrt(population_variance(values));
        std::vector<double> xs;
        xs.reserve(ccdf.points.size());
        for (const auto& p : ccdf.points) xs.push_back(p.x);
        CcdfPoints reference;
        switch (config.tails.side) {
            case TailSide::upper: reference = gaussian_ccdf_reference(mu, sd, xs); break;
            case TailSide::lower: reference = gaussian_ccdf_reference(-mu, sd, xs); break;
            case TailSide::absolute: reference = gaussian_abs_ccdf_reference(mu, sd, xs); break;
        }
        const std::string artifact = "fig2_ccdf_" + id + ".csv";
        store.write(artifact,
                    to_text([&](std::ostream& o) { write_ccdf_csv(o, ccdf, reference); }));
        artifacts.push_back(artifact);

        const auto ols_fit = fit_tail_exponent(values, TailMethod::ccdf_ols, config.tails);
        const auto hill_fit = fit_tail_exponent(values, TailMethod::hill, config.tails);
        series[id] = json{
            {"ccdf_ols", ols_fit},
            {"hill", hill_fit},
            {"disagreement", std::abs(ols_fit.exponent - hill_fit.exponent) > kTailDisagreement},
            {"gaussian_mean", mu},
            {"gaussian_std", sd},
            {"degenerate", ccdf.degenerate},
            {"artifact", artifact},
        };
    }
    json j = stamp(config);
    j["side"] = to_string(config.tails.side);
    j["series"] = series;
    j["artifacts"] = artifacts;
    store.write("tails.json", dump_json(j));
}

void stage_dfa(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store) {
    json series = json::object();
    json artifacts = json::array();
    for (const auto& key : panel.keys()) {
        const auto values = panel.values(key);
        const std::string id = series_id(key);
        const auto result = dfa_analyze(values, config.dfa);
        const std::string artifact = "fig3_dfa_" + id + ".csv";
        store.write(artifact, to_text([&](std::ostream& o) { write_curve_csv(o, result.curve); }));
        artifacts.push_back(artifact);
        json entry{{"fit", result.fit}, {"artifact", artifact}, {"cross_check", nullptr}};
        if (config.cross_check_order) {
            DfaConfig cross = config.dfa;
            cross.detrend_order = *config.cross_check_order;
            entry["cross_check"] = dfa_hurst(values, cross);
        }
        series[id] = entry;
    }
    json j = stamp(config);
    j["dfa"] = config.dfa;
    j["series"] = series;
    j["artifacts"] = artifacts;
    store.write("dfa.json", dump_json(j));
}

void stage_surrogates(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store) {
    json series = json::object();
    json artifacts = json::array();
    for (const auto& key : panel.keys()) {
        const auto values = panel.values(key);
        const std::string id = series_id(key);
        json bands = json::array();
        for (const auto kind : config.surrogates.kinds) {
            SurrogateSpec spec;
            spec.kind = kind;
            spec.count = config.surrogates.count;
            spec.seed = stage_seed(config, "surrogate/" + to_string(kind) + "/" + id);
            const auto band = surrogate_band(values, spec, config.dfa);
            const std::string artifact = "surrogate_" + to_string(kind) + "_" + id + ".csv";
            store.write(artifact, to_text([&](std::ostream& o) {
                            o << "index,H\n";
                            for (std::size_t i = 0; i < band.hurst_values.size(); ++i) {
                                o << i << ',' << format_double(band.hurst_values[i]) << '\n';
                            }
                        }));
            artifacts.push_back(artifact);
            json b = band;
            b["artifact"] = artifact;
            bands.push_back(b);
        }
        series[id] = bands;
    }
    json j = stamp(config);
    j["series"] = series;
    j["artifacts"] = artifacts;
    store.write("surrogates.json", dump_json(j));
}

std::map<SeriesKey, RollingHurst> stage_rolling(const FlowPanel& panel, const RunConfig& config,
                                                const ArtifactStore& store) {
    std::map<SeriesKey, RollingHurst> out;
    json series = json::object();
    json artifacts = json::array();
    for (const auto& key : panel.keys()) {
        const std::string id = series_id(key);
        auto rolling = rolling_hurst(extract_series(panel, key), config.rolling, config.dfa);
        const std::string artifact = "fig4_rolling_" + id + ".csv";
        store.write(artifact, to_text([&](std::ostream& o) { write_rolling_csv(o, rolling); }));
        artifacts.push_back(artifact);
        const auto gaps = static_cast<std::size_t>(std::count_if(
            rolling.entries.begin(), rolling.entries.end(), [](const auto& e) { return e.is_gap(); }));
        series[id] = json{{"artifact", artifact},
                          {"entries", rolling.entries.size()},
                          {"gaps", gaps},
                          {"regimes", regime_summary(rolling, config.regimes)}};
        out.emplace(key, std::move(rolling));
    }
    json j = stamp(config);
    j["rolling"] = config.rolling;
    j["series"] = series;
    j["artifacts"] = artifacts;
    store.write("rolling.json", dump_json(j));
    return out;
}

std::map<SeriesKey, RollingHurst> load_rolling_artifacts(const RunConfig& config,
                                                         const ArtifactStore& store) {
    const json index = read_stage(config, store, "rolling.json");
    std::map<SeriesKey, RollingHurst> out;
    for (const auto& [id, entry] : index.at("series").items()) {
        const auto key = parse_series_id(id);
        if (!key) throw Error("rolling.json: unknown series '" + id + "'");
        const std::string artifact = entry.at("artifact").get<std::string>();
        std::istringstream in(store.read(artifact));
        out.emplace(*key, read_rolling_csv(in, *key, config.rolling, store.path(artifact).string()));
    }
    return out;
}

void stage_regression(const std::map<SeriesKey, RollingHurst>& rolling,
                      const std::optional<VolatilitySeries>& volatility, const RunConfig& config,
                      const ArtifactStore& store) {
    json j = stamp(config);
    if (!volatility) {
        j["status"] = "skipped: no price or return input";
        j["series"] = json::object();
        j["table"] = json::object();
        j["artifacts"] = json::array();
        store.write("regression.json", dump_json(j));
        return;
    }

    const AlignOptions align{config.regression.fill_policy, config.regression.lag_k};
    json series = json::object();
    json table = json::object();
    std::ostringstream csv;
    csv << "group,flow,term,estimate,t_value,stars,robust_t_value,n,r2\n";
    for (const auto& [key, roll] : rolling) {
        const auto pairs = align_h_rv(roll, *volatility, align);
        const auto fit = ols(pairs.rv, pairs.hurst);
        const double dof = static_cast<double>(fit.n) - 2.0;
        const double t_a = config.regression.robust_se ? fit.robust_t_alpha : fit.t_alpha;
        const double t_b = config.regression.robust_se ? fit.robust_t_beta : fit.t_beta;
        const std::string stars_a = significance_stars(t_a, dof);
        const std::string stars_b = significance_stars(t_b, dof);
        series[series_id(key)] = json{{"ols", fit}, {"stars_alpha", stars_a}, {"stars_beta", stars_b}};
        table[std::string(to_string(key.group))][std::string(to_string(key.flow))] = json{
            {"constant", {{"estimate", fit.alpha}, {"t", t_a}, {"stars", stars_a}}},
            {"hurst", {{"estimate", fit.beta}, {"t", t_b}, {"stars", stars_b}}},
        };
        const std::string g(to_string(key.group));
        const std::string f(to_string(key.flow));
        csv << g << ',' << f << ",constant," << format_double(fit.alpha) << ','
            << format_double(fit.t_alpha) << ',' << stars_a << ','
            << format_double(fit.robust_t_alpha) << ',' << fit.n << ','
            << format_double(fit.r_squared) << '\n';
        csv << g << ',' << f << ",hurst," << format_double(fit.beta) << ','
            << format_double(fit.t_beta) << ',' << stars_b << ','
            << format_double(fit.robust_t_beta) << ',' << fit.n << ','
            << format_double(fit.r_squared) << '\n';
    }
    store.write("table1_regression.csv", csv.str());
    j["status"] = "ok";
    j["standard_errors"] = config.regression.robust_se ? "hc1" : "classical";
    j["series"] = series;
    j["table"] = table;
    j["artifacts"] = json::array({"table1_regression.csv"});
    store.write("regression.json", dump_json(j));
}

json report_to_json(const RunReport& report) {
    json series = json::object();
    for (const auto& [key, s] : report.series) {
        json entry{
            {"dfa", s.dfa},
            {"dfa_cross_check", s.dfa_cross_check ? json(*s.dfa_cross_check) : json(nullptr)},
            {"surrogates", s.surrogates},
            {"tails",
             {{"ccdf_ols", s.tail_ccdf_ols},
              {"hill", s.tail_hill},
              {"methods_disagree", s.tail_methods_disagree}}},
            {"rolling",
             {{"artifact", s.rolling_artifact},
              {"entries", s.rolling_entries},
              {"gaps", s.rolling_gaps}}},
            {"regimes", s.regimes},
            {"regression", nullptr},
        };
        if (s.regression) {
            entry["regression"] = json{{"ols", s.regression->ols},
                                       {"stars_alpha", s.regression->stars_alpha},
                                       {"stars_beta", s.regression->stars_beta}};
        }
        series[series_id(key)] = entry;
    }
    return json{
        {"provenance",
         {{"toolkit", report.provenance.toolkit},
          {"version", report.provenance.version},
          {"config_hash", report.provenance.config_hash},
          {"seed", report.provenance.seed},
          {"generator", report.provenance.generator}}},
        {"config", config_for_report(report.config)},
        {"ingest", report.ingest},
        {"regression_status", report.regression_status},
        {"series", series},
        {"artifacts", report.artifacts},
    };
}

RunReport assemble_report(const RunConfig& config, const ArtifactStore& store) {
    const std::vector<std::string> stages{"ingest.json",     "tails.json",   "dfa.json",
                                          "surrogates.json", "rolling.json", "regression.json"};
    std::map<std::string, json> docs;
    for (const auto& name : stages) docs[name] = read_stage(config, store, name);

    RunReport report;
    report.config = config;
    report.provenance.version = version();
    report.provenance.config_hash = config_hash(config);
    report.provenance.seed = config.seed;
    report.provenance.generator = std::string(kGeneratorName);

    report.ingest = docs["ingest.json"];
    report.ingest.erase("config_hash");
    report.ingest.erase("artifacts");

    std::set<std::string> artifacts(stages.begin(), stages.end());
    for (const auto& name : stages) {
        for (const auto& a : docs[name].at("artifacts")) artifacts.insert(a.get<std::string>());
    }
    for (const auto& a : artifacts) {
        if (!store.exists(a)) throw Error("missing artifact: " + store.path(a).string());
    }
    report.artifacts.assign(artifacts.begin(), artifacts.end());

    for (const auto& id_json : docs["ingest.json"].at("series")) {
        const std::string id = id_json.get<std::string>();
        const auto key = parse_series_id(id);
        if (!key) throw Error("ingest.json: unknown series '" + id + "'");
        auto section = [&](const std::string& stage) -> const json& {
            const auto& s = docs[stage].at("series");
            if (!s.contains(id)) throw Error("missing artifact: " + stage + " has no entry for " + id);
            return s.at(id);
        };

        SeriesReport sr;
        const auto& dfa = section("dfa.json");
        sr.dfa = parse_artifact<DfaFit>(dfa.at("fit"), "dfa.json");
        if (!dfa.at("cross_check").is_null()) {
            sr.dfa_cross_check = parse_artifact<DfaFit>(dfa.at("cross_check"), "dfa.json");
        }
        for (const auto& b : section("surrogates.json")) {
            sr.surrogates.push_back(parse_artifact<SurrogateBand>(b, "surrogates.json"));
        }
        const auto& tails = section("tails.json");
        sr.tail_ccdf_ols = parse_artifact<TailFit>(tails.at("ccdf_ols"), "tails.json");
        sr.tail_hill = parse_artifact<TailFit>(tails.at("hill"), "tails.json");
        sr.tail_methods_disagree = tails.at("disagreement").get<bool>();
        const auto& roll = section("rolling.json");
        sr.rolling_artifact = roll.at("artifact").get<std::string>();
        sr.rolling_entries = roll.at("entries").get<std::size_t>();
        sr.rolling_gaps = roll.at("gaps").get<std::size_t>();
        sr.regimes = parse_artifact<std::vector<RegimeSummary>>(roll.at("regimes"), "rolling.json");
        const auto& reg = docs["regression.json"].at("series");
        if (reg.contains(id)) {
            RegressionCell cell;
            cell.ols = parse_artifact<OlsResult>(reg.at(id).at("ols"), "regression.json");
            cell.stars_alpha = reg.at(id).at("stars_alpha").get<std::string>();
            cell.stars_beta = reg.at(id).at("stars_beta").get<std::string>();
            sr.regression = cell;
        }
        report.series.emplace(*key, std::move(sr));
    }
    report.regression_status = docs["regression.json"].at("status").get<std::string>();

    store.write("report.json", dump_json(report_to_json(report)));
    return report;
}

RunReport run_pipeline(const RunConfig& config, const fs::path& base_dir) {
    config.validate();
    const fs::path out_dir = config.output_dir;
    fs::create_directories(out_dir);
    const fs::path staging = out_dir / ".staging";
    fs::remove_all(staging);
    const ArtifactStore store(staging);

    std::string stage = "ingest";
    RunReport report;
    try {
        const FlowPanel panel = load_panel(config, base_dir);
        stage_ingest(panel, config, store);
        stage = "tails";
        stage_tails(panel, config, store);
        stage = "dfa";
        stage_dfa(panel, config, store);
        stage = "surrogate";
        stage_surrogates(panel, config, store);
        stage = "rolling";
        const auto rolling = stage_rolling(panel, config, store);
        stage = "regression";
        stage_regression(rolling, load_volatility(config, base_dir), config, store);
        stage = "report";
        report = assemble_report(config, store);
    } catch (const std::exception& e) {
        const fs::path quarantine = out_dir / "quarantine";
        fs::remove_all(quarantine);
        fs::rename(staging, quarantine);
        throw StageError(stage, e.what());
    }

    for (const auto& entry : fs::directory_iterator(staging)) {
        fs::rename(entry.path(), out_dir / entry.path().filename());
    }
    fs::remove_all(staging);
    return report;
}

}  // namespace flowmem
