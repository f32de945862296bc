#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flowmem/csv_io.hpp"
#include "flowmem/dfa.hpp"
#include "flowmem/error.hpp"
#include "flowmem/parallel.hpp"
#include "flowmem/pipeline.hpp"
#include "flowmem/rng.hpp"
#include "flowmem/rolling.hpp"
#include "flowmem/serialize.hpp"
#include "flowmem/stats.hpp"
#include "flowmem/surrogate.hpp"
#include "flowmem/synth.hpp"
#include "flowmem/tails.hpp"

namespace flowmem::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputEnv = "FLOWMEM_OUTPUT_DIR";

/// Options shared by the stage subcommands.
struct StageOptions {
    std::string config;
    std::string flows;
    std::string prices;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

struct ResolvedRun {
    RunConfig config;
    fs::path base_dir;
};

void add_stage_options(CLI::App* cmd, StageOptions& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--flows", o.flows, "flows CSV (overrides the config)");
    cmd->add_option("--prices", o.prices, "prices CSV date,close (overrides the config)");
    cmd->add_option("--out", o.out, "output directory (overrides $FLOWMEM_OUTPUT_DIR and config)");
    cmd->add_option("--seed", o.seed, "run seed (overrides the config)");
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores");
}

ResolvedRun resolve(const StageOptions& o) {
    ResolvedRun run;
    run.base_dir = fs::current_path();
    if (!o.config.empty()) {
        run.config = load_config(o.config);
        run.base_dir = fs::absolute(o.config).parent_path();
    } else {
        run.config.regimes = default_regimes();
    }
    if (!o.flows.empty()) run.config.flows_path = fs::absolute(o.flows);
    if (!o.prices.empty()) run.config.prices_path = fs::absolute(o.prices);
    if (o.seed) run.config.seed = *o.seed;
    if (!o.out.empty()) {
        run.config.output_dir = o.out;
    } else if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
        run.config.output_dir = env;
    }
    run.config.validate();
    set_max_threads(o.threads);
    return run;
}

/// The flow panel for a stage: the ingest artifact when it was produced
/// under the same config, otherwise the flows CSV.
FlowPanel stage_panel(const ResolvedRun& run, const ArtifactStore& store) {
    if (store.exists("ingest.json") && store.exists("flows_panel.csv")) {
        const auto ingest = nlohmann::json::parse(store.read("ingest.json"));
        if (ingest.value("config_hash", "") == config_hash(run.config)) {
            return read_panel_csv(store.path("flows_panel.csv"));
        }
    }
    return load_panel(run.config, run.base_dir);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

template <typename Writer>
std::string render(Writer&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

std::vector<double> read_values(const std::string& path) { return read_dated_series(fs::path(path)).values; }

struct DfaOptions {
    int order = 2;
    int n_min = 8;
    double fraction = 0.25;
    int scales = 20;
    int min_blocks = 4;

    DfaConfig config() const { return {order, n_min, fraction, scales, min_blocks}; }
};

void add_dfa_options(CLI::App* cmd, DfaOptions& o) {
    cmd->add_option("--order", o.order, "detrending order m")->capture_default_str();
    cmd->add_option("--n-min", o.n_min, "smallest scale")->capture_default_str();
    cmd->add_option("--n-max-fraction", o.fraction, "largest scale as a fraction of T")
        ->capture_default_str();
    cmd->add_option("--scales", o.scales, "number of log-spaced scales")->capture_default_str();
    cmd->add_option("--min-blocks", o.min_blocks, "minimum blocks per scale")->capture_default_str();
}

void print_run_summary(const RunReport& report, const fs::path& out_dir) {
    std::cout << "series               H(m=" << report.config.dfa.detrend_order << ")";
    if (report.config.cross_check_order) std::cout << "  H(m=" << *report.config.cross_check_order << ")";
    std::cout << "  shuffle   tail(ols)  tail(hill)\n";
    std::cout << std::fixed << std::setprecision(3);
    for (const auto& [key, s] : report.series) {
        std::cout << std::left << std::setw(20) << series_id(key) << std::right << std::setw(8)
                  << s.dfa.hurst;
        if (s.dfa_cross_check) std::cout << std::setw(8) << s.dfa_cross_check->hurst;
        double shuffled = 0.0;
        for (const auto& b : s.surrogates) {
            if (b.spec.kind == SurrogateKind::shuffle) shuffled = b.mean;
        }
        std::cout << std::setw(9) << shuffled << std::setw(11) << s.tail_ccdf_ols.exponent
                  << std::setw(12) << s.tail_hill.exponent << '\n';
    }
    std::cout << "regression: " << report.regression_status << '\n';
    std::cout << "report: " << (out_dir / "report.json").string() << '\n';
}

// ---- subcommands ------------------------------------------------------------

void add_run(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto* cmd = app.add_subcommand("run", "run every stage and write the report");
    add_stage_options(cmd, *o);
    cmd->callback([o] {
        const auto run = resolve(*o);
        const auto report = run_pipeline(run.config, run.base_dir);
        print_run_summary(report, run.config.output_dir);
    });
}

void add_ingest_check(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto* cmd = app.add_subcommand("ingest-check", "parse and aggregate the flows CSV");
    add_stage_options(cmd, *o);
    cmd->callback([o] {
        const auto run = resolve(*o);
        const FlowPanel panel = load_panel(run.config, run.base_dir);
        const ArtifactStore store(run.config.output_dir);
        stage_ingest(panel, run.config, store);
        std::cout << "ok: " << panel.length() << " trading days, " << panel.calendar().front()
                  << " .. " << panel.calendar().back() << ", groups:";
        for (Group g : panel.groups()) std::cout << ' ' << to_string(g);
        std::cout << '\n';
    });
}

void add_dfa(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto d = std::make_shared<DfaOptions>();
    auto input = std::make_shared<std::string>();
    auto curve_out = std::make_shared<std::string>();
    auto fit_out = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("dfa", "static DFA: one series (--input) or the panel stage");
    add_stage_options(cmd, *o);
    add_dfa_options(cmd, *d);
    cmd->add_option("--input", *input, "single series CSV date,value");
    cmd->add_option("--curve-out", *curve_out, "write n,F for --input");
    cmd->add_option("--fit-out", *fit_out, "write the fit JSON for --input instead of stdout");
    cmd->callback([=] {
        if (!input->empty()) {
            set_max_threads(o->threads);
            const auto result = dfa_analyze(read_values(*input), d->config());
            if (!curve_out->empty()) {
                emit(render([&](std::ostream& s) { write_curve_csv(s, result.curve); }), *curve_out);
            }
            emit(dump_json(nlohmann::json(result.fit)), *fit_out);
            return;
        }
        const auto run = resolve(*o);
        const ArtifactStore store(run.config.output_dir);
        stage_dfa(stage_panel(run, store), run.config, store);
        std::cout << "wrote " << store.path("dfa.json").string() << '\n';
    });
}

void add_roll(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto d = std::make_shared<DfaOptions>();
    auto input = std::make_shared<std::string>();
    auto csv_out = std::make_shared<std::string>();
    auto window = std::make_shared<std::size_t>(250);
    auto step = std::make_shared<std::size_t>(5);
    auto* cmd = app.add_subcommand("roll", "rolling DFA: one series (--input) or the panel stage");
    add_stage_options(cmd, *o);
    add_dfa_options(cmd, *d);
    cmd->add_option("--input", *input, "single series CSV date,value");
    cmd->add_option("--window", *window, "window length W (trading days)")->capture_default_str();
    cmd->add_option("--step", *step, "step s (trading days)")->capture_default_str();
    cmd->add_option("--csv-out", *csv_out, "write end_date,H,stderr,r2 here instead of stdout");
    cmd->callback([=] {
        if (!input->empty()) {
            set_max_threads(o->threads);
            const auto series = read_dated_series(fs::path(*input));
            const auto rolling = rolling_hurst(series.values, series.calendar,
                                               RollingConfig{*window, *step}, d->config());
            emit(render([&](std::ostream& s) { write_rolling_csv(s, rolling); }), *csv_out);
            return;
        }
        const auto run = resolve(*o);
        const ArtifactStore store(run.config.output_dir);
        stage_rolling(stage_panel(run, store), run.config, store);
        std::cout << "wrote " << store.path("rolling.json").string() << '\n';
    });
}

void add_surrogate(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto d = std::make_shared<DfaOptions>();
    auto input = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>("shuffle");
    auto count = std::make_shared<std::size_t>(50);
    auto* cmd = app.add_subcommand("surrogate", "surrogate H band: one series (--input) or the panel stage");
    add_stage_options(cmd, *o);
    add_dfa_options(cmd, *d);
    cmd->add_option("--input", *input, "single series CSV date,value");
    cmd->add_option("--kind", *kind, "shuffle | phase_randomize")->capture_default_str();
    cmd->add_option("--count", *count, "number of surrogates")->capture_default_str();
    cmd->callback([=] {
        if (!input->empty()) {
            set_max_threads(o->threads);
            SurrogateSpec spec{parse_surrogate_kind(*kind), o->seed.value_or(1), *count};
            const auto band = surrogate_band(read_values(*input), spec, d->config());
            std::cout << dump_json(nlohmann::json(band));
            return;
        }
        const auto run = resolve(*o);
        const ArtifactStore store(run.config.output_dir);
        stage_surrogates(stage_panel(run, store), run.config, store);
        std::cout << "wrote " << store.path("surrogates.json").string() << '\n';
    });
}

void add_tails(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto input = std::make_shared<std::string>();
    auto method = std::make_shared<std::string>("hill");
    auto side = std::make_shared<std::string>("upper");
    auto fraction = std::make_shared<double>(0.05);
    auto min_tail = std::make_shared<std::size_t>(10);
    auto ccdf_out = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("tails", "CCDF and tail exponent: one series (--input) or the panel stage");
    add_stage_options(cmd, *o);
    cmd->add_option("--input", *input, "single series CSV date,value");
    cmd->add_option("--method", *method, "ccdf_ols | hill")->capture_default_str();
    cmd->add_option("--side", *side, "upper | lower | absolute")->capture_default_str();
    cmd->add_option("--tail-fraction", *fraction, "fraction of observations in the tail")
        ->capture_default_str();
    cmd->add_option("--min-tail", *min_tail, "minimum tail size")->capture_default_str();
    cmd->add_option("--ccdf-out", *ccdf_out, "write x,p_empirical,p_gaussian for --input");
    cmd->callback([=] {
        if (!input->empty()) {
            const auto values = read_values(*input);
            const TailOptions options{*fraction, *min_tail, parse_tail_side(*side)};
            if (!ccdf_out->empty()) {
                const auto ccdf = empirical_ccdf(values, options.side);
                std::vector<double> xs;
                for (const auto& p : ccdf.points) xs.push_back(p.x);
                const auto tv = tail_values(values, options.side);
                double mu = 0.0, sd = 0.0;
                {
                    double s = 0.0;
                    for (double v : values) s += v;
                    mu = s / static_cast<double>(values.size());
                    double ss = 0.0;
                    for (double v : values) ss += (v - mu) * (v - mu);
                    sd = std::sqrt(ss / static_cast<double>(values.size()));
                }
                const auto reference = options.side == TailSide::absolute
                                           ? gaussian_abs_ccdf_reference(mu, sd, xs)
                                           : gaussian_ccdf_reference(
                                                 options.side == TailSide::lower ? -mu : mu, sd, xs);
                emit(render([&](std::ostream& s) { write_ccdf_csv(s, ccdf, reference); }), *ccdf_out);
            }
            const auto fit = fit_tail_exponent(values, parse_tail_method(*method), options);
            std::cout << dump_json(nlohmann::json(fit));
            return;
        }
        const auto run = resolve(*o);
        const ArtifactStore store(run.config.output_dir);
        stage_tails(stage_panel(run, store), run.config, store);
        std::cout << "wrote " << store.path("tails.json").string() << '\n';
    });
}

void add_regress(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto rolling_csv = std::make_shared<std::string>();
    auto returns = std::make_shared<std::string>();
    auto policy = std::make_shared<std::string>("forward_fill");
    auto lag = std::make_shared<std::size_t>(0);
    auto step = std::make_shared<std::size_t>(5);
    auto* cmd = app.add_subcommand("regress", "RV_t = alpha + beta H_t: one rolling CSV or the panel stage");
    add_stage_options(cmd, *o);
    cmd->add_option("--rolling", *rolling_csv, "single rolling CSV end_date,H,stderr,r2");
    cmd->add_option("--returns", *returns, "returns CSV date,return (instead of --prices)");
    cmd->add_option("--fill-policy", *policy, "forward_fill | step_dates_only")->capture_default_str();
    cmd->add_option("--lag", *lag, "pair H_t with RV_{t+lag}")->capture_default_str();
    cmd->add_option("--step", *step, "rolling step of --rolling")->capture_default_str();
    cmd->callback([=] {
        if (!rolling_csv->empty()) {
            std::ifstream in(*rolling_csv);
            if (!in) throw Error("cannot open " + *rolling_csv);
            const auto rolling =
                read_rolling_csv(in, SeriesKey{}, RollingConfig{250, *step}, *rolling_csv);
            VolatilitySeries rv;
            if (!o->prices.empty()) {
                const auto p = read_dated_series(fs::path(o->prices));
                rv = squared_return_vol(log_returns({p.calendar, p.values}));
            } else if (!returns->empty()) {
                const auto r = read_dated_series(fs::path(*returns));
                rv = squared_return_vol({r.calendar, r.values});
            } else {
                throw Error("regress --rolling needs --prices or --returns");
            }
            const auto pairs = align_h_rv(rolling, rv, {parse_fill_policy(*policy), *lag});
            const auto fit = ols(pairs.rv, pairs.hurst);
            const double dof = static_cast<double>(fit.n) - 2.0;
            nlohmann::json j{{"ols", fit},
                             {"stars_alpha", significance_stars(fit.t_alpha, dof)},
                             {"stars_beta", significance_stars(fit.t_beta, dof)}};
            std::cout << dump_json(j);
            return;
        }
        auto run = resolve(*o);
        if (!returns->empty()) run.config.returns_path = fs::absolute(*returns);
        const ArtifactStore store(run.config.output_dir);
        const auto rolling = load_rolling_artifacts(run.config, store);
        stage_regression(rolling, load_volatility(run.config, run.base_dir), run.config, store);
        std::cout << "wrote " << store.path("regression.json").string() << '\n';
    });
}

void add_report(CLI::App& app) {
    auto o = std::make_shared<StageOptions>();
    auto* cmd = app.add_subcommand("report", "assemble report.json from stage artifacts");
    add_stage_options(cmd, *o);
    cmd->callback([o] {
        const auto run = resolve(*o);
        const ArtifactStore store(run.config.output_dir);
        const auto report = assemble_report(run.config, store);
        print_run_summary(report, run.config.output_dir);
    });
}

GroupGenerator parse_group_spec(const std::string& text) {
    // <group>=<kind>[:<param>]
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error("group spec must be <group>=<kind>[:<param>]: " + text);
    const auto group = parse_group(text.substr(0, eq));
    if (!group) throw Error("unknown group in '" + text + "'");
    GroupGenerator g;
    g.group = *group;
    std::string rest = text.substr(eq + 1);
    std::optional<double> param;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
        param = std::stod(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    g.kind = parse_generator_kind(rest);
    if (param) {
        if (g.kind == GeneratorKind::pareto) {
            g.alpha = *param;
        } else {
            g.hurst = *param;
        }
    }
    return g;
}

void add_synth(CLI::App& app) {
    struct Options {
        std::string kind = "fgn";
        double hurst = 0.7;
        double alpha = 2.5;
        std::size_t n = 2500;
        std::uint64_t seed = 1;
        std::string start = "2015-01-02";
        std::string out;
        std::vector<std::string> groups;
        double level = 1.0e9;
        double volatility = 0.5;
        std::string prices_out;
        double price_vol = 0.01;
    };
    auto o = std::make_shared<Options>();
    auto* cmd = app.add_subcommand("synth", "generate synthetic series or flow panels");
    cmd->add_option("--kind", o->kind, "fgn | fbm | iid | pareto")->capture_default_str();
    cmd->add_option("--H", o->hurst, "Hurst parameter for fgn/fbm")->capture_default_str();
    cmd->add_option("--alpha", o->alpha, "Pareto tail index")->capture_default_str();
    cmd->add_option("--n", o->n, "length")->capture_default_str();
    cmd->add_option("--seed", o->seed, "seed")->capture_default_str();
    cmd->add_option("--start", o->start, "first calendar date")->capture_default_str();
    cmd->add_option("--out", o->out, "output CSV (stdout if omitted)");
    cmd->add_option("--group", o->groups,
                    "emit a wide flows CSV instead; repeatable <group>=<kind>[:<param>]");
    cmd->add_option("--level", o->level, "flow level for --group")->capture_default_str();
    cmd->add_option("--volatility", o->volatility, "log-amplitude of flows for --group")
        ->capture_default_str();
    cmd->add_option("--prices-out", o->prices_out, "also write a synthetic date,close CSV");
    cmd->add_option("--price-vol", o->price_vol, "daily log-return std of --prices-out")
        ->capture_default_str();
    cmd->callback([o] {
        std::vector<std::string> calendar;
        if (!o->groups.empty()) {
            std::vector<GroupGenerator> gens;
            for (const auto& text : o->groups) {
                auto g = parse_group_spec(text);
                g.level = o->level;
                g.volatility = o->volatility;
                gens.push_back(g);
            }
            const auto panel = synthetic_flow_panel(gens, o->n, o->seed, o->start);
            calendar = panel.calendar();
            emit(render([&](std::ostream& s) { write_wide_flows(s, panel); }), o->out);
        } else {
            GeneratorSpec spec;
            spec.kind = parse_generator_kind(o->kind);
            spec.hurst = o->hurst;
            spec.alpha = o->alpha;
            spec.n = o->n;
            spec.seed = o->seed;
            DatedSeries series{business_day_calendar(o->start, o->n), generate(spec)};
            calendar = series.calendar;
            emit(render([&](std::ostream& s) { write_dated_series(s, series); }), o->out);
        }
        if (!o->prices_out.empty()) {
            const auto prices = synthetic_prices(calendar, derive_seed(o->seed, "synth/prices"),
                                                 o->price_vol);
            emit(render([&](std::ostream& s) {
                     write_dated_series(s, DatedSeries{prices.calendar, prices.close}, "close");
                 }),
                 o->prices_out);
        }
    });
}

}  // namespace

void register_commands(CLI::App& app) {
    add_run(app);
    add_ingest_check(app);
    add_dfa(app);
    add_roll(app);
    add_surrogate(app);
    add_tails(app);
    add_regress(app);
    add_synth(app);
    add_report(app);
}

}  // namespace flowmem::cli
