#include "flowmem/serialize.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "flowmem/csv_io.hpp"
#include "flowmem/error.hpp"

namespace flowmem {

namespace {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double read_number(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

json optional_number(const std::optional<double>& x) {
    return x ? number(*x) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

void to_json(json& j, const DfaConfig& c) {
    j = json{{"detrend_order", c.detrend_order},
             {"n_min", c.n_min},
             {"n_max_fraction", c.n_max_fraction},
             {"n_scales", c.n_scales},
             {"min_blocks", c.min_blocks}};
}

void from_json(const json& j, DfaConfig& c) {
    c = DfaConfig{};
    c.detrend_order = j.value("detrend_order", c.detrend_order);
    c.n_min = j.value("n_min", c.n_min);
    c.n_max_fraction = j.value("n_max_fraction", c.n_max_fraction);
    c.n_scales = j.value("n_scales", c.n_scales);
    c.min_blocks = j.value("min_blocks", c.min_blocks);
}

void to_json(json& j, const DfaFit& f) {
    j = json{{"H", number(f.hurst)},
             {"intercept", number(f.intercept)},
             {"slope_stderr", number(f.slope_stderr)},
             {"r_squared", number(f.r_squared)},
             {"scale_lo", f.scale_lo},
             {"scale_hi", f.scale_hi},
             {"n_points_used", f.n_points_used},
             {"detrend_order", f.detrend_order}};
}

void from_json(const json& j, DfaFit& f) {
    f.hurst = read_number(j, "H");
    f.intercept = read_number(j, "intercept");
    f.slope_stderr = read_number(j, "slope_stderr");
    f.r_squared = read_number(j, "r_squared");
    f.scale_lo = j.at("scale_lo").get<std::size_t>();
    f.scale_hi = j.at("scale_hi").get<std::size_t>();
    f.n_points_used = j.at("n_points_used").get<std::size_t>();
    f.detrend_order = j.at("detrend_order").get<int>();
}

void to_json(json& j, const RollingConfig& c) {
    j = json{{"window", c.window}, {"step", c.step}};
}

void from_json(const json& j, RollingConfig& c) {
    c = RollingConfig{};
    c.window = j.value("window", c.window);
    c.step = j.value("step", c.step);
}

void to_json(json& j, const RegimeWindow& w) {
    j = json{{"label", w.label}, {"start", w.start_date}, {"end", w.end_date}};
}

void from_json(const json& j, RegimeWindow& w) {
    w.label = j.at("label").get<std::string>();
    w.start_date = j.at("start").get<std::string>();
    w.end_date = j.at("end").get<std::string>();
}

void to_json(json& j, const RegimeSummary& s) {
    j = json{{"label", s.label},
             {"n_obs", s.n_obs},
             {"mean_H", optional_number(s.mean_h)},
             {"std_H", optional_number(s.std_h)},
             {"min_H", optional_number(s.min_h)},
             {"max_H", optional_number(s.max_h)}};
}

void from_json(const json& j, RegimeSummary& s) {
    s.label = j.at("label").get<std::string>();
    s.n_obs = j.at("n_obs").get<std::size_t>();
    s.mean_h = read_optional(j, "mean_H");
    s.std_h = read_optional(j, "std_H");
    s.min_h = read_optional(j, "min_H");
    s.max_h = read_optional(j, "max_H");
}

void to_json(json& j, const SurrogateSpec& s) {
    j = json{{"kind", to_string(s.kind)}, {"seed", s.seed}, {"count", s.count}};
}

void from_json(const json& j, SurrogateSpec& s) {
    s.kind = parse_surrogate_kind(j.at("kind").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.count = j.at("count").get<std::size_t>();
}

void to_json(json& j, const SurrogateBand& b) {
    json values = json::array();
    for (double h : b.hurst_values) values.push_back(number(h));
    j = json{{"spec", b.spec},
             {"mean", number(b.mean)},
             {"std", optional_number(b.std)},
             {"std_defined", b.std.has_value()},
             {"q05", number(b.q05)},
             {"q25", number(b.q25)},
             {"median", number(b.median)},
             {"q75", number(b.q75)},
             {"q95", number(b.q95)},
             {"H_values", values}};
}

void from_json(const json& j, SurrogateBand& b) {
    b.spec = j.at("spec").get<SurrogateSpec>();
    b.mean = read_number(j, "mean");
    b.std = read_optional(j, "std");
    b.q05 = read_number(j, "q05");
    b.q25 = read_number(j, "q25");
    b.median = read_number(j, "median");
    b.q75 = read_number(j, "q75");
    b.q95 = read_number(j, "q95");
    b.hurst_values.clear();
    for (const auto& v : j.at("H_values")) {
        b.hurst_values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                             : v.get<double>());
    }
}

void to_json(json& j, const TailFit& f) {
    j = json{{"method", to_string(f.method)},
             {"exponent", number(f.exponent)},
             {"stderr", number(f.standard_error)},
             {"fit_xmin", number(f.fit_xmin)},
             {"n_tail", f.n_tail},
             {"r_squared", optional_number(f.r_squared)}};
}

void from_json(const json& j, TailFit& f) {
    f.method = parse_tail_method(j.at("method").get<std::string>());
    f.exponent = read_number(j, "exponent");
    f.standard_error = read_number(j, "stderr");
    f.fit_xmin = read_number(j, "fit_xmin");
    f.n_tail = j.at("n_tail").get<std::size_t>();
    f.r_squared = read_optional(j, "r_squared");
}

void to_json(json& j, const OlsResult& r) {
    j = json{{"alpha", number(r.alpha)},
             {"beta", number(r.beta)},
             {"se_alpha", number(r.se_alpha)},
             {"se_beta", number(r.se_beta)},
             {"t_alpha", number(r.t_alpha)},
             {"t_beta", number(r.t_beta)},
             {"robust_se_alpha", number(r.robust_se_alpha)},
             {"robust_se_beta", number(r.robust_se_beta)},
             {"robust_t_alpha", number(r.robust_t_alpha)},
             {"robust_t_beta", number(r.robust_t_beta)},
             {"r_squared", number(r.r_squared)},
             {"n", r.n},
             {"residual_variance", number(r.residual_variance)}};
}

void from_json(const json& j, OlsResult& r) {
    r.alpha = read_number(j, "alpha");
    r.beta = read_number(j, "beta");
    r.se_alpha = read_number(j, "se_alpha");
    r.se_beta = read_number(j, "se_beta");
    r.t_alpha = read_number(j, "t_alpha");
    r.t_beta = read_number(j, "t_beta");
    r.robust_se_alpha = read_number(j, "robust_se_alpha");
    r.robust_se_beta = read_number(j, "robust_se_beta");
    r.robust_t_alpha = read_number(j, "robust_t_alpha");
    r.robust_t_beta = read_number(j, "robust_t_beta");
    r.r_squared = read_number(j, "r_squared");
    r.n = j.at("n").get<std::size_t>();
    r.residual_variance = read_number(j, "residual_variance");
}

void write_curve_csv(std::ostream& out, const FluctuationCurve& curve) {
    out << "n,F\n";
    for (const auto& p : curve.points) out << p.scale << ',' << format_double(p.fluctuation) << '\n';
}

void write_rolling_csv(std::ostream& out, const RollingHurst& rolling) {
    out << "end_date,H,stderr,r2\n";
    for (const auto& e : rolling.entries) {
        out << e.end_date;
        if (e.is_gap()) {
            out << ",NA,NA,NA\n";
        } else {
            out << ',' << format_double(e.fit->hurst) << ',' << format_double(e.fit->slope_stderr)
                << ',' << format_double(e.fit->r_squared) << '\n';
        }
    }
}

RollingHurst read_rolling_csv(std::istream& in, const SeriesKey& label,
                              const RollingConfig& config, const std::string& source) {
    RollingHurst out;
    out.label = label;
    out.window = config.window;
    out.step = config.step;
    std::string line;
    std::size_t line_no = 0;
    auto parse = [&](const std::string& token) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            return v;
        } catch (const std::exception&) {
            throw Error(source + ":" + std::to_string(line_no) + ": not a number: '" + token + "'");
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (line_no == 1) {
            if (line != "end_date,H,stderr,r2") {
                throw Error(source + ": rolling CSV header must be 'end_date,H,stderr,r2'");
            }
            continue;
        }
        if (fields.size() != 4) throw Error(source + ":" + std::to_string(line_no) + ": expected 4 fields");
        RollingEntry entry;
        entry.end_date = fields[0];
        entry.end_index = config.window - 1 + out.entries.size() * config.step;
        if (fields[1] == "NA") {
            entry.error = "gap";
        } else {
            DfaFit fit;
            fit.hurst = parse(fields[1]);
            fit.slope_stderr = parse(fields[2]);
            fit.r_squared = parse(fields[3]);
            entry.fit = fit;
        }
        if (!out.entries.empty() && !(out.entries.back().end_date < entry.end_date)) {
            throw Error(source + ":" + std::to_string(line_no) + ": end dates must increase");
        }
        out.entries.push_back(std::move(entry));
    }
    if (line_no == 0) throw Error(source + ": empty rolling CSV");
    return out;
}

void write_ccdf_csv(std::ostream& out, const CcdfPoints& empirical, const CcdfPoints& reference) {
    if (empirical.points.size() != reference.points.size()) {
        throw Error("CCDF and reference differ in length");
    }
    out << "x,p_empirical,p_gaussian\n";
    for (std::size_t i = 0; i < empirical.points.size(); ++i) {
        out << format_double(empirical.points[i].x) << ',' << format_double(empirical.points[i].p)
            << ',' << format_double(reference.points[i].p) << '\n';
    }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace flowmem
