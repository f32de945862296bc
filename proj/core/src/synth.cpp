#include "flowmem/synth.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>

#include "fft.hpp"
#include "flowmem/csv_io.hpp"
#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"
#include "flowmem/rng.hpp"

namespace flowmem {

namespace {

void check_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw Error("Hurst parameter must lie in (0, 1)");
}

void check_length(std::size_t n) {
    if (n < 2) throw Error("generator length must be >= 2");
}

/// Circulant eigenvalues for an fGn embedding of size 2M, or an empty
/// vector if any is negative beyond round-off.
std::vector<double> embedding_eigenvalues(double hurst, std::size_t half) {
    const std::size_t size = 2 * half;
    std::vector<double> row(size);
    for (std::size_t k = 0; k <= half; ++k) row[k] = fgn_autocovariance(hurst, k);
    for (std::size_t k = half + 1; k < size; ++k) row[k] = row[size - k];

    const auto spectrum = detail::forward_real_dft(row);
    std::vector<double> eigen(spectrum.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double lambda = spectrum[k].real();
        if (lambda < -1e-10 * static_cast<double>(size)) return {};
        eigen[k] = std::max(lambda, 0.0);
    }
    return eigen;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::fgn: return "fgn";
        case GeneratorKind::fbm_increments_cumsum: return "fbm";
        case GeneratorKind::iid_gaussian: return "iid";
        case GeneratorKind::pareto: return "pareto";
    }
    return "?";
}

GeneratorKind parse_generator_kind(const std::string& token) {
    if (token == "fgn") return GeneratorKind::fgn;
    if (token == "fbm" || token == "fbm_increments_cumsum") {
        return GeneratorKind::fbm_increments_cumsum;
    }
    if (token == "iid" || token == "iid_gaussian") return GeneratorKind::iid_gaussian;
    if (token == "pareto") return GeneratorKind::pareto;
    throw Error("unknown generator kind '" + token + "'");
}

void GeneratorSpec::validate() const {
    check_length(n);
    switch (kind) {
        case GeneratorKind::fgn:
        case GeneratorKind::fbm_increments_cumsum: check_hurst(hurst); break;
        case GeneratorKind::pareto:
            if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("Pareto alpha must be > 0");
            break;
        case GeneratorKind::iid_gaussian: break;
    }
}

double fgn_autocovariance(double hurst, std::size_t lag) {
    const double k = static_cast<double>(lag);
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
                  std::pow(std::abs(k - 1.0), two_h));
}

std::vector<double> fgn(double hurst, std::size_t n, std::uint64_t seed) {
    check_hurst(hurst);
    check_length(n);

    std::size_t half = 1;
    while (half < n) half *= 2;
    const auto eigen = embedding_eigenvalues(hurst, half);
    if (eigen.empty()) return fgn_hosking(hurst, n, seed);

    const std::size_t size = 2 * half;
    const double size_d = static_cast<double>(size);
    Rng rng(seed);
    std::vector<std::complex<double>> w(half + 1);
    w[0] = std::sqrt(eigen[0] / size_d) * rng.normal();
    for (std::size_t k = 1; k < half; ++k) {
        const double scale = std::sqrt(eigen[k] / (2.0 * size_d));
        const double re = rng.normal();
        const double im = rng.normal();
        w[k] = {scale * re, scale * im};
    }
    w[half] = std::sqrt(eigen[half] / size_d) * rng.normal();

    auto path = detail::backward_real_dft(w, size);
    path.resize(n);
    return path;
}

std::vector<double> fgn_hosking(double hurst, std::size_t n, std::uint64_t seed) {
    check_hurst(hurst);
    check_length(n);

    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) gamma[k] = fgn_autocovariance(hurst, k);

    Rng rng(seed);
    std::vector<double> x(n);
    std::vector<double> phi(n, 0.0), phi_prev(n, 0.0);
    double variance = gamma[0];
    x[0] = std::sqrt(variance) * rng.normal();
    for (std::size_t t = 1; t < n; ++t) {
        // Durbin-Levinson update of the order-t predictor coefficients.
        double num = gamma[t];
        for (std::size_t j = 1; j < t; ++j) num -= phi_prev[j] * gamma[t - j];
        const double reflection = num / variance;
        phi[t] = reflection;
        for (std::size_t j = 1; j < t; ++j) phi[j] = phi_prev[j] - reflection * phi_prev[t - j];
        variance *= 1.0 - reflection * reflection;

        double mean_t = 0.0;
        for (std::size_t j = 1; j <= t; ++j) mean_t += phi[j] * x[t - j];
        x[t] = mean_t + std::sqrt(variance) * rng.normal();
        std::copy(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(t) + 1, phi_prev.begin());
    }
    return x;
}

std::vector<double> cumsum(std::span<const double> series) { return cumulative_sum(series); }

std::vector<double> pareto(double alpha, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("Pareto alpha must be > 0");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = std::pow(rng.uniform(), -1.0 / alpha);
    return out;
}

std::vector<double> iid_gaussian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = rng.normal();
    return out;
}

std::vector<double> generate(const GeneratorSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case GeneratorKind::fgn: return fgn(spec.hurst, spec.n, spec.seed);
        case GeneratorKind::fbm_increments_cumsum: return cumsum(fgn(spec.hurst, spec.n, spec.seed));
        case GeneratorKind::iid_gaussian: return iid_gaussian(spec.n, spec.seed);
        case GeneratorKind::pareto: return pareto(spec.alpha, spec.n, spec.seed);
    }
    throw Error("unknown generator kind");
}

std::vector<std::string> business_day_calendar(const std::string& start, std::size_t count) {
    using namespace std::chrono;
    if (!is_iso_date(start)) throw Error("calendar start must be YYYY-MM-DD, got '" + start + "'");
    const year_month_day ymd{year{std::stoi(start.substr(0, 4))},
                             month{static_cast<unsigned>(std::stoi(start.substr(5, 2)))},
                             day{static_cast<unsigned>(std::stoi(start.substr(8, 2)))}};
    sys_days d{ymd};
    std::vector<std::string> out;
    out.reserve(count);
    char buf[16];
    while (out.size() < count) {
        const weekday wd{d};
        if (wd != Saturday && wd != Sunday) {
            const year_month_day cur{d};
            std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(cur.year()),
                          static_cast<unsigned>(cur.month()), static_cast<unsigned>(cur.day()));
            out.emplace_back(buf);
        }
        d += days{1};
    }
    return out;
}

namespace {

std::vector<double> group_amounts(const GroupGenerator& g, std::size_t n, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = g.kind;
    spec.hurst = g.hurst;
    spec.alpha = g.alpha;
    spec.n = n;
    spec.seed = seed;
    auto z = generate(spec);
    if (g.kind == GeneratorKind::pareto) {
        for (auto& x : z) x *= g.level;
        return z;
    }
    const double m = mean(z);
    const double sd = std::sqrt(population_variance(z));
    if (!(sd > 0.0)) throw Error("synthetic generator produced a constant series");
    for (auto& x : z) x = g.level * std::exp(g.volatility * (x - m) / sd);
    return z;
}

}  // namespace

FlowPanel synthetic_flow_panel(std::span<const GroupGenerator> groups, std::size_t n,
                               std::uint64_t seed, const std::string& start_date) {
    if (groups.empty()) throw Error("synthetic panel needs at least one group");
    std::map<Group, std::pair<std::vector<double>, std::vector<double>>> columns;
    for (const auto& g : groups) {
        const std::string base = "synth/" + std::string(to_string(g.group));
        if (columns.contains(g.group)) throw Error("duplicate synthetic group");
        columns[g.group] = {group_amounts(g, n, derive_seed(seed, base + "/BUY")),
                            group_amounts(g, n, derive_seed(seed, base + "/SELL"))};
    }
    return FlowPanel(business_day_calendar(start_date, n), std::move(columns));
}

PriceSeries synthetic_prices(std::span<const std::string> calendar, std::uint64_t seed,
                             double daily_vol, double start_price) {
    PriceSeries out;
    out.calendar.assign(calendar.begin(), calendar.end());
    Rng rng(seed);
    double log_p = std::log(start_price);
    for (std::size_t i = 0; i < calendar.size(); ++i) {
        if (i > 0) log_p += daily_vol * rng.normal();
        out.close.push_back(i == 0 ? start_price : std::exp(log_p));
    }
    return out;
}

}  // namespace flowmem
