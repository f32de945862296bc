#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowmem/dfa.hpp"
#include "flowmem/flows.hpp"
#include "flowmem/rolling.hpp"
#include "flowmem/stats.hpp"
#include "flowmem/surrogate.hpp"
#include "flowmem/tails.hpp"

namespace flowmem {

std::string version();

struct SurrogateConfig {
    std::vector<SurrogateKind> kinds{SurrogateKind::shuffle, SurrogateKind::phase_randomize};
    std::size_t count = 50;

    bool operator==(const SurrogateConfig&) const = default;
};

struct RegressionConfig {
    FillPolicy fill_policy = FillPolicy::forward_fill;
    bool robust_se = false;  ///< significance stars from HC1 instead of classical t-values
    std::size_t lag_k = 0;

    bool operator==(const RegressionConfig&) const = default;
};

/// Everything that determines a run's output. Worker-thread count is not
/// part of it: results are identical for any thread count.
struct RunConfig {
    std::filesystem::path flows_path;
    std::optional<std::filesystem::path> prices_path;   ///< `date,close`
    std::optional<std::filesystem::path> returns_path;  ///< `date,return`
    DfaConfig dfa;
    std::optional<int> cross_check_order = 1;  ///< extra static DFA at this order
    RollingConfig rolling;
    SurrogateConfig surrogates;
    TailOptions tails{0.05, 50, TailSide::absolute};
    std::vector<RegimeWindow> regimes;
    RegressionConfig regression;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "flowmem_out";

    /// Throws flowmem::Error on any invalid sub-configuration.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Default regime windows: the 2018-2019 tariff episode, COVID-19, and the
/// 2022-2024 disinflation phase.
std::vector<RegimeWindow> default_regimes();

nlohmann::json config_to_json(const RunConfig& config);
/// Missing keys take defaults. Relative paths are resolved against base_dir
/// only when loading from a file (see load_config).
RunConfig config_from_json(const nlohmann::json& j);
/// Canonical serialized text; serialize -> parse -> serialize is byte-identical.
std::string serialize_config(const RunConfig& config);
/// The config as recorded in reports: everything except output_dir, which
/// does not affect results.
nlohmann::json config_for_report(const RunConfig& config);
/// Hex FNV-1a-64 of the dumped config_for_report(config).
std::string config_hash(const RunConfig& config);
/// Reads a JSON config file. Relative input paths are resolved against the
/// file's directory when the pipeline opens them, not in the stored config.
RunConfig load_config(const std::filesystem::path& path);

/// Directory of run artifacts. Writes go to a temporary file that is then
/// renamed into place.
class ArtifactStore {
public:
    explicit ArtifactStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    void write(const std::string& name, const std::string& content) const;
    /// Throws "missing artifact: <path>" if absent.
    std::string read(const std::string& name) const;
    bool exists(const std::string& name) const;
    std::filesystem::path path(const std::string& name) const { return dir_ / name; }

private:
    std::filesystem::path dir_;
};

/// Resolves config input paths against base_dir (the config file's directory).
std::filesystem::path resolve_input(const std::filesystem::path& p,
                                    const std::filesystem::path& base_dir);

// ---- Stages ---------------------------------------------------------------
// Each stage writes its plot data plus one `<stage>.json` summary, stamped
// with the config hash, into the store. The `report` step assembles the
// summaries. Running the stages one by one (CLI subcommands) produces the
// same files as run_pipeline.

FlowPanel load_panel(const RunConfig& config, const std::filesystem::path& base_dir);
/// Prefers prices (log returns) over raw returns; empty if neither is set.
std::optional<VolatilitySeries> load_volatility(const RunConfig& config,
                                                const std::filesystem::path& base_dir);

void stage_ingest(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store);
void stage_tails(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store);
void stage_dfa(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store);
void stage_surrogates(const FlowPanel& panel, const RunConfig& config, const ArtifactStore& store);
std::map<SeriesKey, RollingHurst> stage_rolling(const FlowPanel& panel, const RunConfig& config,
                                                const ArtifactStore& store);
void stage_regression(const std::map<SeriesKey, RollingHurst>& rolling,
                      const std::optional<VolatilitySeries>& volatility, const RunConfig& config,
                      const ArtifactStore& store);

/// Reads the rolling CSVs listed in rolling.json.
std::map<SeriesKey, RollingHurst> load_rolling_artifacts(const RunConfig& config,
                                                         const ArtifactStore& store);

/// Seed for a randomized stage, derived from the run seed and a stable label.
std::uint64_t stage_seed(const RunConfig& config, const std::string& label);

// ---- Report ---------------------------------------------------------------

struct RegressionCell {
    OlsResult ols;
    std::string stars_alpha;
    std::string stars_beta;
};

struct SeriesReport {
    DfaFit dfa;
    std::optional<DfaFit> dfa_cross_check;
    std::vector<SurrogateBand> surrogates;
    TailFit tail_ccdf_ols;
    TailFit tail_hill;
    bool tail_methods_disagree = false;  ///< |ccdf_ols - hill| > 0.3
    std::string rolling_artifact;
    std::size_t rolling_entries = 0;
    std::size_t rolling_gaps = 0;
    std::vector<RegimeSummary> regimes;
    std::optional<RegressionCell> regression;
};

struct Provenance {
    std::string toolkit = "flowmem";
    std::string version;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string generator;
};

struct RunReport {
    Provenance provenance;
    RunConfig config;
    nlohmann::json ingest;
    std::map<SeriesKey, SeriesReport> series;
    std::string regression_status;  ///< "ok" or "skipped: <reason>"
    std::vector<std::string> artifacts;
};

nlohmann::json report_to_json(const RunReport& report);

/// Builds the report from the stage summaries in store and writes
/// report.json. Throws on a missing or stale (config hash mismatch) artifact.
RunReport assemble_report(const RunConfig& config, const ArtifactStore& store);

/// All stages in order. Artifacts are staged and moved into
/// config.output_dir only on success; on failure they are moved to
/// `<output_dir>/quarantine` and a StageError naming the stage is thrown.
RunReport run_pipeline(const RunConfig& config, const std::filesystem::path& base_dir = ".");

}  // namespace flowmem
