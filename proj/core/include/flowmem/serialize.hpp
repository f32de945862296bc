#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "flowmem/dfa.hpp"
#include "flowmem/flows.hpp"
#include "flowmem/rolling.hpp"
#include "flowmem/stats.hpp"
#include "flowmem/surrogate.hpp"
#include "flowmem/tails.hpp"

namespace flowmem {

// JSON mappings, found by nlohmann::json through ADL. Non-finite doubles are
// written as null and read back as NaN.
void to_json(nlohmann::json& j, const DfaConfig& c);
void from_json(const nlohmann::json& j, DfaConfig& c);
void to_json(nlohmann::json& j, const DfaFit& f);
void from_json(const nlohmann::json& j, DfaFit& f);
void to_json(nlohmann::json& j, const RollingConfig& c);
void from_json(const nlohmann::json& j, RollingConfig& c);
void to_json(nlohmann::json& j, const RegimeWindow& w);
void from_json(const nlohmann::json& j, RegimeWindow& w);
void to_json(nlohmann::json& j, const RegimeSummary& s);
void from_json(const nlohmann::json& j, RegimeSummary& s);
void to_json(nlohmann::json& j, const SurrogateSpec& s);
void from_json(const nlohmann::json& j, SurrogateSpec& s);
void to_json(nlohmann::json& j, const SurrogateBand& b);
void from_json(const nlohmann::json& j, SurrogateBand& b);
void to_json(nlohmann::json& j, const TailFit& f);
void from_json(const nlohmann::json& j, TailFit& f);
void to_json(nlohmann::json& j, const OlsResult& r);
void from_json(const nlohmann::json& j, OlsResult& r);

/// `n,F`
void write_curve_csv(std::ostream& out, const FluctuationCurve& curve);

/// `end_date,H,stderr,r2`; gap windows are written with NA fields.
void write_rolling_csv(std::ostream& out, const RollingHurst& rolling);
/// Reconstructs entries (H, stderr, R^2 only) from write_rolling_csv output.
RollingHurst read_rolling_csv(std::istream& in, const SeriesKey& label, const RollingConfig& config,
                              const std::string& source = "<stream>");

/// `x,p_empirical,p_gaussian`
void write_ccdf_csv(std::ostream& out, const CcdfPoints& empirical, const CcdfPoints& reference);

/// Dumps with two-space indentation and a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace flowmem
