#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowmem {

enum class Group { retail, institutional, foreign };
enum class Side { buy, sell };
enum class FlowType { buy, sell, net };

inline constexpr std::array<Group, 3> kAllGroups{Group::retail, Group::institutional,
                                                 Group::foreign};
inline constexpr std::array<FlowType, 3> kAllFlowTypes{FlowType::buy, FlowType::sell,
                                                       FlowType::net};

std::string_view to_string(Group g) noexcept;
std::string_view to_string(Side s) noexcept;
std::string_view to_string(FlowType f) noexcept;

/// Case-insensitive token parsing. "institution" is accepted as an alias.
std::optional<Group> parse_group(std::string_view token);
std::optional<Side> parse_side(std::string_view token);
std::optional<FlowType> parse_flow_type(std::string_view token);

/// Identifies one of the nine analysis series.
struct SeriesKey {
    Group group = Group::retail;
    FlowType flow = FlowType::buy;

    auto operator<=>(const SeriesKey&) const = default;
};

/// "retail_BUY" style identifier used in file names and JSON keys.
std::string series_id(const SeriesKey& key);
std::optional<SeriesKey> parse_series_id(std::string_view id);

/// One raw trading record. Dates are opaque, sortable identifiers
/// (ISO YYYY-MM-DD when read from CSV).
struct FlowRecord {
    std::string date;
    std::optional<std::string> firm_id;
    Group group = Group::retail;
    Side side = Side::buy;
    double amount = 0.0;
};

/// A single series with its label and calendar.
struct LabeledSeries {
    SeriesKey key;
    std::vector<std::string> calendar;
    std::vector<double> values;
};

/// Calendar-aligned daily BUY/SELL/NET series for each investor group
/// present in the input. Construction validates every invariant, so a
/// FlowPanel value is always consistent:
///   * calendar strictly increasing,
///   * every series has the calendar's length,
///   * BUY and SELL are finite and nonnegative,
///   * NET == BUY - SELL exactly.
class FlowPanel {
public:
    /// Builds a panel from BUY/SELL columns per group; NET is derived.
    FlowPanel(std::vector<std::string> calendar,
              std::map<Group, std::pair<std::vector<double>, std::vector<double>>> buy_sell);

    /// Reassembles a panel from extracted series. Every present group must
    /// supply all three flow types and NET must equal BUY - SELL exactly.
    static FlowPanel assemble(std::vector<std::string> calendar,
                              std::span<const LabeledSeries> series);

    const std::vector<std::string>& calendar() const noexcept { return calendar_; }
    std::size_t length() const noexcept { return calendar_.size(); }
    std::vector<Group> groups() const;
    std::vector<SeriesKey> keys() const;
    bool contains(const SeriesKey& key) const;

    /// Throws flowmem::Error for a key not present in the panel.
    std::span<const double> values(const SeriesKey& key) const;

    bool operator==(const FlowPanel&) const = default;

private:
    FlowPanel() = default;

    std::vector<std::string> calendar_;
    std::map<SeriesKey, std::vector<double>> series_;
};

/// Sums record amounts per (date, group, side) and derives NET = BUY - SELL.
/// Each cell is summed over its amounts in sorted order with compensation,
/// so the result is bit-identical under any permutation of records.
/// Groups without records on a date receive 0 for that date.
FlowPanel aggregate_daily(std::span<const FlowRecord> records);

LabeledSeries extract_series(const FlowPanel& panel, Group group, FlowType flow);
LabeledSeries extract_series(const FlowPanel& panel, const SeriesKey& key);

}  // namespace flowmem
