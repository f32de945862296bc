#include "flowmem/flows.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "flowmem/error.hpp"
#include "flowmem/numeric.hpp"

namespace flowmem {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string describe(const FlowRecord& r, std::size_t index) {
    return "record " + std::to_string(index) + " (date " + r.date + ", " +
           std::string(to_string(r.group)) + " " + std::string(to_string(r.side)) + ")";
}

}  // namespace

std::string_view to_string(Group g) noexcept {
    switch (g) {
        case Group::retail: return "retail";
        case Group::institutional: return "institutional";
        case Group::foreign: return "foreign";
    }
    return "?";
}

std::string_view to_string(Side s) noexcept {
    return s == Side::buy ? "BUY" : "SELL";
}

std::string_view to_string(FlowType f) noexcept {
    switch (f) {
        case FlowType::buy: return "BUY";
        case FlowType::sell: return "SELL";
        case FlowType::net: return "NET";
    }
    return "?";
}

std::optional<Group> parse_group(std::string_view token) {
    const std::string t = lower(token);
    if (t == "retail") return Group::retail;
    if (t == "institutional" || t == "institution") return Group::institutional;
    if (t == "foreign") return Group::foreign;
    return std::nullopt;
}

std::optional<Side> parse_side(std::string_view token) {
    const std::string t = lower(token);
    if (t == "buy") return Side::buy;
    if (t == "sell") return Side::sell;
    return std::nullopt;
}

std::optional<FlowType> parse_flow_type(std::string_view token) {
    const std::string t = lower(token);
    if (t == "buy") return FlowType::buy;
    if (t == "sell") return FlowType::sell;
    if (t == "net") return FlowType::net;
    return std::nullopt;
}

std::string series_id(const SeriesKey& key) {
    return std::string(to_string(key.group)) + "_" + std::string(to_string(key.flow));
}

std::optional<SeriesKey> parse_series_id(std::string_view id) {
    const auto sep = id.rfind('_');
    if (sep == std::string_view::npos) return std::nullopt;
    const auto g = parse_group(id.substr(0, sep));
    const auto f = parse_flow_type(id.substr(sep + 1));
    if (!g || !f) return std::nullopt;
    return SeriesKey{*g, *f};
}

FlowPanel::FlowPanel(std::vector<std::string> calendar,
                     std::map<Group, std::pair<std::vector<double>, std::vector<double>>> buy_sell)
    : calendar_(std::move(calendar)) {
    if (calendar_.empty()) throw Error("flow panel has an empty calendar");
    for (std::size_t i = 1; i < calendar_.size(); ++i) {
        if (!(calendar_[i - 1] < calendar_[i])) {
            throw Error("flow panel calendar not strictly increasing at " + calendar_[i]);
        }
    }
    if (buy_sell.empty()) throw Error("flow panel has no groups");

    for (auto& [group, columns] : buy_sell) {
        auto& [buy, sell] = columns;
        if (buy.size() != calendar_.size() || sell.size() != calendar_.size()) {
            throw Error("flow panel: " + std::string(to_string(group)) +
                        " series length differs from calendar");
        }
        std::vector<double> net(buy.size());
        for (std::size_t t = 0; t < buy.size(); ++t) {
            if (!std::isfinite(buy[t]) || !std::isfinite(sell[t]) || buy[t] < 0.0 ||
                sell[t] < 0.0) {
                throw Error("flow panel: invalid BUY/SELL value for " +
                            std::string(to_string(group)) + " at " + calendar_[t]);
            }
            net[t] = buy[t] - sell[t];
        }
        series_[{group, FlowType::buy}] = std::move(buy);
        series_[{group, FlowType::sell}] = std::move(sell);
        series_[{group, FlowType::net}] = std::move(net);
    }
}

FlowPanel FlowPanel::assemble(std::vector<std::string> calendar,
                              std::span<const LabeledSeries> series) {
    std::map<SeriesKey, const LabeledSeries*> by_key;
    for (const auto& s : series) {
        if (!by_key.emplace(s.key, &s).second) {
            throw Error("duplicate series " + series_id(s.key));
        }
    }

    std::map<Group, std::pair<std::vector<double>, std::vector<double>>> columns;
    std::set<Group> groups;
    for (const auto& [key, _] : by_key) groups.insert(key.group);
    for (Group g : groups) {
        for (FlowType f : kAllFlowTypes) {
            if (!by_key.contains({g, f})) {
                throw Error("cannot assemble panel: missing series " + series_id({g, f}));
            }
        }
        for (FlowType f : kAllFlowTypes) {
            if (by_key.at({g, f})->calendar != calendar) {
                throw Error("cannot assemble panel: calendar mismatch for " +
                            series_id({g, f}));
            }
        }
        columns[g] = {by_key.at({g, FlowType::buy})->values,
                      by_key.at({g, FlowType::sell})->values};
    }

    FlowPanel panel(std::move(calendar), std::move(columns));
    for (Group g : groups) {
        if (panel.series_.at({g, FlowType::net}) != by_key.at({g, FlowType::net})->values) {
            throw Error("cannot assemble panel: NET != BUY - SELL for " +
                        std::string(to_string(g)));
        }
    }
    return panel;
}

std::vector<Group> FlowPanel::groups() const {
    std::vector<Group> out;
    for (const auto& [key, _] : series_) {
        if (key.flow == FlowType::buy) out.push_back(key.group);
    }
    return out;
}

std::vector<SeriesKey> FlowPanel::keys() const {
    std::vector<SeriesKey> out;
    out.reserve(series_.size());
    for (const auto& [key, _] : series_) out.push_back(key);
    return out;
}

bool FlowPanel::contains(const SeriesKey& key) const { return series_.contains(key); }

std::span<const double> FlowPanel::values(const SeriesKey& key) const {
    const auto it = series_.find(key);
    if (it == series_.end()) throw Error("series " + series_id(key) + " not in panel");
    return it->second;
}

FlowPanel aggregate_daily(std::span<const FlowRecord> records) {
    if (records.empty()) throw Error("no records");

    // (date, group, side) -> amounts
    std::map<std::string, std::map<std::pair<Group, Side>, std::vector<double>>> cells;
    std::set<Group> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!std::isfinite(r.amount)) throw Error("non-finite amount in " + describe(r, i));
        if (r.amount < 0.0) throw Error("negative amount in " + describe(r, i));
        if (r.date.empty()) throw Error("empty date in " + describe(r, i));
        cells[r.date][{r.group, r.side}].push_back(r.amount);
        groups.insert(r.group);
    }

    std::vector<std::string> calendar;
    calendar.reserve(cells.size());
    for (const auto& [date, _] : cells) calendar.push_back(date);

    std::map<Group, std::pair<std::vector<double>, std::vector<double>>> columns;
    for (Group g : groups) {
        columns[g] = {std::vector<double>(calendar.size(), 0.0),
                      std::vector<double>(calendar.size(), 0.0)};
    }

    std::size_t t = 0;
    for (auto& [date, by_cell] : cells) {
        for (auto& [cell, amounts] : by_cell) {
            std::sort(amounts.begin(), amounts.end());
            const double total = compensated_sum(amounts);
            auto& column = cell.second == Side::buy ? columns[cell.first].first
                                                    : columns[cell.first].second;
            column[t] = total;
        }
        ++t;
    }
    return FlowPanel(std::move(calendar), std::move(columns));
}

LabeledSeries extract_series(const FlowPanel& panel, const SeriesKey& key) {
    const auto values = panel.values(key);
    return LabeledSeries{key, panel.calendar(), std::vector<double>(values.begin(), values.end())};
}

LabeledSeries extract_series(const FlowPanel& panel, Group group, FlowType flow) {
    return extract_series(panel, SeriesKey{group, flow});
}

}  // namespace flowmem
