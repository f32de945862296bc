#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowmem/flows.hpp"

namespace flowmem {

/// Reads flow records from CSV. Two schemas are accepted, chosen by header:
///   long:  date,firm_id,group,side,amount   (firm_id may be empty)
///   wide:  date,group,buy,sell              (pre-aggregated)
/// Errors carry the 1-based line number.
std::vector<FlowRecord> read_flow_records(std::istream& in, const std::string& source = "<stream>");
std::vector<FlowRecord> read_flow_records(const std::filesystem::path& path);

/// Writes the panel's BUY/SELL columns in the wide flows schema.
void write_wide_flows(std::ostream& out, const FlowPanel& panel);

/// Panel as `date,<group>_BUY,<group>_SELL,<group>_NET,...`, values printed
/// with round-trip precision.
void write_panel_csv(std::ostream& out, const FlowPanel& panel);
FlowPanel read_panel_csv(std::istream& in, const std::string& source = "<stream>");
FlowPanel read_panel_csv(const std::filesystem::path& path);

/// A dated scalar series, `date,<column>` with one header line.
struct DatedSeries {
    std::vector<std::string> calendar;
    std::vector<double> values;
};

DatedSeries read_dated_series(std::istream& in, const std::string& source = "<stream>");
DatedSeries read_dated_series(const std::filesystem::path& path);
void write_dated_series(std::ostream& out, const DatedSeries& series,
                        const std::string& value_column = "value");

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

/// Splits one CSV line on commas (no quoting; the toolkit's formats never need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// True when `date` is a well-formed YYYY-MM-DD calendar date.
bool is_iso_date(const std::string& date);

}  // namespace flowmem
