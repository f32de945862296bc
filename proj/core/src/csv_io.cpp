#include "flowmem/csv_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "flowmem/error.hpp"

namespace flowmem {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line);
}

double parse_real(const std::string& token, const std::string& source, std::size_t line) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || token.empty()) {
        throw Error(where(source, line) + ": not a number: '" + token + "'");
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

/// Reads non-empty lines, tracking line numbers. Strips a UTF-8 BOM.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (trim(line).empty()) continue;
            fields = split_csv_line(line);
            for (auto& f : fields) f = trim(f);
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

void check_date(const std::string& date, const std::string& source, std::size_t line) {
    if (!is_iso_date(date)) {
        throw Error(where(source, line) + ": invalid date '" + date + "' (expected YYYY-MM-DD)");
    }
}

Group group_or_throw(const std::string& token, const std::string& source, std::size_t line) {
    const auto g = parse_group(token);
    if (!g) throw Error(where(source, line) + ": unknown group '" + token + "'");
    return *g;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool is_iso_date(const std::string& date) {
    if (date.size() != 10 || date[4] != '-' || date[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (date[i] < '0' || date[i] > '9') return false;
    }
    const int y = std::stoi(date.substr(0, 4));
    const unsigned m = static_cast<unsigned>(std::stoi(date.substr(5, 2)));
    const unsigned d = static_cast<unsigned>(std::stoi(date.substr(8, 2)));
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                       std::chrono::day{d}}
        .ok();
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, ptr);
}

std::vector<FlowRecord> read_flow_records(std::istream& in, const std::string& source) {
    LineReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw Error(source + ": empty flows file (header required)");

    const std::vector<std::string> long_header{"date", "firm_id", "group", "side", "amount"};
    const std::vector<std::string> wide_header{"date", "group", "buy", "sell"};
    const bool is_long = fields == long_header;
    const bool is_wide = fields == wide_header;
    if (!is_long && !is_wide) {
        throw Error(where(source, reader.line()) +
                    ": unrecognised header; expected 'date,firm_id,group,side,amount' or "
                    "'date,group,buy,sell'");
    }
    const std::size_t width = is_long ? 5 : 4;

    std::vector<FlowRecord> records;
    while (reader.next(fields)) {
        const std::size_t line = reader.line();
        if (fields.size() != width) {
            throw Error(where(source, line) + ": expected " + std::to_string(width) +
                        " fields, found " + std::to_string(fields.size()));
        }
        check_date(fields[0], source, line);
        if (is_long) {
            FlowRecord r;
            r.date = fields[0];
            if (!fields[1].empty()) r.firm_id = fields[1];
            r.group = group_or_throw(fields[2], source, line);
            const auto side = parse_side(fields[3]);
            if (!side) throw Error(where(source, line) + ": unknown side '" + fields[3] + "'");
            r.side = *side;
            r.amount = parse_real(fields[4], source, line);
            if (!std::isfinite(r.amount) || r.amount < 0.0) {
                throw Error(where(source, line) + ": amount must be finite and nonnegative");
            }
            records.push_back(std::move(r));
        } else {
            const Group g = group_or_throw(fields[1], source, line);
            const double buy = parse_real(fields[2], source, line);
            const double sell = parse_real(fields[3], source, line);
            if (!std::isfinite(buy) || !std::isfinite(sell) || buy < 0.0 || sell < 0.0) {
                throw Error(where(source, line) + ": buy/sell must be finite and nonnegative");
            }
            records.push_back({fields[0], std::nullopt, g, Side::buy, buy});
            records.push_back({fields[0], std::nullopt, g, Side::sell, sell});
        }
    }
    if (records.empty()) throw Error(source + ": no records");
    return records;
}

std::vector<FlowRecord> read_flow_records(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_flow_records(in, path.string());
}

void write_wide_flows(std::ostream& out, const FlowPanel& panel) {
    out << "date,group,buy,sell\n";
    const auto groups = panel.groups();
    for (std::size_t t = 0; t < panel.length(); ++t) {
        for (Group g : groups) {
            out << panel.calendar()[t] << ',' << to_string(g) << ','
                << format_double(panel.values({g, FlowType::buy})[t]) << ','
                << format_double(panel.values({g, FlowType::sell})[t]) << '\n';
        }
    }
}

void write_panel_csv(std::ostream& out, const FlowPanel& panel) {
    const auto keys = panel.keys();
    out << "date";
    for (const auto& k : keys) out << ',' << series_id(k);
    out << '\n';
    for (std::size_t t = 0; t < panel.length(); ++t) {
        out << panel.calendar()[t];
        for (const auto& k : keys) out << ',' << format_double(panel.values(k)[t]);
        out << '\n';
    }
}

FlowPanel read_panel_csv(std::istream& in, const std::string& source) {
    LineReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header) || header.empty() || header[0] != "date") {
        throw Error(source + ": panel CSV must start with a 'date' header column");
    }
    std::vector<SeriesKey> keys;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto key = parse_series_id(header[c]);
        if (!key) throw Error(where(source, 1) + ": unknown series column '" + header[c] + "'");
        keys.push_back(*key);
    }

    std::vector<LabeledSeries> series;
    for (const auto& k : keys) series.push_back({k, {}, {}});
    std::vector<std::string> calendar;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != header.size()) {
            throw Error(where(source, reader.line()) + ": wrong field count");
        }
        check_date(fields[0], source, reader.line());
        calendar.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            series[c - 1].values.push_back(parse_real(fields[c], source, reader.line()));
        }
    }
    for (auto& s : series) s.calendar = calendar;
    try {
        return FlowPanel::assemble(std::move(calendar), series);
    } catch (const Error& e) {
        throw Error(source + ": " + e.what());
    }
}

FlowPanel read_panel_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_panel_csv(in, path.string());
}

DatedSeries read_dated_series(std::istream& in, const std::string& source) {
    LineReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 2 || fields[0] != "date") {
        throw Error(source + ": expected a two-column header 'date,<value>'");
    }
    DatedSeries out;
    while (reader.next(fields)) {
        if (fields.size() != 2) throw Error(where(source, reader.line()) + ": expected 2 fields");
        check_date(fields[0], source, reader.line());
        if (!out.calendar.empty() && !(out.calendar.back() < fields[0])) {
            throw Error(where(source, reader.line()) + ": dates must be strictly increasing");
        }
        const double v = parse_real(fields[1], source, reader.line());
        if (!std::isfinite(v)) throw Error(where(source, reader.line()) + ": non-finite value");
        out.calendar.push_back(fields[0]);
        out.values.push_back(v);
    }
    if (out.values.empty()) throw Error(source + ": no data rows");
    return out;
}

DatedSeries read_dated_series(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_dated_series(in, path.string());
}

void write_dated_series(std::ostream& out, const DatedSeries& series,
                        const std::string& value_column) {
    out << "date," << value_column << '\n';
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out << series.calendar[i] << ',' << format_double(series.values[i]) << '\n';
    }
}

}  // namespace flowmem
