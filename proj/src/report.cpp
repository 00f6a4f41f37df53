#include "fieldtail/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fieldtail {

void Report::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("row width does not match the column count");
    rows.push_back(std::move(row));
}

std::size_t Report::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

double Report::number(std::size_t row, const std::string& name) const {
    const std::string& cell = rows.at(row).at(column(name));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error("cell '" + cell + "' in column " + name + " is not a number");
    return v;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_number(std::size_t v) { return std::to_string(v); }

std::string format_bool(bool v) { return v ? "true" : "false"; }

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

void write_record(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(cells[i]);
    }
    os << "\r\n";
}

// Reads one record; returns false at end of input.
bool read_record(std::istream& is, std::vector<std::string>& cells) {
    cells.clear();
    if (is.peek() == std::char_traits<char>::eof()) return false;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    for (;;) {
        const int ch = is.get();
        if (ch == std::char_traits<char>::eof()) {
            if (quoted) throw std::runtime_error("csv: unterminated quoted field");
            cells.push_back(cell);
            return true;
        }
        const char c = static_cast<char>(ch);
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get();
                    cell += '"';
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            if (!cell.empty() || was_quoted) throw std::runtime_error("csv: stray quote");
            quoted = was_quoted = true;
        } else if (c == ',') {
            cells.push_back(cell);
            cell.clear();
            was_quoted = false;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && is.peek() == '\n') is.get();
            cells.push_back(cell);
            return true;
        } else {
            if (was_quoted) throw std::runtime_error("csv: text after closing quote");
            cell += c;
        }
    }
}

}  // namespace

void write_csv(std::ostream& os, const Report& report) {
    os << "# " << report.header.dump() << "\r\n";
    for (const auto& n : report.notices) os << "# notice: " << nlohmann::json(n).dump() << "\r\n";
    write_record(os, report.columns);
    for (const auto& row : report.rows) write_record(os, row);
}

std::string to_csv(const Report& report) {
    std::ostringstream os;
    write_csv(os, report);
    return os.str();
}

Report parse_csv(std::istream& is) {
    Report report;
    bool have_columns = false;
    std::vector<std::string> cells;
    while (is.peek() == '#') {
        std::string line;
        std::getline(is, line);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            static const std::string kNotice = "# notice: ";
            if (line.rfind(kNotice, 0) == 0)
                report.notices.push_back(nlohmann::json::parse(line.substr(kNotice.size())).get<std::string>());
            else
                report.header = nlohmann::json::parse(line.substr(1));
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(std::string("csv: bad header line: ") + e.what());
        }
    }
    while (read_record(is, cells)) {
        if (!have_columns) {
            report.columns = cells;
            have_columns = true;
            continue;
        }
        if (cells.size() != report.columns.size())
            throw std::runtime_error("csv: row has " + std::to_string(cells.size()) + " fields, expected " +
                                     std::to_string(report.columns.size()));
        report.rows.push_back(cells);
    }
    if (!have_columns) throw std::runtime_error("csv: missing column header");
    return report;
}

Report parse_csv(const std::string& text) {
    std::istringstream is(text);
    return parse_csv(is);
}

nlohmann::json to_json(const Report& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string& cell = row[c];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(v))
                obj[report.columns[c]] = v;
            else if (cell == "true" || cell == "false")
                obj[report.columns[c]] = cell == "true";
            else
                obj[report.columns[c]] = cell;
        }
        rows.push_back(std::move(obj));
    }
    return {{"provenance", report.header}, {"notices", report.notices}, {"columns", report.columns}, {"rows", rows}};
}

namespace {

// Six significant digits for non-integer numbers; everything else verbatim.
std::string display(const std::string& cell) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return cell;
    if (cell.find_first_of(".eE") == std::string::npos) return cell;
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

void write_text(std::ostream& os, const Report& report) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : report.rows) {
        rows.emplace_back();
        for (const auto& cell : row) rows.back().push_back(display(cell));
    }
    std::vector<std::size_t> width(report.columns.size());
    for (std::size_t c = 0; c < width.size(); ++c) width[c] = report.columns[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) os << "  ";
            os << std::setw(static_cast<int>(width[c])) << cells[c];
        }
        os << '\n';
    };
    for (const auto& n : report.notices) os << "note: " << n << '\n';
    line(report.columns);
    for (const auto& row : rows) line(row);
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace fieldtail
