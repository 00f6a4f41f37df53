#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace fieldtail {

inline constexpr const char* kVersion = "0.1.0";

/// A table of string cells plus a provenance header. Numeric cells are written
/// with shortest round-trip formatting, so CSV emission and parsing are exact
/// inverses.
struct Report {
    nlohmann::json header = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notices;

    void add_row(std::vector<std::string> row);
    /// Index of a column; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;

    bool operator==(const Report&) const = default;
};

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);
std::string format_number(std::size_t v);
std::string format_bool(bool v);

/// RFC 4180 quoting for one field.
std::string csv_escape(const std::string& field);
/// Header and notices go in leading "#" lines; the rest is plain CSV.
void write_csv(std::ostream& os, const Report& report);
std::string to_csv(const Report& report);
/// Throws std::runtime_error on malformed input.
Report parse_csv(std::istream& is);
Report parse_csv(const std::string& text);

nlohmann::json to_json(const Report& report);
void write_text(std::ostream& os, const Report& report);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace fieldtail
