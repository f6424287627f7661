#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace chainrisk {

/// Shortest round-trip decimal for finite values ("%.17g"); "nan", "inf",
/// "-inf" otherwise.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// RFC-4180 field: quoted only when it holds a comma, quote, CR or LF.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or npos.
    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return static_cast<std::size_t>(-1);
    }

    /// CRLF-terminated records.
    std::string str() const {
        std::string out;
        auto line = [&out](const std::vector<std::string>& fields) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) out.push_back(',');
                out += csv_field(fields[i]);
            }
            out += "\r\n";
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

}  // namespace chainrisk
