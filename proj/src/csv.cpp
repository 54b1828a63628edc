#include "rmdp/csv.hpp"

#include "rmdp/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace rmdp::csv {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return {buf, res.ptr};
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << quote(fields[i]);
    }
    out << '\n';
}

bool read_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    std::string raw;
    if (!std::getline(in, raw)) return false;
    ++line;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0;; ++i) {
        if (i == raw.size()) {
            if (!quoted) break;
            // quoted field continues on the next physical line
            std::string more;
            if (!std::getline(in, more)) throw DataError("unterminated quoted field", line);
            ++line;
            field += '\n';
            raw = std::move(more);
            i = static_cast<std::size_t>(-1);
            continue;
        }
        const char c = raw[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

double parse_number(const std::string& field, std::size_t line) {
    double x = 0.0;
    const char* end = field.data() + field.size();
    auto res = std::from_chars(field.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end)
        throw DataError("expected a number, got '" + field + "'", line);
    return x;
}

long parse_integer(const std::string& field, std::size_t line) {
    long x = 0;
    const char* end = field.data() + field.size();
    auto res = std::from_chars(field.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end)
        throw DataError("expected an integer, got '" + field + "'", line);
    return x;
}

} // namespace rmdp::csv
