#pragma once

// Flat key=value settings shared by the config file and --set overrides.

#include "rmdp/csv.hpp"
#include "rmdp/errors.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rmdp::cli {

class Settings {
public:
    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot read config file " + path);
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            assign(line, path + ":" + std::to_string(n));
        }
    }

    void assign(const std::string& text, const std::string& where = "--set") {
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(where + ": expected key=value, got '" + text + "'");
        const auto key = trim(text.substr(0, eq));
        if (key.empty()) throw InvalidArgument(where + ": empty key");
        values_[key] = trim(text.substr(eq + 1));
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        if (!has(key)) return fallback;
        return to_number(key, text(key, ""));
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        used_.insert(key);
        if (!has(key)) return fallback;
        const auto v = text(key, "");
        std::size_t out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size())
            throw InvalidArgument("setting " + key + " must be a non-negative integer, got '" + v + "'");
        return out;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        used_.insert(key);
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const auto& item : split(text(key, ""))) out.push_back(to_number(key, item));
        if (out.empty()) throw InvalidArgument("setting " + key + " must list at least one value");
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) {
        used_.insert(key);
        if (!has(key)) return fallback;
        std::vector<std::size_t> out;
        for (const auto& item : split(text(key, ""))) {
            const double x = to_number(key, item);
            if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x)))
                throw InvalidArgument("setting " + key + " must list non-negative integers");
            out.push_back(static_cast<std::size_t>(x));
        }
        return out;
    }

    /// Throws on any key that no command read.
    void reject_unused() const {
        for (const auto& [key, value] : values_)
            if (!used_.count(key)) throw InvalidArgument("unknown setting '" + key + "'");
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= s.size()) {
            const auto comma = s.find(',', start);
            const auto item = trim(s.substr(start, comma == std::string::npos ? std::string::npos
                                                                              : comma - start));
            if (!item.empty()) out.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    static double to_number(const std::string& key, const std::string& v) {
        try {
            return csv::parse_number(v, 0);
        } catch (const DataError&) {
            throw InvalidArgument("setting " + key + " must be a number, got '" + v + "'");
        }
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

} // namespace rmdp::cli
