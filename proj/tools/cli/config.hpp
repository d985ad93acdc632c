#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perfhom::cli {

/// Malformed or inconsistent configuration; the message names the key and, when known, the line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// INI document: `[section]` headers, `key = value` lines, `;` comments.
/// Lists are comma separated. Every section and key is checked against a
/// fixed schema on load.
class Config {
public:
    static Config load(const std::string& path);
    static Config parse(std::istream& in, const std::string& source = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    std::string text(const std::string& section, const std::string& key) const;
    std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
    double number(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    long integer(const std::string& section, const std::string& key, long fallback) const;
    bool flag(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key) const;
    std::vector<std::string> words(const std::string& section, const std::string& key) const;

    /// Sections and keys in schema order, values trimmed, one `key = value` per line.
    std::string normalized() const;

    /// The experiment kind from [experiment] kind.
    std::string kind() const { return text("experiment", "kind"); }

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::map<std::string, std::map<std::string, int>> lines_;
    std::string source_;

    std::string where(const std::string& section, const std::string& key) const;
    const std::string& raw(const std::string& section, const std::string& key) const;
};

/// Sections in schema order with their accepted keys.
const std::vector<std::pair<std::string, std::vector<std::string>>>& schema();

}  // namespace perfhom::cli
