#include "config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace perfhom::cli {

const std::vector<std::pair<std::string, std::vector<std::string>>>& schema() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> s{
        {"experiment", {"kind", "description"}},
        {"geometry",
         {"name", "dim", "omega_lower", "omega_upper", "cell_lengths", "hole", "radius_factor", "hole_lower",
          "hole_upper", "epsilon", "gamma", "interior_holes_only", "inner_radius", "outer_radius"}},
        {"kernel", {"profile", "dim", "delta", "mode"}},
        {"grid", {"spacing", "ratio", "margin"}},
        {"solver", {"tol", "max_iter", "seed", "threads", "basis_size", "eigen_tol"}},
        {"problem", {"bc", "forcing", "forcing_scale", "eigenvalue", "layer_width", "require_certificate"}},
        {"sweep", {"epsilons", "deltas", "c0", "gamma"}},
        {"cases", {"bc", "regimes", "dim", "side", "nodes", "c0", "cell_spacing", "cell_radius"}},
        {"output", {"prefix"}},
    };
    return s;
}

namespace {

const std::vector<std::string>* keys_for(const std::string& section) {
    for (const auto& [name, keys] : schema()) {
        if (name == section) return &keys;
    }
    return nullptr;
}

// Line numbers are not kept by property_tree, so scan for them separately.
std::map<std::string, std::map<std::string, int>> locate_keys(const std::string& text) {
    std::map<std::string, std::map<std::string, int>> lines;
    std::istringstream in(text);
    std::string line, section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = boost::algorithm::trim_copy(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq != std::string::npos) lines[section][boost::algorithm::trim_copy(line.substr(0, eq))] = number;
    }
    return lines;
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
}

Config Config::parse(std::istream& in, const std::string& source) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    boost::property_tree::ptree tree;
    std::istringstream stream(text);
    try {
        boost::property_tree::ini_parser::read_ini(stream, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    Config c;
    c.source_ = source;
    c.lines_ = locate_keys(text);
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(c.where("", section) + ": key outside any section");
        }
        const auto* keys = keys_for(section);
        if (keys == nullptr) throw ConfigError(source + ": unknown section [" + section + "]");
        auto& out = c.values_[section];
        for (const auto& [key, value] : body) {
            if (std::find(keys->begin(), keys->end(), key) == keys->end()) {
                throw ConfigError(c.where(section, key) + ": unknown key");
            }
            out[key] = boost::algorithm::trim_copy(value.data());
        }
    }
    if (!c.has("experiment", "kind")) throw ConfigError(source + ": missing [experiment] kind");
    return c;
}

std::string Config::where(const std::string& section, const std::string& key) const {
    std::string loc = source_;
    const auto s = lines_.find(section);
    if (s != lines_.end()) {
        const auto k = s->second.find(key);
        if (k != s->second.end()) loc += ":" + std::to_string(k->second);
    }
    return loc + ": [" + section + "] " + key;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    return s != values_.end() && s->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return values_.count(section) > 0; }

const std::string& Config::raw(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError(source_ + ": missing required key [" + section + "] " + key);
    return values_.at(section).at(key);
}

std::string Config::text(const std::string& section, const std::string& key) const { return raw(section, key); }

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? raw(section, key) : fallback;
}

namespace {

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size();
}

}  // namespace

double Config::number(const std::string& section, const std::string& key) const {
    double v = 0.0;
    if (!parse_double(raw(section, key), v)) throw ConfigError(where(section, key) + ": expected a number");
    return v;
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

long Config::integer(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& s = raw(section, key);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || errno != 0 || end != s.c_str() + s.size()) {
        throw ConfigError(where(section, key) + ": expected an integer");
    }
    return v;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = boost::algorithm::to_lower_copy(raw(section, key));
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError(where(section, key) + ": expected true or false");
}

std::vector<std::string> Config::words(const std::string& section, const std::string& key) const {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, raw(section, key), boost::algorithm::is_any_of(","));
    for (auto& p : parts) boost::algorithm::trim(p);
    parts.erase(std::remove(parts.begin(), parts.end(), std::string{}), parts.end());
    if (parts.empty()) throw ConfigError(where(section, key) + ": empty list");
    return parts;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : words(section, key)) {
        double v = 0.0;
        if (!parse_double(w, v)) throw ConfigError(where(section, key) + ": '" + w + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::string Config::normalized() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, keys] : schema()) {
        const auto s = values_.find(section);
        if (s == values_.end()) continue;
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& key : keys) {
            const auto k = s->second.find(key);
            if (k != s->second.end()) out << key << " = " << k->second << '\n';
        }
    }
    return out.str();
}

}  // namespace perfhom::cli
