#include "walkdrift/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "walkdrift/errors.hpp"

namespace walkdrift::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
            return false;
        }
    }
    return true;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigParseError("unterminated section header", line_no);
            section = trim(t.substr(1, t.size() - 2));
            if (!valid_key(section)) {
                throw ConfigParseError("invalid section name '" + section + "'", line_no);
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigParseError("expected 'key = value', got '" + t + "'", line_no);
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!valid_key(key)) throw ConfigParseError("invalid key '" + key + "'", line_no);
        if (value.empty()) throw ConfigParseError("empty value for key '" + key + "'", line_no);
        const std::string qualified = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(qualified)) {
            throw ConfigParseError("duplicate key '" + qualified + "'", line_no);
        }
        cfg.values_[qualified] = value;
        cfg.lines_[qualified] = line_no;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open config file '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Config::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigParseError("missing required key '" + key + "'", 0);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigParseError("key '" + key + "' is not a real number: " + v, lines_.at(key));
    }
    return out;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
    const std::string v = get_string(key);
    char* end = nullptr;
    const long out = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigParseError("key '" + key + "' is not an integer: " + v, lines_.at(key));
    }
    return out;
}

long Config::get_long(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

std::uint64_t Config::get_seed() const {
    if (!has("seed")) throw ConfigParseError("missing required key 'seed'", 0);
    return static_cast<std::uint64_t>(get_long("seed"));
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        char* end = nullptr;
        const double x = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') {
            throw ConfigParseError("key '" + key + "' has a bad list entry: " + t, lines_.at(key));
        }
        out.push_back(x);
    }
    if (out.empty()) throw ConfigParseError("key '" + key + "' has an empty list", lines_.at(key));
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
    lines_[key] = 0;
}

void Config::require_known_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        if (!allowed.count(key)) {
            const auto it = lines_.find(key);
            throw ConfigParseError("unknown key '" + key + "'",
                                   it == lines_.end() ? 0 : it->second);
        }
    }
}

std::string Config::render() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    }
    return out;
}

std::string Config::hash() const {
    const std::string text = render();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace walkdrift::config
