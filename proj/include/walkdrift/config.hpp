#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace walkdrift::config {

// Flat `key = value` configuration with `[section]` headers. Keys are
// snake_case, qualified as "section.key" (bare keys before any header keep
// their name). Unknown keys are hard errors at validation time.
class Config {
  public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    std::uint64_t get_seed() const;  // mandatory `seed`
    std::vector<double> get_double_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);

    // Hard error on any key outside `allowed` (reports its line number).
    void require_known_keys(const std::set<std::string>& allowed) const;

    // Canonical serialization: sorted qualified keys, one per line.
    std::string render() const;

    // FNV-1a over the canonical rendering, hex encoded.
    std::string hash() const;

  private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
};

}  // namespace walkdrift::config
