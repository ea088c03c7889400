#pragma once

#include <map>
#include <string>
#include <vector>

namespace datt {

// Flat key-value configuration with dotted section keys ("train.epochs").
// A Config is always created from a defaults table; loading a file or
// applying overrides rejects keys absent from the defaults, so typos fail
// loudly instead of silently running with defaults.
class Config {
public:
    Config() = default;
    explicit Config(const std::map<std::string, std::string>& defaults) : values_(defaults) {}

    // Parse "key = value" lines; '#' starts a comment; blank lines ignored.
    void load_file(const std::string& path);
    // Each override is "key=value".
    void apply_overrides(const std::vector<std::string>& overrides);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_str(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    long long get_int64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    // Deterministic dump (sorted keys), suitable for re-loading.
    std::string dump() const;
    void write_file(const std::string& path) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace datt
