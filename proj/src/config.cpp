#include "datt/config.hpp"

#include <fstream>
#include <sstream>

#include "datt/common.hpp"

namespace datt {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) fail("UsageError", "unknown config key: " + key);
    it->second = value;
}

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("IoFailure", "cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail("UsageError", path + ":" + std::to_string(lineno) + ": expected key = value");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void Config::apply_overrides(const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        size_t eq = ov.find('=');
        if (eq == std::string::npos) fail("UsageError", "override must be key=value: " + ov);
        set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
}

std::string Config::get_str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail("UsageError", "unknown config key: " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_str(key);
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail("UsageError", "config key " + key + " is not a number: " + v);
    }
}

int Config::get_int(const std::string& key) const {
    return static_cast<int>(get_int64(key));
}

long long Config::get_int64(const std::string& key) const {
    const std::string v = get_str(key);
    try {
        size_t pos = 0;
        long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        fail("UsageError", "config key " + key + " is not an integer: " + v);
    }
}

bool Config::get_bool(const std::string& key) const {
    const std::string v = get_str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("UsageError", "config key " + key + " is not a boolean: " + v);
}

std::string Config::dump() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
}

void Config::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail("IoFailure", "cannot write config file: " + path);
    out << dump();
}

}  // namespace datt
