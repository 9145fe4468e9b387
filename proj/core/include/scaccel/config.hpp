#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scaccel {

/// Flat `key = value` configuration file with '#' comments. Keys are unique;
/// a repeated key overwrites the earlier value.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_stream(std::istream& in);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const; // throws when missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

std::vector<std::string> split_list(const std::string& csv);

} // namespace scaccel
