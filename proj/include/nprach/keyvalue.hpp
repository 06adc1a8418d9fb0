#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nprach {

/// Flat "key = value" text file. Blank lines and lines starting with '#' are
/// ignored; duplicate keys are rejected.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile parse(std::string_view text, const std::string& origin = "<string>");
    static KeyValueFile load(const std::string& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    const std::string& at(const std::string& key) const;
    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const { return entries_; }
    const std::string& origin() const { return origin_; }

    // Keys not present in `known`, sorted.
    std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    std::string to_string() const;

private:
    std::map<std::string, std::string> entries_;
    std::string origin_;
};

std::string format_double(double value);

}  // namespace nprach
