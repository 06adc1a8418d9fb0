#include "nprach/keyvalue.hpp"

#include "nprach/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nprach {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text, const std::string& origin)
{
    KeyValueFile kv;
    kv.origin_ = origin;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty())
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.entries_.emplace(key, value).second)
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError("read failed on '" + path + "'");
    return parse(ss.str(), path);
}

const std::string& KeyValueFile::at(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw ValidationError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::vector<std::string> KeyValueFile::unknown_keys(const std::vector<std::string>& known) const
{
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            out.push_back(key);
    }
    return out;
}

double KeyValueFile::get_double(const std::string& key) const
{
    const std::string& s = at(key);
    if (s == "inf" || s == "+inf")
        return INFINITY;
    if (s == "-inf")
        return -INFINITY;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ValidationError(origin_ + ": key '" + key + "' is not a number: '" + s + "'");
    return value;
}

long long KeyValueFile::get_int(const std::string& key) const
{
    const std::string& s = at(key);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ValidationError(origin_ + ": key '" + key + "' is not an integer: '" + s + "'");
    return value;
}

bool KeyValueFile::get_bool(const std::string& key) const
{
    const std::string& s = at(key);
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    throw ValidationError(origin_ + ": key '" + key + "' is not a boolean: '" + s + "'");
}

std::string KeyValueFile::to_string() const
{
    std::string out;
    for (const auto& [key, value] : entries_)
        out += key + " = " + value + "\n";
    return out;
}

std::string format_double(double value)
{
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace nprach
