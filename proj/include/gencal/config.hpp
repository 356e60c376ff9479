#pragma once

#include "gencal/common.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gencal {

/// Flat `key = value` text configuration split into `[section]` blocks.
///
/// Comments start with `#` and run to the end of the line. Every value keeps
/// the line it came from so that consumers can report precise diagnostics.
class ConfigDocument {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::string comment;
        int line = 0;
    };

    static ConfigDocument parse(std::string_view text, std::string source = "<memory>");
    static ConfigDocument load(const std::filesystem::path& path);

    const std::string& source() const noexcept { return source_; }

    bool has_section(std::string_view section) const;
    bool has(std::string_view section, std::string_view key) const;
    const Entry* find(std::string_view section, std::string_view key) const;

    double get_double(std::string_view section, std::string_view key) const;
    double get_double(std::string_view section, std::string_view key, double fallback) const;
    std::string get_string(std::string_view section, std::string_view key) const;
    std::string get_string(std::string_view section, std::string_view key,
                           std::string_view fallback) const;
    long long get_int(std::string_view section, std::string_view key, long long fallback) const;

    /// Throws ConfigError naming the first key of `section` not in `known`.
    void require_known_keys(std::string_view section, const std::vector<std::string>& known) const;

    void set(std::string_view section, std::string_view key, std::string value,
             std::string comment = {});
    void set(std::string_view section, std::string_view key, double value,
             std::string comment = {});

    std::vector<std::string> sections() const;
    const std::vector<Entry>& entries(std::string_view section) const;

    std::string to_string() const;
    void save(const std::filesystem::path& path) const;

    [[noreturn]] void fail(const Entry& entry, const std::string& what) const;

private:
    std::string source_;
    std::vector<std::string> order_;
    std::map<std::string, std::vector<Entry>, std::less<>> sections_;
};

/// Shortest text that parses back to the identical double.
std::string format_double(double value);

}  // namespace gencal
