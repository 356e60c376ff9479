#include "gencal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gencal {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

const std::vector<ConfigDocument::Entry> kNoEntries;

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
    ConfigDocument doc;
    doc.source_ = std::move(source);
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        std::string comment;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            comment = std::string(trim(raw.substr(hash + 1)));
            raw = raw.substr(0, hash);
        }
        const auto line = trim(raw);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || !valid_name(trim(line.substr(1, line.size() - 2)))) {
                throw ConfigError(doc.source_, line_no, "malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!doc.sections_.contains(section)) {
                doc.order_.push_back(section);
                doc.sections_[section];
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(doc.source_, line_no, "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!valid_name(key)) throw ConfigError(doc.source_, line_no, "invalid key");
        if (value.empty()) {
            throw ConfigError(doc.source_, line_no, "missing value for '" + std::string(key) + "'");
        }
        if (doc.has(section, key)) {
            throw ConfigError(doc.source_, line_no, "duplicate key '" + std::string(key) + "'");
        }
        if (!doc.sections_.contains(section)) {
            doc.order_.push_back(section);
        }
        doc.sections_[section].push_back(
            Entry{std::string(key), std::string(value), std::move(comment), line_no});
        if (end == text.size()) break;
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

bool ConfigDocument::has_section(std::string_view section) const {
    return sections_.find(section) != sections_.end();
}

const ConfigDocument::Entry* ConfigDocument::find(std::string_view section,
                                                  std::string_view key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    for (const auto& e : it->second) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

bool ConfigDocument::has(std::string_view section, std::string_view key) const {
    return find(section, key) != nullptr;
}

void ConfigDocument::fail(const Entry& entry, const std::string& what) const {
    throw ConfigError(source_, entry.line, what);
}

double ConfigDocument::get_double(std::string_view section, std::string_view key) const {
    const Entry* e = find(section, key);
    if (e == nullptr) {
        throw ConfigError(source_, 0,
                          "missing key '" + std::string(key) + "' in [" + std::string(section) + "]");
    }
    double v = 0.0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        fail(*e, "'" + e->key + "' is not a number: " + e->value);
    }
    return v;
}

double ConfigDocument::get_double(std::string_view section, std::string_view key,
                                  double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::string ConfigDocument::get_string(std::string_view section, std::string_view key) const {
    const Entry* e = find(section, key);
    if (e == nullptr) {
        throw ConfigError(source_, 0,
                          "missing key '" + std::string(key) + "' in [" + std::string(section) + "]");
    }
    return e->value;
}

std::string ConfigDocument::get_string(std::string_view section, std::string_view key,
                                       std::string_view fallback) const {
    const Entry* e = find(section, key);
    return e != nullptr ? e->value : std::string(fallback);
}

long long ConfigDocument::get_int(std::string_view section, std::string_view key,
                                  long long fallback) const {
    const Entry* e = find(section, key);
    if (e == nullptr) return fallback;
    long long v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        fail(*e, "'" + e->key + "' is not an integer: " + e->value);
    }
    return v;
}

void ConfigDocument::require_known_keys(std::string_view section,
                                        const std::vector<std::string>& known) const {
    for (const auto& e : entries(section)) {
        if (std::find(known.begin(), known.end(), e.key) == known.end()) {
            fail(e, "unknown key '" + e.key + "' in [" + std::string(section) + "]");
        }
    }
}

void ConfigDocument::set(std::string_view section, std::string_view key, std::string value,
                         std::string comment) {
    auto it = sections_.find(section);
    if (it == sections_.end()) {
        order_.emplace_back(section);
        it = sections_.emplace(std::string(section), std::vector<Entry>{}).first;
    }
    for (auto& e : it->second) {
        if (e.key == key) {
            e.value = std::move(value);
            if (!comment.empty()) e.comment = std::move(comment);
            return;
        }
    }
    it->second.push_back(Entry{std::string(key), std::move(value), std::move(comment), 0});
}

void ConfigDocument::set(std::string_view section, std::string_view key, double value,
                         std::string comment) {
    set(section, key, format_double(value), std::move(comment));
}

std::vector<std::string> ConfigDocument::sections() const { return order_; }

const std::vector<ConfigDocument::Entry>& ConfigDocument::entries(std::string_view section) const {
    const auto it = sections_.find(section);
    return it == sections_.end() ? kNoEntries : it->second;
}

std::string ConfigDocument::to_string() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& name : order_) {
        const auto& list = sections_.at(name);
        if (!name.empty()) {
            if (!first) out << '\n';
            out << '[' << name << "]\n";
        }
        first = false;
        std::size_t width = 0;
        for (const auto& e : list) width = std::max(width, e.key.size());
        for (const auto& e : list) {
            out << e.key << std::string(width - e.key.size(), ' ') << " = " << e.value;
            if (!e.comment.empty()) out << "  # " << e.comment;
            out << '\n';
        }
    }
    return out.str();
}

void ConfigDocument::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string(), 0, "cannot write config file");
    out << to_string();
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace gencal
