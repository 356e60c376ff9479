#include "gencal/csv.hpp"

#include "gencal/config.hpp"

#include <charconv>
#include <sstream>

namespace gencal {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view kind,
                     const std::vector<std::string>& columns)
    : out_(path), path_(path) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    out_ << "# gencal-schema: " << kSchemaVersion << ' ' << kind << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << columns[c];
    out_ << '\n';
}

CsvWriter& CsvWriter::operator<<(double value) {
    if (!first_) out_ << ',';
    out_ << format_double(value);
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view text) {
    if (!first_) out_ << ',';
    out_ << text;
    first_ = false;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
    if (!out_) throw Error("write failed on " + path_.string());
}

int CsvTable::column(std::string_view name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) return static_cast<int>(c);
    }
    return -1;
}

double CsvTable::number(std::size_t row, int col) const {
    const std::string& s = rows.at(row).at(static_cast<std::size_t>(col));
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("non-numeric CSV cell '" + s + "'");
    }
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    CsvTable table;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view tag = "# gencal-schema: ";
            if (line.starts_with(tag)) {
                const auto rest = line.substr(tag.size());
                const auto space = rest.find(' ');
                if (space != std::string::npos) table.kind = rest.substr(space + 1);
            }
            continue;
        }
        auto cells = split(line);
        if (!have_header) {
            table.columns = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size()) {
            throw ConfigError(path.string(), lineno,
                              "expected " + std::to_string(table.columns.size()) + " cells, got " +
                                  std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw ConfigError(path.string(), lineno, "missing header row");
    return table;
}

}  // namespace gencal
