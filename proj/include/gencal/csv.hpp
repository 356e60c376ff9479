#pragma once

#include "gencal/common.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gencal {

inline constexpr int kSchemaVersion = 1;

/// Comma-separated table with a leading `# gencal-schema: <v> <kind>` line.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view kind,
              const std::vector<std::string>& columns);

    CsvWriter& operator<<(double value);
    CsvWriter& operator<<(std::string_view text);
    void end_row();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    bool first_ = true;
};

struct CsvTable {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const;  ///< -1 when absent
    double number(std::size_t row, int col) const;
};

/// Reads a table written by CsvWriter. Throws ConfigError with the line number
/// on a ragged row or a missing header.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace gencal
