#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace walkdrift::csv {

// Plot-ready CSV table: optional `# key: value` preamble lines, one header
// row, reals rendered with 17 significant digits for exact double round-trip.
class Table {
  public:
    Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void set_meta(const std::string& key, const std::string& value);
    void add_row(const std::vector<double>& row);
    void add_row_text(const std::vector<std::string>& row);

    std::string render() const;

    // write-temp-then-rename so partially written artifacts never appear
    void write_atomic(const std::filesystem::path& path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace walkdrift::csv
