#include "walkdrift/csv.hpp"

#include <cstdio>
#include <fstream>

#include "walkdrift/errors.hpp"

namespace walkdrift::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Table::set_meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
}

void Table::add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw Error("csv: row width mismatch");
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_double(v));
    rows_.push_back(std::move(cells));
}

void Table::add_row_text(const std::vector<std::string>& row) {
    if (row.size() != columns_.size()) throw Error("csv: row width mismatch");
    rows_.push_back(row);
}

std::string Table::render() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out += columns_[i];
        out += i + 1 < columns_.size() ? ',' : '\n';
    }
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            out += i + 1 < row.size() ? ',' : '\n';
        }
    }
    return out;
}

void Table::write_atomic(const std::filesystem::path& path) const {
    write_text_atomic(path, render());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace walkdrift::csv
