#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace hwv {

// Numeric CSV with a header row.
struct CsvTable {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    bool has(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    void add(std::string name, std::vector<double> values);
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Two-column (x, value) file resampled onto x_i = i/n by linear
// interpolation, periodically extended.
std::vector<double> load_grid_profile(const std::filesystem::path& path, std::size_t n);

} // namespace hwv
