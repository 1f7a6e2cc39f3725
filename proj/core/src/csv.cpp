#include "hwv/csv.hpp"

#include "hwv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hwv {

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

bool CsvTable::has(const std::string& name) const
{
    return std::find(headers.begin(), headers.end(), name) != headers.end();
}

const std::vector<double>& CsvTable::column(const std::string& name) const
{
    const auto it = std::find(headers.begin(), headers.end(), name);
    require(it != headers.end(), "CSV has no column named '" + name + "'");
    return columns[static_cast<std::size_t>(it - headers.begin())];
}

void CsvTable::add(std::string name, std::vector<double> values)
{
    require(columns.empty() || values.size() == rows(), "CSV column '" + name + "' has the wrong length");
    headers.push_back(std::move(name));
    columns.push_back(std::move(values));
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    require(in.good(), "cannot open CSV file " + path.string());
    CsvTable t;
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "CSV file " + path.string() + " is empty");
    t.headers = split(line);
    t.columns.assign(t.headers.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        require(cells.size() == t.headers.size(),
                path.string() + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " fields");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cells[c], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            require(used == cells[c].size() && used > 0,
                    path.string() + ": row " + std::to_string(row) + ": not a number: '" + cells[c] + "'");
            t.columns[c].push_back(v);
        }
    }
    return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    std::ofstream out(path);
    require(out.good(), "cannot write CSV file " + path.string());
    for (std::size_t c = 0; c < table.headers.size(); ++c) out << (c ? "," : "") << table.headers[c];
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", table.columns[c][r]);
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
}

std::vector<double> load_grid_profile(const std::filesystem::path& path, std::size_t n)
{
    const CsvTable t = read_csv(path);
    require(t.columns.size() == 2, path.string() + ": expected two columns (x, value)");
    require(t.rows() >= 2, path.string() + ": need at least two rows");
    std::vector<std::size_t> order(t.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.columns[0][a] < t.columns[0][b]; });
    std::vector<double> xs, vs;
    for (std::size_t i : order) {
        xs.push_back(t.columns[0][i]);
        vs.push_back(t.columns[1][i]);
    }
    for (double v : vs) require(std::isfinite(v), path.string() + ": non-finite profile value");
    // periodic extension across the ends
    const double x_first = xs.front() + 1.0;
    const double v_first = vs.front();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n);
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        double x0, x1, v0, v1;
        if (it == xs.begin()) {
            x0 = xs.back() - 1.0; v0 = vs.back();
            x1 = xs.front();      v1 = vs.front();
        } else if (it == xs.end()) {
            x0 = xs.back(); v0 = vs.back();
            x1 = x_first;   v1 = v_first;
        } else {
            const std::size_t k = static_cast<std::size_t>(it - xs.begin());
            x0 = xs[k - 1]; v0 = vs[k - 1];
            x1 = xs[k];     v1 = vs[k];
        }
        const double t01 = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        out[i] = v0 + t01 * (v1 - v0);
    }
    return out;
}

} // namespace hwv
