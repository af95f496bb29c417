#include "permacox/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace permacox {

void LatticeSpec::validate() const {
    if (!(unit > 0.0)) throw std::invalid_argument("lattice: unit must be > 0");
    if (rows < 1 || cols < 1) throw std::invalid_argument("lattice: rows and cols must be >= 1");
    if (origin_lat < -90.0 || origin_lat > 90.0 || origin_lon < -180.0 || origin_lon > 180.0)
        throw std::invalid_argument("lattice: origin out of geographic range");
}

bool LatticeSpec::locate(double lat, double lon, int& row, int& col) const {
    // Rows grow southward from the top-left origin; top/left edges inclusive.
    const double di = (origin_lat - lat) / unit;
    const double dj = (lon - origin_lon) / unit;
    const double fi = std::floor(di);
    const double fj = std::floor(dj);
    if (fi < 0.0 || fi >= rows || fj < 0.0 || fj >= cols) return false;
    row = static_cast<int>(fi);
    col = static_cast<int>(fj);
    return true;
}

RegionMask RegionMask::full(int rows, int cols) {
    RegionMask m;
    m.rows = rows;
    m.cols = cols;
    m.flags.assign(std::size_t(rows) * cols, 1);
    return m;
}

RegionMask RegionMask::rect(int rows, int cols, int r0, int c0, int height, int width) {
    if (r0 < 0 || c0 < 0 || height < 1 || width < 1 || r0 + height > rows || c0 + width > cols)
        throw std::invalid_argument("mask: rectangle outside grid");
    RegionMask m;
    m.rows = rows;
    m.cols = cols;
    m.flags.assign(std::size_t(rows) * cols, 0);
    for (int r = r0; r < r0 + height; ++r)
        for (int c = c0; c < c0 + width; ++c)
            m.flags[std::size_t(r) * cols + c] = 1;
    return m;
}

int RegionMask::cell_count() const {
    int n = 0;
    for (auto f : flags) n += (f != 0);
    return n;
}

std::vector<CellRef> RegionMask::cells() const {
    std::vector<CellRef> out;
    out.reserve(cell_count());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (at(r, c)) out.push_back({r, c});
    return out;
}

void RegionMask::validate() const {
    if (rows < 1 || cols < 1 || flags.size() != std::size_t(rows) * cols)
        throw std::invalid_argument("mask: inconsistent dimensions");
}

CountField::CountField(int rows, int cols, std::vector<int> replicate_labels)
    : rows_(rows), cols_(cols), labels_(std::move(replicate_labels)) {
    if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("count field: empty grid");
    if (labels_.empty()) throw std::invalid_argument("count field: no replicates");
    data_.assign(std::size_t(rows_) * cols_ * labels_.size(), 0);
}

CountField bin_points(std::span<const GeoPoint> points, const LatticeSpec& spec,
                      IngestReport* report) {
    spec.validate();
    std::set<int> years;
    for (const auto& p : points) years.insert(p.year);
    if (years.empty()) throw std::invalid_argument("bin_points: no replicates");

    std::vector<int> labels(years.begin(), years.end());
    CountField field(spec.rows, spec.cols, labels);
    std::map<int, int> rep_of_year;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) rep_of_year[labels[i]] = i;

    IngestReport local;
    for (const auto& p : points) {
        ++local.points_seen;
        int row = 0, col = 0;
        if (!spec.locate(p.lat, p.lon, row, col)) {
            ++local.out_of_grid;
            continue;
        }
        ++local.in_grid;
        ++local.per_year_in_grid[p.year];
        ++field.at(spec.index(row, col), rep_of_year[p.year]);
    }
    if (report) *report = std::move(local);
    return field;
}

std::vector<double> block_totals(const CountField& field, int n,
                                 int anchor_row, int anchor_col) {
    if (n < 1) throw std::invalid_argument("block_totals: n must be >= 1");
    const int r_end = anchor_row + n;
    const int c_end = anchor_col + n;
    if (anchor_row < 0 || anchor_col < 0 || r_end > field.rows() || c_end > field.cols()) {
        const int rc = std::min(std::max(r_end, 0), field.rows());
        const int cc = std::min(std::max(c_end, 0), field.cols());
        throw std::invalid_argument(
            "block_totals: block [" + std::to_string(anchor_row) + "," + std::to_string(r_end) +
            ")x[" + std::to_string(anchor_col) + "," + std::to_string(c_end) +
            ") exceeds grid; clipped extent [" + std::to_string(std::max(anchor_row, 0)) + "," +
            std::to_string(rc) + ")x[" + std::to_string(std::max(anchor_col, 0)) + "," +
            std::to_string(cc) + ")");
    }
    std::vector<double> totals(field.replicates(), 0.0);
    for (int r = anchor_row; r < r_end; ++r)
        for (int c = anchor_col; c < c_end; ++c) {
            const auto counts = field.cell_counts(r * field.cols() + c);
            for (int k = 0; k < field.replicates(); ++k) totals[k] += counts[k];
        }
    return totals;
}

std::vector<double> mask_totals(const CountField& field, const RegionMask& mask) {
    mask.validate();
    if (mask.rows != field.rows() || mask.cols != field.cols())
        throw std::invalid_argument("mask_totals: mask dimensions do not match grid");
    std::vector<double> totals(field.replicates(), 0.0);
    for (int cell = 0; cell < field.cell_count(); ++cell) {
        if (!mask.flags[cell]) continue;
        const auto counts = field.cell_counts(cell);
        for (int k = 0; k < field.replicates(); ++k) totals[k] += counts[k];
    }
    return totals;
}

}  // namespace permacox
