#pragma once

// Geographic gridding: point records binned into unit cells, region masks,
// and square block sums over the resulting count field.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace permacox {

struct GeoPoint {
    double lat = 0.0;  // decimal degrees
    double lon = 0.0;
    int year = 0;
};

// Axis-aligned grid of square cells. Cell (i,j) covers the half-open square
// whose top-left corner sits at (origin_lat - i*unit, origin_lon + j*unit);
// the top and left edges belong to the cell.
struct LatticeSpec {
    double origin_lat = 0.0;  // top-left corner of the grid
    double origin_lon = 0.0;
    double unit = 0.01;       // cell side in degrees
    int rows = 0;
    int cols = 0;

    int cell_count() const { return rows * cols; }
    int index(int row, int col) const { return row * cols + col; }

    void validate() const;
    bool locate(double lat, double lon, int& row, int& col) const;
};

struct CellRef {
    int row = 0;
    int col = 0;
};

// Max-norm distance in grid units.
inline int maxnorm(const CellRef& a, const CellRef& b) {
    const int dr = a.row >= b.row ? a.row - b.row : b.row - a.row;
    const int dc = a.col >= b.col ? a.col - b.col : b.col - a.col;
    return dr > dc ? dr : dc;
}

struct RegionMask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> flags;  // row-major, rows*cols entries

    static RegionMask full(int rows, int cols);
    static RegionMask rect(int rows, int cols, int r0, int c0, int height, int width);

    bool at(int row, int col) const { return flags[row * cols + col] != 0; }
    void set(int row, int col, bool on) { flags[row * cols + col] = on ? 1 : 0; }
    int cell_count() const;
    std::vector<CellRef> cells() const;  // set cells in row-major order
    void validate() const;
};

// Counts per (cell, replicate). Replicates carry integer labels: calendar
// years for ingested data, iteration indices for simulations.
class CountField {
public:
    CountField() = default;
    CountField(int rows, int cols, std::vector<int> replicate_labels);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int cell_count() const { return rows_ * cols_; }
    int replicates() const { return static_cast<int>(labels_.size()); }
    const std::vector<int>& replicate_labels() const { return labels_; }

    std::uint32_t at(int cell, int rep) const { return data_[std::size_t(cell) * labels_.size() + rep]; }
    std::uint32_t& at(int cell, int rep) { return data_[std::size_t(cell) * labels_.size() + rep]; }
    std::span<const std::uint32_t> cell_counts(int cell) const {
        return {data_.data() + std::size_t(cell) * labels_.size(), labels_.size()};
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> labels_;
    std::vector<std::uint32_t> data_;
};

struct IngestReport {
    std::int64_t points_seen = 0;
    std::int64_t in_grid = 0;
    std::int64_t out_of_grid = 0;
    std::map<int, std::int64_t> per_year_in_grid;
};

// One replicate per distinct year, sorted ascending. Out-of-grid points are
// tallied in the report, never silently dropped.
CountField bin_points(std::span<const GeoPoint> points, const LatticeSpec& spec,
                      IngestReport* report = nullptr);

// Per-replicate sum over the n-by-n block anchored (top-left) at the given
// cell. Throws if the block leaves the grid.
std::vector<double> block_totals(const CountField& field, int n,
                                 int anchor_row, int anchor_col);

std::vector<double> mask_totals(const CountField& field, const RegionMask& mask);

}  // namespace permacox
