#include "permacox/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace permacox {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

void write_stamp(std::ofstream& out, const std::string& manifest_hash) {
    if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << "\n";
}

bool split_fields(const std::string& line, std::vector<std::string>& fields) {
    fields.clear();
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return !fields.empty();
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    while (ptr != end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& s, long long& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    while (ptr != end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    return ec == std::errc() && ptr == end;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

PointReadResult read_points_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    PointReadResult result;
    std::string line;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.find("lat") != std::string::npos) continue;  // header row
        }
        ++result.rows_read;
        split_fields(line, fields);
        GeoPoint p;
        long long year = 0;
        const bool ok = fields.size() == 3 && parse_double(fields[0], p.lat) &&
                        parse_double(fields[1], p.lon) && parse_int(fields[2], year) &&
                        p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
        if (!ok) {
            ++result.malformed_count;
            if (result.malformed.size() < 100) result.malformed.push_back({line_no, line});
            continue;
        }
        p.year = static_cast<int>(year);
        result.points.push_back(p);
    }
    return result;
}

void write_points_csv(const std::filesystem::path& path, std::span<const GeoPoint> points,
                      const std::string& manifest_hash) {
    auto out = open_out(path);
    write_stamp(out, manifest_hash);
    out << "lat,lon,year\n";
    for (const auto& p : points)
        out << format_double(p.lat) << ',' << format_double(p.lon) << ',' << p.year << '\n';
}

void write_counts_csv(const std::filesystem::path& path, const CountField& field,
                      const LatticeSpec& lattice, const std::string& manifest_hash) {
    auto out = open_out(path);
    write_stamp(out, manifest_hash);
    out << "# lattice rows=" << lattice.rows << " cols=" << lattice.cols
        << " unit=" << format_double(lattice.unit)
        << " origin_lat=" << format_double(lattice.origin_lat)
        << " origin_lon=" << format_double(lattice.origin_lon) << "\n";
    out << "# replicates";
    for (int label : field.replicate_labels()) out << ' ' << label;
    out << "\n";
    out << "row,col,replicate,count\n";
    for (int cell = 0; cell < field.cell_count(); ++cell) {
        const auto counts = field.cell_counts(cell);
        for (int k = 0; k < field.replicates(); ++k) {
            if (counts[k] == 0) continue;  // sparse output
            out << cell / field.cols() << ',' << cell % field.cols() << ','
                << field.replicate_labels()[k] << ',' << counts[k] << '\n';
        }
    }
}

CountsReadResult read_counts_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    LatticeSpec lattice;
    std::vector<int> labels;
    bool have_lattice = false;
    std::vector<std::string> fields;

    std::vector<std::array<long long, 4>> rows;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ss(line.substr(1));
            std::string tag;
            ss >> tag;
            if (tag == "lattice") {
                std::string kv;
                while (ss >> kv) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) continue;
                    const std::string key = kv.substr(0, eq);
                    const std::string val = kv.substr(eq + 1);
                    if (key == "rows") lattice.rows = std::stoi(val);
                    else if (key == "cols") lattice.cols = std::stoi(val);
                    else if (key == "unit") lattice.unit = std::stod(val);
                    else if (key == "origin_lat") lattice.origin_lat = std::stod(val);
                    else if (key == "origin_lon") lattice.origin_lon = std::stod(val);
                }
                have_lattice = true;
            } else if (tag == "replicates") {
                int label;
                while (ss >> label) labels.push_back(label);
            }
            continue;
        }
        if (line.find("row") == 0) continue;  // header
        split_fields(line, fields);
        if (fields.size() != 4) throw std::runtime_error("counts csv: malformed line: " + line);
        std::array<long long, 4> rec{};
        for (int i = 0; i < 4; ++i)
            if (!parse_int(fields[i], rec[i]))
                throw std::runtime_error("counts csv: malformed line: " + line);
        rows.push_back(rec);
    }
    if (!have_lattice) throw std::runtime_error("counts csv: missing lattice metadata");
    if (labels.empty()) throw std::runtime_error("counts csv: missing replicate labels");

    CountsReadResult result{CountField(lattice.rows, lattice.cols, labels), lattice};
    std::map<int, int> rep_of_label;
    for (std::size_t i = 0; i < labels.size(); ++i) rep_of_label[labels[i]] = int(i);
    for (const auto& rec : rows) {
        const auto it = rep_of_label.find(int(rec[2]));
        if (it == rep_of_label.end() || rec[0] < 0 || rec[0] >= lattice.rows || rec[1] < 0 ||
            rec[1] >= lattice.cols || rec[3] < 0)
            throw std::runtime_error("counts csv: entry out of range");
        result.field.at(int(rec[0]) * lattice.cols + int(rec[1]), it->second) =
            static_cast<std::uint32_t>(rec[3]);
    }
    return result;
}

void write_totals_csv(const std::filesystem::path& path, std::span<const int> labels,
                      std::span<const double> totals, const std::string& manifest_hash) {
    auto out = open_out(path);
    write_stamp(out, manifest_hash);
    out << "replicate,total\n";
    for (std::size_t i = 0; i < totals.size(); ++i)
        out << labels[i] << ',' << format_double(totals[i]) << '\n';
}

void write_decay_csv(const std::filesystem::path& path, const DecayCurve& curve,
                     const std::string& manifest_hash) {
    auto out = open_out(path);
    write_stamp(out, manifest_hash);
    out << "r,cov,pairs\n";
    for (const auto& bin : curve.bins)
        out << format_double(bin.r) << ',' << format_double(bin.cov) << ',' << bin.pairs << '\n';
}

RegionMask read_mask_csv(const std::filesystem::path& path, int rows, int cols) {
    auto in = open_in(path);
    RegionMask mask;
    mask.rows = rows;
    mask.cols = cols;
    mask.flags.assign(std::size_t(rows) * cols, 0);
    std::string line;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty() || line[0] == '#' || line.find("row") == 0) continue;
        split_fields(line, fields);
        long long r = 0, c = 0;
        if (fields.size() != 2 || !parse_int(fields[0], r) || !parse_int(fields[1], c))
            throw std::runtime_error("mask csv: malformed line: " + line);
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw std::runtime_error("mask csv: cell outside grid: " + line);
        mask.flags[std::size_t(r) * cols + c] = 1;
    }
    return mask;
}

void write_mask_csv(const std::filesystem::path& path, const RegionMask& mask) {
    auto out = open_out(path);
    out << "row,col\n";
    for (int r = 0; r < mask.rows; ++r)
        for (int c = 0; c < mask.cols; ++c)
            if (mask.at(r, c)) out << r << ',' << c << '\n';
}

nlohmann::json spec_to_json(const PermanentalSpec& spec) {
    nlohmann::json j;
    j["lattice"] = {{"origin_lat", spec.lattice.origin_lat},
                    {"origin_lon", spec.lattice.origin_lon},
                    {"unit", spec.lattice.unit},
                    {"rows", spec.lattice.rows},
                    {"cols", spec.lattice.cols}};
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : spec.mask.cells()) cells.push_back({cell.row, cell.col});
    j["mask"] = {{"rows", spec.mask.rows}, {"cols", spec.mask.cols}, {"cells", cells}};
    j["l"] = spec.l;
    j["lambda_c"] = spec.lambda_c;
    j["sigma2"] = spec.sigma2;
    // The discretization behind sample_counts, recorded with every spec.
    j["count_model"] = "conditional-poisson-per-cell";
    return j;
}

PermanentalSpec spec_from_json(const nlohmann::json& j) {
    PermanentalSpec spec;
    const auto& lat = j.at("lattice");
    spec.lattice.origin_lat = lat.at("origin_lat").get<double>();
    spec.lattice.origin_lon = lat.at("origin_lon").get<double>();
    spec.lattice.unit = lat.at("unit").get<double>();
    spec.lattice.rows = lat.at("rows").get<int>();
    spec.lattice.cols = lat.at("cols").get<int>();
    const auto& mask = j.at("mask");
    spec.mask.rows = mask.at("rows").get<int>();
    spec.mask.cols = mask.at("cols").get<int>();
    spec.mask.flags.assign(std::size_t(spec.mask.rows) * spec.mask.cols, 0);
    for (const auto& cell : mask.at("cells"))
        spec.mask.set(cell.at(0).get<int>(), cell.at(1).get<int>(), true);
    spec.l = j.at("l").get<int>();
    spec.lambda_c = j.at("lambda_c").get<double>();
    spec.sigma2 = j.at("sigma2").get<std::vector<std::vector<double>>>();
    spec.validate();
    return spec;
}

void write_spec_json(const std::filesystem::path& path, const PermanentalSpec& spec,
                     const std::string& manifest_hash) {
    nlohmann::json j = spec_to_json(spec);
    if (!manifest_hash.empty()) j["manifest"] = manifest_hash;
    write_json(path, j);
}

PermanentalSpec read_spec_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    nlohmann::json j;
    in >> j;
    return spec_from_json(j);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace permacox
