#include "scwd/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "scwd/errors.hpp"

namespace scwd::io {

namespace {

constexpr std::array<char, 8> kStackMagic = {'S', 'C', 'W', 'D', 'S', 'T', 'K', '\0'};
constexpr std::array<char, 8> kWeightMagic = {'S', 'C', 'W', 'D', 'W', 'G', 'T', '\0'};
constexpr std::array<char, 8> kQuantMagic = {'S', 'C', 'W', 'D', 'Q', 'N', 'T', '\0'};
constexpr std::array<char, 8> kMapMagic = {'S', 'C', 'W', 'D', 'M', 'A', 'P', '\0'};

// --- little-endian primitives ---------------------------------------------

struct Writer {
    std::ofstream out;

    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw DataFormatError("cannot open for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!out) throw DataFormatError("write failure");
    }
    void magic(const std::array<char, 8>& m) { bytes(m.data(), 8); }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::array<std::uint8_t, 4> b;
        for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        bytes(b.data(), 4);
    }
    void u64(std::uint64_t v) {
        std::array<std::uint8_t, 8> b;
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        bytes(b.data(), 8);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void label(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void f64_array(const std::vector<double>& v) {
        for (const double x : v) f64(x);
    }
    void grid(const LatLonGrid& g) {
        u64(g.n_lat());
        u64(g.n_lon());
        f64(g.radius_km);
        f64_array(g.lat);
        f64_array(g.lon);
    }
};

struct Reader {
    std::ifstream in;
    std::string path;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw DataFormatError("cannot open: " + p);
    }
    void bytes(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) {
            throw DataFormatError("truncated file: " + path);
        }
    }
    void expect_magic(const std::array<char, 8>& m, const std::string& what) {
        std::array<char, 8> got;
        bytes(got.data(), 8);
        if (got != m) throw DataFormatError("not a " + what + " file: " + path);
    }
    void expect_version() {
        const std::uint32_t v = u32();
        if (v > kFormatVersion) {
            throw DataFormatError("unsupported format version " + std::to_string(v) + ": " + path);
        }
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::array<std::uint8_t, 4> b;
        bytes(b.data(), 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::array<std::uint8_t, 8> b;
        bytes(b.data(), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string label() {
        const std::uint32_t n = u32();
        if (n > (1u << 20)) throw DataFormatError("label too long: " + path);
        std::string s(n, '\0');
        if (n > 0) bytes(s.data(), n);
        return s;
    }
    std::size_t count(std::uint64_t limit = (1ull << 34)) {
        const std::uint64_t n = u64();
        if (n > limit) throw DataFormatError("implausible count in header: " + path);
        return static_cast<std::size_t>(n);
    }
    std::vector<double> f64_array(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    LatLonGrid grid() {
        const std::size_t n_lat = count(1 << 20);
        const std::size_t n_lon = count(1 << 20);
        const double radius = f64();
        auto lat = f64_array(n_lat);
        auto lon = f64_array(n_lon);
        try {
            return LatLonGrid::create(std::move(lat), std::move(lon), radius);
        } catch (const InvalidArgumentError& e) {
            throw DataFormatError(std::string("invalid grid in file: ") + e.what());
        }
    }
    void expect_eof() {
        char c;
        in.read(&c, 1);
        if (!in.eof()) throw DataFormatError("trailing bytes: " + path);
    }
};

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void digest_f64(std::string& buf, double v) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(u >> (8 * i)));
}

void digest_u64(std::string& buf, std::uint64_t u) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(u >> (8 * i)));
}

void digest_grid(std::string& buf, const LatLonGrid& g) {
    digest_u64(buf, g.n_lat());
    digest_u64(buf, g.n_lon());
    digest_f64(buf, g.radius_km);
    for (const double v : g.lat) digest_f64(buf, v);
    for (const double v : g.lon) digest_f64(buf, v);
}

}  // namespace

// --- field stacks ----------------------------------------------------------

void write_stack(const FieldStack& stack, const std::string& path) {
    stack.validate();
    Writer w(path);
    w.magic(kStackMagic);
    w.u32(kFormatVersion);
    w.u64(stack.timesteps());
    w.u64(stack.grid.n_lat());
    w.u64(stack.grid.n_lon());
    w.f64(stack.grid.radius_km);
    w.f64_array(stack.grid.lat);
    w.f64_array(stack.grid.lon);
    w.label(stack.variable);
    w.label(stack.units);
    w.u8(0);  // missing-value convention: 0 = IEEE NaN
    for (const auto& ts : stack.timestamps) w.label(ts);
    for (const float v : stack.values) w.f32(v);
}

FieldStack read_stack(const std::string& path) {
    Reader r(path);
    r.expect_magic(kStackMagic, "field stack");
    r.expect_version();
    const std::size_t T = r.count(1 << 24);
    const std::size_t n_lat = r.count(1 << 20);
    const std::size_t n_lon = r.count(1 << 20);
    const double radius = r.f64();
    auto lat = r.f64_array(n_lat);
    auto lon = r.f64_array(n_lon);
    FieldStack stack;
    try {
        stack.grid = LatLonGrid::create(std::move(lat), std::move(lon), radius);
    } catch (const InvalidArgumentError& e) {
        throw DataFormatError(std::string("invalid grid in stack file: ") + e.what());
    }
    if (T == 0) throw DataFormatError("stack file has zero timesteps: " + path);
    stack.variable = r.label();
    stack.units = r.label();
    if (r.u8() != 0) throw DataFormatError("unknown missing-value convention: " + path);
    stack.timestamps.resize(T);
    for (auto& ts : stack.timestamps) ts = r.label();
    stack.values.resize(T * stack.grid.cell_count());
    for (auto& v : stack.values) v = r.f32();
    r.expect_eof();
    return stack;
}

// --- CSV -------------------------------------------------------------------

FieldStack read_csv_fields(const std::string& path, const LatLonGrid& grid) {
    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataFormatError("empty CSV: " + path);
    // header row required
    FieldStack stack;
    stack.grid = grid;
    std::vector<std::string> order;
    std::vector<std::vector<float>> frames;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::array<std::string, 4> field;
        std::size_t start = 0;
        for (int f = 0; f < 4; ++f) {
            const auto comma = line.find(',', start);
            if (f < 3 && comma == std::string::npos) {
                throw DataFormatError("CSV line " + std::to_string(lineno) + ": expected 4 fields");
            }
            field[f] = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
            start = comma + 1;
        }
        if (!field[3].empty() && field[3].back() == '\r') field[3].pop_back();
        std::size_t li, lj;
        try {
            li = std::stoul(field[1]);
            lj = std::stoul(field[2]);
        } catch (const std::exception&) {
            throw DataFormatError("CSV line " + std::to_string(lineno) + ": bad index");
        }
        if (li >= grid.n_lat() || lj >= grid.n_lon()) {
            throw DataFormatError("CSV line " + std::to_string(lineno) + ": index out of range");
        }
        std::size_t t = 0;
        for (; t < order.size(); ++t) {
            if (order[t] == field[0]) break;
        }
        if (t == order.size()) {
            order.push_back(field[0]);
            frames.emplace_back(grid.cell_count(), kMissing);
        }
        float value = kMissing;
        if (!field[3].empty()) {
            try {
                value = std::stof(field[3]);
            } catch (const std::exception&) {
                throw DataFormatError("CSV line " + std::to_string(lineno) + ": bad value");
            }
        }
        frames[t][li * grid.n_lon() + lj] = value;
    }
    if (order.empty()) throw DataFormatError("CSV has no data rows: " + path);
    stack.timestamps = std::move(order);
    stack.values.reserve(frames.size() * grid.cell_count());
    for (const auto& f : frames) {
        stack.values.insert(stack.values.end(), f.begin(), f.end());
    }
    return stack;
}

void write_csv_fields(const FieldStack& stack, const std::string& path) {
    stack.validate();
    std::ofstream out(path);
    if (!out) throw DataFormatError("cannot open for writing: " + path);
    out << "time_label,lat_index,lon_index,value\n";
    std::ostringstream num;
    num.precision(9);
    for (std::size_t t = 0; t < stack.timesteps(); ++t) {
        for (std::size_t i = 0; i < stack.grid.n_lat(); ++i) {
            for (std::size_t j = 0; j < stack.grid.n_lon(); ++j) {
                const float v = stack.at(t, i * stack.grid.n_lon() + j);
                out << stack.timestamps[t] << ',' << i << ',' << j << ',';
                if (!is_missing(v)) {
                    num.str({});
                    num << v;
                    out << num.str();
                }
                out << '\n';
            }
        }
    }
    if (!out) throw DataFormatError("write failure: " + path);
}

// --- weight cache ----------------------------------------------------------

std::uint64_t weight_digest(const LatLonGrid& centers, const LatLonGrid& work,
                            double range_km, bool flat) {
    std::string buf;
    digest_grid(buf, centers);
    digest_grid(buf, work);
    digest_f64(buf, flat ? -1.0 : range_km);
    return fnv1a(buf);
}

void write_weights(const SparseWeightSet& w, const std::string& path) {
    Writer out(path);
    out.magic(kWeightMagic);
    out.u32(kFormatVersion);
    out.u64(weight_digest(w.centers, w.work, w.range_km, w.flat));
    out.u8(w.flat ? 1 : 0);
    out.f64(w.flat ? -1.0 : w.range_km);
    out.grid(w.centers);
    out.grid(w.work);
    out.u64(w.offsets.size());
    for (const auto o : w.offsets) out.u64(o);
    out.u64(w.cell_index.size());
    for (const auto i : w.cell_index) out.u32(i);
    for (const auto x : w.weight) out.f64(x);
}

SparseWeightSet read_weights(const std::string& path) {
    Reader r(path);
    r.expect_magic(kWeightMagic, "weight cache");
    r.expect_version();
    const std::uint64_t digest = r.u64();
    SparseWeightSet w;
    w.flat = r.u8() != 0;
    const double range = r.f64();
    w.range_km = w.flat ? kFlatRange : range;
    w.centers = r.grid();
    w.work = r.grid();
    const std::size_t n_off = r.count(1 << 24);
    if (n_off != (w.flat ? 2 : w.centers.cell_count() + 1)) {
        throw DataFormatError("weight cache offset table size mismatch: " + path);
    }
    w.offsets.resize(n_off);
    for (auto& o : w.offsets) o = r.u64();
    const std::size_t n_entries = r.count();
    if (w.offsets.back() != n_entries) {
        throw DataFormatError("weight cache entry count mismatch: " + path);
    }
    w.cell_index.resize(n_entries);
    for (auto& i : w.cell_index) {
        i = r.u32();
        if (i >= w.work.cell_count()) {
            throw DataFormatError("weight cache cell index out of range: " + path);
        }
    }
    w.weight.resize(n_entries);
    for (auto& x : w.weight) x = r.f64();
    r.expect_eof();
    if (digest != weight_digest(w.centers, w.work, w.range_km, w.flat)) {
        throw CacheMismatchError("weight cache digest mismatch: " + path);
    }
    return w;
}

// --- sliced-quantile cache -------------------------------------------------

std::uint64_t quantile_digest(const LatLonGrid& centers, const LatLonGrid& work,
                              double range_km, bool flat, double r, const QuantileGrid& grid) {
    std::string buf;
    digest_grid(buf, centers);
    digest_grid(buf, work);
    digest_f64(buf, flat ? -1.0 : range_km);
    digest_f64(buf, r);
    digest_u64(buf, grid.size());
    for (const double q : grid.levels) digest_f64(buf, q);
    return fnv1a(buf);
}

void write_quantile_cache(const SlicedQuantiles& q, const std::string& path) {
    Writer out(path);
    out.magic(kQuantMagic);
    out.u32(kFormatVersion);
    out.u64(quantile_digest(q.centers, q.work, q.range_km, q.flat, q.r, q.quantiles));
    out.u8(q.flat ? 1 : 0);
    out.f64(q.flat ? -1.0 : q.range_km);
    out.f64(q.r);
    out.grid(q.centers);
    out.grid(q.work);
    out.u64(q.quantiles.size());
    out.f64_array(q.quantiles.levels);
    out.label(q.dataset);
    out.u64(q.missing_slices);
    out.u64(q.total_slices);
    for (const auto s : q.sample_size) out.u64(s);
    out.f64_array(q.values);
}

SlicedQuantiles read_quantile_cache(const std::string& path) {
    Reader r(path);
    r.expect_magic(kQuantMagic, "sliced-quantile cache");
    r.expect_version();
    const std::uint64_t digest = r.u64();
    SlicedQuantiles q;
    q.flat = r.u8() != 0;
    const double range = r.f64();
    q.range_km = q.flat ? kFlatRange : range;
    q.r = r.f64();
    q.centers = r.grid();
    q.work = r.grid();
    const std::size_t nq = r.count(1 << 20);
    q.quantiles.levels = r.f64_array(nq);
    q.dataset = r.label();
    q.missing_slices = r.u64();
    q.total_slices = r.u64();
    q.sample_size.resize(q.centers.cell_count());
    for (auto& s : q.sample_size) s = r.u64();
    q.values = r.f64_array(q.centers.cell_count() * nq);
    r.expect_eof();
    if (digest != quantile_digest(q.centers, q.work, q.range_km, q.flat, q.r, q.quantiles)) {
        throw CacheMismatchError("sliced-quantile cache digest mismatch: " + path);
    }
    return q;
}

// --- local WD maps ---------------------------------------------------------

void write_map(const LocalWDMap& map, const std::string& path) {
    Writer out(path);
    out.magic(kMapMagic);
    out.u32(kFormatVersion);
    out.f64(map.r);
    out.grid(map.centers);
    out.f64_array(map.values);
}

LocalWDMap read_map(const std::string& path) {
    Reader r(path);
    r.expect_magic(kMapMagic, "local WD map");
    r.expect_version();
    LocalWDMap map;
    map.r = r.f64();
    map.centers = r.grid();
    map.values = r.f64_array(map.centers.cell_count());
    r.expect_eof();
    return map;
}

void write_map_image(const LocalWDMap& map, const std::string& path, double low, double high) {
    if (!(low < high)) {
        throw InvalidArgumentError("write_map_image: bounds must satisfy low < high");
    }
    constexpr int ramp_low[3] = {59, 76, 192};
    constexpr int ramp_high[3] = {180, 4, 38};
    const std::size_t w = map.centers.n_lon();
    const std::size_t h = map.centers.n_lat();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataFormatError("cannot open for writing: " + path);
    out << "P6\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> row(3 * w);
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t lat_row = h - 1 - i;  // north at the top
        for (std::size_t j = 0; j < w; ++j) {
            const double v = map.values[lat_row * w + j];
            unsigned char* px = row.data() + 3 * j;
            if (is_missing(v)) {
                px[0] = px[1] = px[2] = 128;
            } else {
                const double t = std::clamp((v - low) / (high - low), 0.0, 1.0);
                for (int k = 0; k < 3; ++k) {
                    px[k] = static_cast<unsigned char>(
                        std::lround(ramp_low[k] + t * (ramp_high[k] - ramp_low[k])));
                }
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw DataFormatError("write failure: " + path);
}

}  // namespace scwd::io
