#pragma once

// Field snapshots (binary and CSV) and tidy CSV tables. Layout: docs/field_format.md.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "kahler/error.hpp"
#include "kahler/spectral.hpp"

namespace kahler {

class IoError : public KahlerError {
public:
    using KahlerError::KahlerError;
};

enum class FieldKind : std::uint32_t { Scalar = 0, Matrix = 1 };

inline constexpr char kFieldMagic[4] = {'K', 'H', 'L', 'F'};
inline constexpr std::uint32_t kFieldVersion = 1;

/// Samples on a torus grid. Matrix fields store n*n complex entries per node
/// (row-major, real then imaginary).
struct FieldSnapshot {
    FieldKind kind = FieldKind::Scalar;
    int n = 1;
    int N = 8;
    std::vector<double> values;

    TorusGrid grid() const { return {n, N}; }
    std::size_t values_per_node() const { return kind == FieldKind::Scalar ? 1 : static_cast<std::size_t>(2 * n * n); }

    static FieldSnapshot scalar(const TorusGrid& grid, const ScalarField& f) {
        if (f.size() != grid.size()) throw DimensionMismatch("snapshot: field size does not match grid");
        return {FieldKind::Scalar, grid.n, grid.N, f};
    }
    static FieldSnapshot matrix(const TorusGrid& grid, const MatrixField& m) {
        if (m.points != grid.size() || m.n != grid.n) throw DimensionMismatch("snapshot: matrix field does not match grid");
        FieldSnapshot s{FieldKind::Matrix, grid.n, grid.N, {}};
        s.values.reserve(m.data.size() * 2);
        for (const cd& c : m.data) {
            s.values.push_back(c.real());
            s.values.push_back(c.imag());
        }
        return s;
    }
    ScalarField as_scalar() const {
        if (kind != FieldKind::Scalar) throw InvalidArgument("snapshot holds a matrix field");
        return values;
    }
    MatrixField as_matrix() const {
        if (kind != FieldKind::Matrix) throw InvalidArgument("snapshot holds a scalar field");
        MatrixField m(n, grid().size());
        for (std::size_t q = 0; q < m.data.size(); ++q) m.data[q] = cd(values[2 * q], values[2 * q + 1]);
        return m;
    }
};

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = std::bit_cast<U>(value);
    char bytes[sizeof(U)];
    for (std::size_t b = 0; b < sizeof(U); ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    os.write(bytes, sizeof(U));
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    unsigned char bytes[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw IoError("field file truncated");
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(bytes[b]) << (8 * b);
    return std::bit_cast<T>(bits);
}

}  // namespace detail

inline void write_field(std::ostream& os, const FieldSnapshot& s) {
    const std::size_t expected = s.grid().size() * s.values_per_node();
    if (s.values.size() != expected) throw DimensionMismatch("write_field: value count does not match header");
    os.write(kFieldMagic, 4);
    detail::put_le(os, kFieldVersion);
    detail::put_le(os, static_cast<std::uint32_t>(s.kind));
    detail::put_le(os, static_cast<std::int32_t>(s.n));
    detail::put_le(os, static_cast<std::int32_t>(s.N));
    detail::put_le(os, static_cast<std::uint64_t>(s.values.size()));
    for (double v : s.values) detail::put_le(os, v);
    if (!os) throw IoError("write_field: stream error");
}

inline FieldSnapshot read_field(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kFieldMagic, 4) != 0) throw IoError("not a KHLF field file");
    if (detail::get_le<std::uint32_t>(is) != kFieldVersion) throw IoError("unsupported KHLF version");
    FieldSnapshot s;
    const auto kind = detail::get_le<std::uint32_t>(is);
    if (kind > 1) throw IoError("unknown field kind " + std::to_string(kind));
    s.kind = static_cast<FieldKind>(kind);
    s.n = detail::get_le<std::int32_t>(is);
    s.N = detail::get_le<std::int32_t>(is);
    if (s.n < 1 || s.n > 3 || s.N < 2 || s.N > 4096) throw IoError("field header out of range");
    const auto count = detail::get_le<std::uint64_t>(is);
    if (count != s.grid().size() * s.values_per_node()) throw IoError("field header count does not match n and N");
    s.values.resize(count);
    for (auto& v : s.values) v = detail::get_le<double>(is);
    return s;
}

inline void save_field(const std::filesystem::path& path, const FieldSnapshot& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_field(os, s);
}

inline FieldSnapshot load_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_field(is);
}

/// Shortest round-trip decimal form.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// One row per node: x1,y1,...,value for scalars; x1,y1,...,i,j,re,im for matrices.
inline void write_field_csv(std::ostream& os, const FieldSnapshot& s) {
    const TorusGrid grid = s.grid();
    for (int i = 0; i < s.n; ++i) os << (i ? "," : "") << 'x' << i + 1 << ",y" << i + 1;
    os << (s.kind == FieldKind::Scalar ? ",value\n" : ",i,j,re,im\n");
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = grid.coordinates(p);
        std::string coords;
        for (std::size_t d = 0; d < x.size(); ++d) coords += (d ? "," : "") + format_double(x[d]);
        if (s.kind == FieldKind::Scalar) {
            os << coords << ',' << format_double(s.values[p]) << '\n';
            continue;
        }
        for (int i = 0; i < s.n; ++i)
            for (int j = 0; j < s.n; ++j) {
                const std::size_t q = 2 * ((p * s.n + i) * s.n + j);
                os << coords << ',' << i << ',' << j << ',' << format_double(s.values[q]) << ','
                   << format_double(s.values[q + 1]) << '\n';
            }
    }
}

/// Tidy table: fixed header, one observation per row.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw DimensionMismatch("CsvTable: row width");
        rows_.push_back(std::move(cells));
        return *this;
    }
    std::size_t size() const { return rows_.size(); }

    static std::string cell(double x) { return format_double(x); }
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(const char* s) { return cell(std::string(s)); }
    static std::string cell(bool x) { return x ? "true" : "false"; }
    static std::string cell(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }

    void write(std::ostream& os) const {
        auto line = [&os](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
            os << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
    }
    void save(const std::filesystem::path& path) const {
        std::ofstream os(path);
        if (!os) throw IoError("cannot open " + path.string() + " for writing");
        write(os);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace kahler
