#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kahler/io.hpp"
#include "kahler/zoo.hpp"

using namespace kahler;

namespace {

std::string bytes_of(const FieldSnapshot& s) {
    std::ostringstream os(std::ios::binary);
    write_field(os, s);
    return os.str();
}

}  // namespace

TEST(FieldIo, ScalarRoundTrip) {
    const TorusGrid grid{2, 8};
    const ScalarField f = sample_on_grid(grid, [](std::span<const double> x) { return std::sin(6.0 * x[0]) + x[3]; });
    const std::string bytes = bytes_of(FieldSnapshot::scalar(grid, f));
    EXPECT_EQ(bytes.size(), 28u + 8u * grid.size());
    std::istringstream is(bytes, std::ios::binary);
    const FieldSnapshot back = read_field(is);
    EXPECT_EQ(back.kind, FieldKind::Scalar);
    EXPECT_EQ(back.n, 2);
    EXPECT_EQ(back.N, 8);
    EXPECT_EQ(back.as_scalar(), f);
}

TEST(FieldIo, MatrixRoundTrip) {
    const auto ex = make_example("perturbed-torus", {.n = 2, .N = 8});
    const FieldSnapshot s = FieldSnapshot::matrix(ex.geometry.grid, ex.field.metric());
    std::istringstream is(bytes_of(s), std::ios::binary);
    const MatrixField back = read_field(is).as_matrix();
    EXPECT_EQ(back.data, ex.field.metric().data);
    EXPECT_THROW(s.as_scalar(), InvalidArgument);
}

TEST(FieldIo, HeaderIsLittleEndian) {
    const TorusGrid grid{1, 8};
    ScalarField f(grid.size(), 0.0);
    f[0] = 1.0;  // 0x3FF0000000000000
    const std::string b = bytes_of(FieldSnapshot::scalar(grid, f));
    EXPECT_EQ(b.substr(0, 4), "KHLF");
    EXPECT_EQ(static_cast<unsigned char>(b[4]), 1u);   // version
    EXPECT_EQ(static_cast<unsigned char>(b[8]), 0u);   // scalar kind
    EXPECT_EQ(static_cast<unsigned char>(b[12]), 1u);  // n
    EXPECT_EQ(static_cast<unsigned char>(b[16]), 8u);  // N
    EXPECT_EQ(static_cast<unsigned char>(b[20]), 64u); // value count
    EXPECT_EQ(static_cast<unsigned char>(b[28 + 6]), 0xF0u);
    EXPECT_EQ(static_cast<unsigned char>(b[28 + 7]), 0x3Fu);
}

TEST(FieldIo, RejectsCorruptFiles) {
    const TorusGrid grid{1, 8};
    const std::string good = bytes_of(FieldSnapshot::scalar(grid, ScalarField(grid.size(), 0.5)));
    auto read = [](std::string b) {
        std::istringstream is(b, std::ios::binary);
        return read_field(is);
    };
    std::string bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_THROW(read(bad_magic), IoError);
    EXPECT_THROW(read(good.substr(0, good.size() - 3)), IoError);
    std::string bad_count = good;
    bad_count[20] = 63;
    EXPECT_THROW(read(bad_count), IoError);
    std::string bad_kind = good;
    bad_kind[8] = 7;
    EXPECT_THROW(read(bad_kind), IoError);
    EXPECT_THROW(FieldSnapshot::scalar(grid, ScalarField(5, 0.0)), DimensionMismatch);
}

TEST(FieldIo, CsvLayout) {
    const TorusGrid grid{1, 8};
    const ScalarField f = sample_on_grid(grid, [](std::span<const double> x) { return x[0] + 10.0 * x[1]; });
    std::ostringstream os;
    write_field_csv(os, FieldSnapshot::scalar(grid, f));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x1,y1,value");
    std::getline(is, line);
    EXPECT_EQ(line, "0,0,0");
    std::getline(is, line);
    EXPECT_EQ(line, "0,0.125,1.25");
    int rows = 2;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 64);

    const auto ex = make_example("flat-torus", {.n = 2, .N = 8});
    std::ostringstream om;
    write_field_csv(om, FieldSnapshot::matrix(ex.geometry.grid, ex.field.metric()));
    EXPECT_EQ(om.str().substr(0, om.str().find('\n')), "x1,y1,x2,y2,i,j,re,im");
}

TEST(CsvTable, QuotingAndWidth) {
    CsvTable t({"name", "value"});
    t.row({CsvTable::cell("plain"), CsvTable::cell(0.1)});
    t.row({CsvTable::cell("a,b \"c\""), CsvTable::cell(3)});
    std::ostringstream os;
    t.write(os);
    EXPECT_EQ(os.str(), "name,value\nplain,0.1\n\"a,b \"\"c\"\"\",3\n");
    EXPECT_THROW(t.row({"one"}), DimensionMismatch);
    EXPECT_EQ(CsvTable::cell("x"), "x");
}
