#include "snnls/iohub.hpp"

#include "snnls/experiments.hpp"

#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

using namespace snnls;

namespace {

// Unique scratch paths; tests clean up after themselves.
std::string scratch(const std::string& name) { return "iohub_scratch_" + name; }

void put_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv reader parses rows and columns") {
    FileGuard g{scratch("id.csv")};
    put_file(g.path, "1,0\n0,1\n");
    const NonNegMatrix m = read_matrix(g.path);
    REQUIRE(m.mat().rows() == 2);
    REQUIRE(m.mat().cols() == 2);
    CHECK(m.mat()(0, 0) == 1.0);
    CHECK(m.mat()(0, 1) == 0.0);
    CHECK(m.mat()(1, 1) == 1.0);
}

TEST_CASE("csv reader reports negative entries by position") {
    FileGuard g{scratch("neg.csv")};
    put_file(g.path, "1,2\n3,-4\n");
    CHECK_THROWS_WITH_AS(read_matrix(g.path), doctest::Contains("(1,1)"), ValidationError);
}

TEST_CASE("csv reader rejects ragged rows with the line number") {
    FileGuard g{scratch("ragged.csv")};
    put_file(g.path, "1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_matrix(g.path), doctest::Contains(":2:"), ValidationError);
}

TEST_CASE("csv reader rejects empty cells and junk") {
    FileGuard g{scratch("junk.csv")};
    put_file(g.path, "1,,2\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
    put_file(g.path, "1,abc\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
}

TEST_CASE("matrix market array files are column-major") {
    FileGuard g{scratch("cm.mtx")};
    put_file(g.path,
             "%%MatrixMarket matrix array real general\n"
             "% comment line\n"
             "2 3\n"
             "1\n2\n3\n4\n5\n6\n");
    const NonNegMatrix m = read_matrix(g.path);
    REQUIRE(m.mat().rows() == 2);
    REQUIRE(m.mat().cols() == 3);
    CHECK(m.mat()(0, 0) == 1.0);
    CHECK(m.mat()(1, 0) == 2.0);
    CHECK(m.mat()(0, 1) == 3.0);
    CHECK(m.mat()(1, 2) == 6.0);
}

TEST_CASE("matrix market reader rejects unsupported layouts") {
    FileGuard g{scratch("coord.mtx")};
    put_file(g.path,
             "%%MatrixMarket matrix coordinate real general\n"
             "2 2 2\n1 1 1.0\n2 2 1.0\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
    put_file(g.path, "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n4\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
    put_file(g.path, "not a matrix market file\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
}

TEST_CASE("matrix market reader checks the value count") {
    FileGuard g{scratch("short.mtx")};
    put_file(g.path, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
    put_file(g.path, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n5\n");
    CHECK_THROWS_AS(read_matrix(g.path), ValidationError);
}

TEST_CASE("write then read is exact in both formats") {
    Rng rng(606);
    Matrix m(5, 7);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) m(i, j) = std::fabs(rng.normal()) * 1e-3;
    m(2, 3) = 1.0 / 3.0;  // not representable in short decimal
    for (MatrixFormat fmt : {MatrixFormat::MatrixMarket, MatrixFormat::Csv}) {
        FileGuard g{scratch(fmt == MatrixFormat::Csv ? "rt.csv" : "rt.mtx")};
        write_matrix(g.path, m, fmt);
        const NonNegMatrix back = read_matrix(g.path, fmt);
        REQUIRE(back.mat().rows() == 5);
        REQUIRE(back.mat().cols() == 7);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 7; ++j) CHECK(back.mat()(i, j) == m(i, j));
    }
}

TEST_CASE("format is deduced from the extension") {
    CHECK(format_from_path("a/b/x.mtx") == MatrixFormat::MatrixMarket);
    CHECK(format_from_path("X.MTX") == MatrixFormat::MatrixMarket);
    CHECK(format_from_path("data.csv") == MatrixFormat::Csv);
    CHECK_THROWS_AS(format_from_path("data.txt"), ValidationError);
    CHECK_THROWS_AS(format_from_path("noext"), ValidationError);
}

namespace {

std::string pgm_p2(int w, int h, int maxval, const std::vector<int>& px) {
    std::ostringstream ss;
    ss << "P2\n# made for tests\n" << w << " " << h << "\n" << maxval << "\n";
    for (int v : px) ss << v << "\n";
    return ss.str();
}

}  // namespace

TEST_CASE("ascii pgm splits into flattened patches") {
    std::vector<int> px(19 * 19);
    for (size_t i = 0; i < px.size(); ++i) px[i] = static_cast<int>(i % 256);
    FileGuard g{scratch("a.pgm")};
    put_file(g.path, pgm_p2(19, 19, 255, px));
    const NonNegMatrix m = read_pgm_patches(g.path, 19);
    REQUIRE(m.mat().rows() == 361);
    REQUIRE(m.mat().cols() == 1);
    CHECK(m.mat()(0, 0) == 0.0);
    CHECK(m.mat()(20, 0) == doctest::Approx(20.0 / 255.0));
}

TEST_CASE("binary pgm tiles are ordered row-major over the grid") {
    // 16x16 image, patch 8: four tiles. Pixel value identifies its tile.
    std::string body = "P5\n16 16\n255\n";
    std::string raw(256, '\0');
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) raw[y * 16 + x] = static_cast<char>((y / 8) * 2 + (x / 8));
    FileGuard g{scratch("b.pgm")};
    put_file(g.path, body + raw);
    const NonNegMatrix m = read_pgm_patches(g.path, 8);
    REQUIRE(m.mat().rows() == 64);
    REQUIRE(m.mat().cols() == 4);
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 64; ++i) CHECK(m.mat()(i, t) == doctest::Approx(t / 255.0));
}

TEST_CASE("sixteen-bit pgm samples are big endian") {
    std::string body = "P5\n2 2\n65535\n";
    std::string raw;
    const uint16_t vals[4] = {0, 256, 513, 65535};
    for (uint16_t v : vals) {
        raw.push_back(static_cast<char>(v >> 8));
        raw.push_back(static_cast<char>(v & 0xFF));
    }
    FileGuard g{scratch("c.pgm")};
    put_file(g.path, body + raw);
    const NonNegMatrix m = read_pgm_patches(g.path, 2);
    REQUIRE(m.mat().rows() == 4);
    CHECK(m.mat()(0, 0) == 0.0);
    CHECK(m.mat()(1, 0) == doctest::Approx(256.0 / 65535.0));
    CHECK(m.mat()(2, 0) == doctest::Approx(513.0 / 65535.0));
    CHECK(m.mat()(3, 0) == 1.0);
}

TEST_CASE("saturated pixels scale to one") {
    FileGuard g{scratch("d.pgm")};
    put_file(g.path, pgm_p2(4, 4, 255, std::vector<int>(16, 255)));
    const NonNegMatrix m = read_pgm_patches(g.path, 2);
    for (int i = 0; i < m.mat().rows(); ++i)
        for (int j = 0; j < m.mat().cols(); ++j) CHECK(m.mat()(i, j) == 1.0);
}

TEST_CASE("partial edge tiles are dropped") {
    std::vector<int> px(20 * 20, 7);
    FileGuard g{scratch("e.pgm")};
    put_file(g.path, pgm_p2(20, 20, 255, px));
    const NonNegMatrix m = read_pgm_patches(g.path, 8);
    CHECK(m.mat().cols() == 4);  // 2x2 full tiles; the 4-pixel margins are dropped
    CHECK(m.mat().rows() == 64);
}

TEST_CASE("pgm reader rejects bad inputs") {
    FileGuard g{scratch("f.pgm")};
    put_file(g.path, pgm_p2(4, 4, 255, std::vector<int>(16, 1)));
    CHECK_THROWS_AS(read_pgm_patches(g.path, 5), ValidationError);  // patch > image
    CHECK_THROWS_AS(read_pgm_patches(g.path, 0), ValidationError);
    put_file(g.path, "P3\n2 2\n255\n1 1 1 1\n");
    CHECK_THROWS_AS(read_pgm_patches(g.path, 1), ValidationError);  // not grayscale
    CHECK_THROWS_AS(read_pgm_patches("no_such_file.pgm", 2), ValidationError);
}

TEST_CASE("ini files parse sections, comments, and types") {
    FileGuard g{scratch("t.ini")};
    put_file(g.path,
             "top = 3\n"
             "[trial]\n"
             "d = 100   # dimension\n"
             "lambda = 0.5 ; semicolon comment\n"
             "name = plain\n"
             "\n"
             "[other]\n"
             "d = 7\n");
    const IniConfig cfg = read_ini(g.path);
    CHECK(cfg.get_int("", "top", -1) == 3);
    CHECK(cfg.get_int("trial", "d", -1) == 100);
    CHECK(cfg.get_double("trial", "lambda", 0.0) == 0.5);
    CHECK(cfg.get("trial", "name") == "plain");
    CHECK(cfg.get_int("other", "d", -1) == 7);
    CHECK(cfg.get_int("trial", "missing", 42) == 42);
    CHECK(cfg.has("trial", "d"));
    CHECK_FALSE(cfg.has("trial", "zzz"));
}

TEST_CASE("ini parse failures carry context") {
    FileGuard g{scratch("bad.ini")};
    put_file(g.path, "[trial]\nonly a key no equals\n");
    CHECK_THROWS_WITH_AS(read_ini(g.path), doctest::Contains(":2:"), ValidationError);
    put_file(g.path, "[trial]\nd = notanumber\n");
    const IniConfig cfg = read_ini(g.path);
    CHECK_THROWS_WITH_AS(cfg.get_int("trial", "d", 0), doctest::Contains("notanumber"),
                         ValidationError);
}

TEST_CASE("sanitizer nulls out non-finite numbers and records the paths") {
    nlohmann::json doc;
    doc["ok"] = 1.5;
    doc["bad"] = std::numeric_limits<double>::quiet_NaN();
    doc["nested"]["list"] = {1.0, std::numeric_limits<double>::infinity(), 3.0};
    std::vector<std::string> warnings;
    const nlohmann::json clean = sanitize_json(doc, warnings);
    CHECK(clean["ok"] == 1.5);
    CHECK(clean["bad"].is_null());
    CHECK(clean["nested"]["list"][1].is_null());
    CHECK(clean["nested"]["list"][2] == 3.0);
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].find("/bad") != std::string::npos);
    CHECK(warnings[1].find("/nested/list/1") != std::string::npos);
}

TEST_CASE("report writing is canonical and repeatable") {
    nlohmann::json rep;
    rep["b"] = 2;
    rep["a"] = {1, 2, 3};
    FileGuard g1{scratch("r1.json")};
    FileGuard g2{scratch("r2.json")};
    write_report(rep, g1.path);
    write_report(rep, g2.path);
    const std::string s1 = slurp(g1.path);
    CHECK(s1 == slurp(g2.path));
    CHECK(!s1.empty());
    CHECK(s1.back() == '\n');
    CHECK(nlohmann::json::parse(s1) == rep);
}

TEST_CASE("missing matrix files name the path") {
    CHECK_THROWS_WITH_AS(read_matrix("definitely_missing.csv"),
                         doctest::Contains("definitely_missing.csv"), ValidationError);
}
