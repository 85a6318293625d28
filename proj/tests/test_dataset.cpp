#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dlufs/dataset.hpp"
#include "dlufs/errors.hpp"

using namespace dlufs;

namespace {

class TempCsv {
  public:
    explicit TempCsv(const std::string& contents) {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("dlufs_test_" + std::to_string(counter++) + ".csv"))
                    .string();
        std::ofstream out(path_);
        out << contents;
    }
    ~TempCsv() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

}  // namespace

TEST_CASE("csv with labels round-trips exactly") {
    TempCsv file("f1,f2,label\n1.5,-2.25,1\n3.0,4.5,0\n");
    const DataMatrix data = load_dataset(file.path(), "csv");
    REQUIRE(data.feature_count() == 2);
    REQUIRE(data.sample_count() == 2);
    // Internal orientation is features x samples.
    CHECK(data.values(0, 0) == 1.5);
    CHECK(data.values(1, 0) == -2.25);
    CHECK(data.values(0, 1) == 3.0);
    CHECK(data.values(1, 1) == 4.5);
    REQUIRE(data.labels.has_value());
    CHECK(data.labels->class_count == 2);
    CHECK(data.labels->labels == std::vector<int>{1, 0});
}

TEST_CASE("headerless csv has no labels") {
    TempCsv file("1,2,3\n4,5,6\n");
    const DataMatrix data = load_dataset(file.path());
    CHECK(data.feature_count() == 3);
    CHECK(data.sample_count() == 2);
    CHECK_FALSE(data.labels.has_value());
}

TEST_CASE("header without a label column keeps every column as a feature") {
    TempCsv file("a,b,c\n1,2,3\n4,5,6\n");
    const DataMatrix data = load_dataset(file.path());
    CHECK(data.feature_count() == 3);
    CHECK_FALSE(data.labels.has_value());
}

TEST_CASE("non-contiguous label values map to 0..c-1 in ascending order") {
    TempCsv file("f,label\n1,7\n2,3\n3,7\n4,11\n");
    const DataMatrix data = load_dataset(file.path());
    REQUIRE(data.labels.has_value());
    CHECK(data.labels->class_count == 3);
    CHECK(data.labels->labels == std::vector<int>{1, 0, 1, 2});
}

TEST_CASE("ragged rows are rejected with a location") {
    TempCsv file("f1,f2,label\n1,2,0\n1,2\n");
    try {
        load_dataset(file.path());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
}

TEST_CASE("non-numeric cells are rejected with a location") {
    TempCsv file("1,2\n3,oops\n");
    try {
        load_dataset(file.path());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
        CHECK(e.col() == 2);
    }
}

TEST_CASE("unknown formats and missing files are rejected") {
    TempCsv file("1,2\n");
    CHECK_THROWS_AS(load_dataset(file.path(), "parquet"), ParseError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/nowhere.csv", "csv"), IoError);
    TempCsv empty("\n\n");
    CHECK_THROWS_AS(load_dataset(empty.path(), "csv"), ParseError);
}

TEST_CASE("expected dimension validation") {
    TempCsv file("f1,f2,label\n1,2,0\n3,4,1\n5,6,0\n");
    ExpectedDims ok;
    ok.samples = 3;
    ok.features = 2;
    ok.classes = 2;
    CHECK_NOTHROW(load_dataset(file.path(), "csv", ok));

    ExpectedDims bad_n;
    bad_n.samples = 62;
    CHECK_THROWS_AS(load_dataset(file.path(), "csv", bad_n), ParameterError);
    ExpectedDims bad_p;
    bad_p.features = 2000;
    CHECK_THROWS_AS(load_dataset(file.path(), "csv", bad_p), ParameterError);
    ExpectedDims bad_c;
    bad_c.classes = 10;
    CHECK_THROWS_AS(load_dataset(file.path(), "csv", bad_c), ParameterError);
}

TEST_CASE("zscore standardizes feature rows") {
    Matrix values(2, 4, {1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 5.0, 5.0});
    zscore_features(values);
    for (std::size_t f = 0; f < 2; ++f) {
        double mean = 0.0;
        for (std::size_t j = 0; j < 4; ++j) mean += values(f, j);
        CHECK(std::abs(mean) <= 1e-12);
    }
    double var = 0.0;
    for (std::size_t j = 0; j < 4; ++j) var += values(0, j) * values(0, j);
    CHECK(var / 4.0 == doctest::Approx(1.0).epsilon(1e-12));
    // Zero-variance row is centered only.
    for (std::size_t j = 0; j < 4; ++j) CHECK(values(1, j) == 0.0);
}

// Table-driven dimension checks for the reference datasets, run only when
// the files are present under data/.
TEST_CASE("reference dataset statistics") {
    struct Expected {
        const char* file;
        std::size_t n, p, c;
    };
    for (const Expected& e : {Expected{"data/colon.csv", 62, 2000, 2},
                              Expected{"data/warpAR10P.csv", 130, 2400, 10}}) {
        if (!std::filesystem::exists(e.file)) continue;
        ExpectedDims dims;
        dims.samples = e.n;
        dims.features = e.p;
        dims.classes = e.c;
        CHECK_NOTHROW(load_dataset(e.file, "csv", dims));
    }
}
