#include <doctest.h>

#include <fstream>
#include <random>

#include "cdem/config.hpp"
#include "cdem/errors.hpp"
#include "cdem/matio.hpp"
#include "oracles.hpp"
#include "scratch_dir.hpp"

using namespace cdem;
using cdem::testing::ScratchDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

std::vector<char> header(std::uint32_t rows, std::uint32_t cols) {
    std::vector<char> b{'C', 'D', 'M', '1'};
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((rows >> (8 * i)) & 0xFF));
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((cols >> (8 * i)) & 0xFF));
    return b;
}

}  // namespace

TEST_CASE("csv 2x2 parses row-major") {
    ScratchDir dir("matio");
    write_text(dir / "m.csv", "1.0,2.0\n3.0,4.0");
    const auto m = read_matrix(dir / "m.csv");
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    CHECK(m.values()(0, 0) == 1.0);
    CHECK(m.values()(0, 1) == 2.0);
    CHECK(m.values()(1, 0) == 3.0);
    CHECK(m.values()(1, 1) == 4.0);
}

TEST_CASE("binary header with zero rows is a format error") {
    const auto bytes = header(0, 3);
    CHECK_THROWS_AS(decode_matrix(bytes), FormatError);
}

TEST_CASE("binary payload shorter than declared is a format error") {
    auto bytes = header(2, 2);
    bytes.resize(bytes.size() + 8 * 3, 0);
    CHECK_THROWS_AS(decode_matrix(bytes), FormatError);
}

TEST_CASE("non-finite entries are data errors") {
    ScratchDir dir("matio");
    write_text(dir / "nan.csv", "1,nan\n");
    CHECK_THROWS_AS(read_matrix(dir / "nan.csv"), DataError);
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(decode_matrix(encode_matrix(m)), DataError);
}

TEST_CASE("ragged csv is a format error") {
    ScratchDir dir("matio");
    write_text(dir / "r.csv", "1,2\n3\n");
    CHECK_THROWS_AS(read_matrix(dir / "r.csv"), FormatError);
    write_text(dir / "bad.csv", "1,x\n");
    CHECK_THROWS_AS(read_matrix(dir / "bad.csv"), FormatError);
}

TEST_CASE("missing file is an io error") {
    CHECK_THROWS_AS(read_matrix("/nonexistent/cdem/file.cdm"), IoError);
}

TEST_CASE("1x1 zero matrix round-trips") {
    ScratchDir dir("matio");
    write_matrix(Eigen::MatrixXd::Zero(1, 1), dir / "z.cdm");
    const auto m = read_matrix(dir / "z.cdm");
    CHECK(m.rows() == 1);
    CHECK(m.cols() == 1);
    CHECK(m.values()(0, 0) == 0.0);
}

TEST_CASE("3x4 header declares rows=3 cols=4") {
    const auto bytes = encode_matrix(Eigen::MatrixXd::Ones(3, 4));
    REQUIRE(bytes.size() == 12 + 8 * 12);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CDM1");
    CHECK(bytes[4] == 3);
    CHECK(bytes[5] == 0);
    CHECK(bytes[8] == 4);
    CHECK(bytes[9] == 0);
}

TEST_CASE("random matrices round-trip bit-exactly in both formats") {
    std::mt19937_64 rng(17);
    ScratchDir dir("matio");
    for (auto [r, c] : {std::pair{50, 10}, std::pair{100, 64}}) {
        const Eigen::MatrixXd m = 1e3 * oracle::random_matrix(rng, r, c);
        for (const char* name : {"m.cdm", "m.csv"}) {
            write_matrix(m, dir / name);
            const auto back = read_matrix(dir / name);
            REQUIRE(back.rows() == r);
            REQUIRE(back.cols() == c);
            CHECK((back.values() - m).cwiseAbs().maxCoeff() == 0.0);
            CHECK(std::memcmp(back.values().data(), m.data(), sizeof(double) * m.size()) == 0);
        }
    }
}

TEST_CASE("property: round-trip is the identity on awkward values") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(1, 9);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd m = oracle::random_matrix(rng, dim(rng), dim(rng));
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::ldexp(m.data()[i], expo(rng) / 10);
        m(0, 0) = -0.0;
        const auto back = decode_matrix(encode_matrix(m));
        CHECK(std::memcmp(back.values().data(), m.data(), sizeof(double) * m.size()) == 0);
    }
}

TEST_CASE("feature matrix rejects empty shapes") {
    CHECK_THROWS_AS(FeatureMatrix(Eigen::MatrixXd(0, 3)), DataError);
    CHECK_THROWS_AS(FeatureMatrix(Eigen::MatrixXd(3, 0)), DataError);
}

TEST_CASE("label vector invariants") {
    CHECK_THROWS_AS(LabelVector({0, 1}, 1), DataError);
    CHECK_THROWS_AS(LabelVector({0, 2}, 2), DataError);
    CHECK_THROWS_AS(LabelVector({0, -1}, 2), DataError);
    const LabelVector y({0, 1, 1, 2}, 3);
    CHECK(y.class_counts() == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("domain pair from files") {
    ScratchDir dir("matio");
    write_matrix(Eigen::MatrixXd::Random(4, 5), dir / "s.cdm");
    write_matrix(Eigen::MatrixXd::Random(3, 5), dir / "t.cdm");
    write_labels({0, 1, 0, 1}, dir / "s.txt");
    ExperimentConfig c;
    c.source_features = (dir / "s.cdm").string();
    c.source_labels = (dir / "s.txt").string();
    c.target_features = (dir / "t.cdm").string();
    const auto pair = load_domain_pair(c);
    CHECK(pair.source_size() == 4);
    CHECK(pair.target_size() == 3);
    CHECK(pair.num_classes() == 2);
    CHECK(pair.source_class_counts == std::vector<std::size_t>{2, 2});
    CHECK_FALSE(load_target_labels(c, 2).has_value());
}

TEST_CASE("domain pair rejects a missing source class and a dimension mismatch") {
    CHECK_THROWS_AS(make_domain_pair(FeatureMatrix(Eigen::MatrixXd::Ones(3, 2)), LabelVector({0, 0, 0}, 2),
                                     FeatureMatrix(Eigen::MatrixXd::Ones(2, 2))),
                    DataError);
    CHECK_THROWS_AS(make_domain_pair(FeatureMatrix(Eigen::MatrixXd::Ones(2, 2)), LabelVector({0, 1}, 2),
                                     FeatureMatrix(Eigen::MatrixXd::Ones(2, 3))),
                    DataError);
    CHECK_THROWS_AS(make_domain_pair(FeatureMatrix(Eigen::MatrixXd::Ones(3, 2)), LabelVector({0, 1}, 2),
                                     FeatureMatrix(Eigen::MatrixXd::Ones(2, 2))),
                    DataError);
}

TEST_CASE("label files") {
    ScratchDir dir("matio");
    write_text(dir / "y.txt", "0\n2\n1\n");
    const auto y = read_labels(dir / "y.txt");
    CHECK(y.num_classes() == 3);
    CHECK(y.values() == std::vector<int>{0, 2, 1});
    write_text(dir / "bad.txt", "0\none\n");
    CHECK_THROWS_AS(read_labels(dir / "bad.txt"), FormatError);
    write_text(dir / "range.txt", "0\n5\n");
    CHECK_THROWS_AS(read_labels(dir / "range.txt", 3), DataError);
}
