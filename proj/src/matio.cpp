#include "cdem/matio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cdem/config.hpp"
#include "cdem/errors.hpp"

namespace cdem {

namespace {

constexpr char kMagic[4] = {'C', 'D', 'M', '1'};
constexpr std::size_t kHeaderBytes = 12;

std::uint32_t load_u32_le(const char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

std::uint64_t load_u64_le(const char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

void store_u32_le(std::vector<char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void store_u64_le(std::vector<char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const char> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line) {
    token = trim(token);
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end || token.empty()) {
        throw FormatError("line " + std::to_string(line) + ": cannot parse number '" +
                          std::string(token) + "'");
    }
    if (!std::isfinite(value)) {
        throw DataError("line " + std::to_string(line) + ": non-finite entry '" +
                        std::string(token) + "'");
    }
    return value;
}

FeatureMatrix decode_csv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        while (true) {
            const auto comma = line.find(',');
            row.push_back(parse_double(line.substr(0, comma), line_no));
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(rows.front().size()) + " columns, found " +
                              std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("CSV matrix has no rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return FeatureMatrix(std::move(m));
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw DataError("feature matrix must have at least one row and one column");
    }
    if (!values_.allFinite()) throw DataError("feature matrix contains NaN or Inf");
}

LabelVector::LabelVector(std::vector<int> labels, int num_classes)
    : labels_(std::move(labels)), num_classes_(num_classes) {
    if (num_classes_ < 2) throw DataError("class count must be at least 2");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= num_classes_) {
            throw DataError("label " + std::to_string(labels_[i]) + " at index " + std::to_string(i) +
                            " outside [0, " + std::to_string(num_classes_) + ")");
        }
    }
}

std::vector<std::size_t> LabelVector::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

DomainPair make_domain_pair(FeatureMatrix source, LabelVector source_labels, FeatureMatrix target) {
    if (source.cols() != target.cols()) {
        throw DataError("source dimension " + std::to_string(source.cols()) +
                        " differs from target dimension " + std::to_string(target.cols()));
    }
    if (static_cast<Eigen::Index>(source_labels.size()) != source.rows()) {
        throw DataError("source has " + std::to_string(source.rows()) + " samples but " +
                        std::to_string(source_labels.size()) + " labels");
    }
    auto counts = source_labels.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw DataError("class " + std::to_string(c) + " has no source samples");
    }
    return DomainPair{std::move(source), std::move(source_labels), std::move(target), std::move(counts)};
}

FeatureMatrix decode_matrix(std::span<const char> bytes) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
        if (bytes.size() < kHeaderBytes) throw FormatError("truncated CDEM-MAT header");
        const std::uint64_t rows = load_u32_le(bytes.data() + 4);
        const std::uint64_t cols = load_u32_le(bytes.data() + 8);
        if (rows == 0 || cols == 0) throw FormatError("CDEM-MAT header declares an empty matrix");
        if (bytes.size() != kHeaderBytes + 8 * rows * cols) {
            throw FormatError("CDEM-MAT payload size does not match declared " + std::to_string(rows) +
                              "x" + std::to_string(cols));
        }
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        const char* p = bytes.data() + kHeaderBytes;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j, p += 8) {
                m(i, j) = std::bit_cast<double>(load_u64_le(p));
            }
        }
        return FeatureMatrix(std::move(m));
    }
    return decode_csv(std::string_view(bytes.data(), bytes.size()));
}

std::vector<char> encode_matrix(const Eigen::MatrixXd& matrix) {
    std::vector<char> out(std::begin(kMagic), std::end(kMagic));
    out.reserve(kHeaderBytes + 8 * static_cast<std::size_t>(matrix.size()));
    store_u32_le(out, static_cast<std::uint32_t>(matrix.rows()));
    store_u32_le(out, static_cast<std::uint32_t>(matrix.cols()));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            store_u64_le(out, std::bit_cast<std::uint64_t>(matrix(i, j)));
    return out;
}

FeatureMatrix read_matrix(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_matrix(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_matrix(const Eigen::MatrixXd& matrix, const std::filesystem::path& path) {
    if (path.extension() == ".csv") {
        std::string text;
        for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
            for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
                if (j) text += ',';
                text += format_double(matrix(i, j));
            }
            text += '\n';
        }
        write_file(path, text);
    } else {
        write_file(path, encode_matrix(matrix));
    }
}

void write_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path) {
    write_matrix(matrix.values(), path);
}

LabelVector read_labels(const std::filesystem::path& path, std::optional<int> num_classes) {
    const auto bytes = read_file(path);
    std::string_view text(bytes.data(), bytes.size());
    std::vector<int> labels;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        int value = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad label '" +
                              std::string(line) + "'");
        }
        labels.push_back(value);
    }
    if (labels.empty()) throw FormatError(path.string() + ": no labels");
    const int classes = num_classes.value_or(*std::max_element(labels.begin(), labels.end()) + 1);
    try {
        return LabelVector(std::move(labels), classes);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_labels(const std::vector<int>& labels, const std::filesystem::path& path) {
    std::string text;
    for (int y : labels) {
        text += std::to_string(y);
        text += '\n';
    }
    write_file(path, text);
}

DomainPair load_domain_pair(const ExperimentConfig& config) {
    if (config.source_features.empty() || config.source_labels.empty() || config.target_features.empty()) {
        throw ConfigError("config must name source_features, source_labels and target_features");
    }
    auto source = read_matrix(config.source_features);
    auto labels = read_labels(config.source_labels,
                              config.num_classes > 0 ? std::optional<int>(config.num_classes) : std::nullopt);
    auto target = read_matrix(config.target_features);
    return make_domain_pair(std::move(source), std::move(labels), std::move(target));
}

std::optional<LabelVector> load_target_labels(const ExperimentConfig& config, int num_classes) {
    if (config.target_labels.empty()) return std::nullopt;
    return read_labels(config.target_labels, num_classes);
}

}  // namespace cdem
