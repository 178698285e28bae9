#include "cdem/synth.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cdem/errors.hpp"

namespace cdem {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
    }
    return v;
}

Eigen::MatrixXd sample_blobs(const Eigen::MatrixXd& means, int n, std::mt19937_64& rng, std::vector<int>& labels) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto num_classes = static_cast<int>(means.rows());
    Eigen::MatrixXd x(n, means.cols());
    labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int c = i % num_classes;
        labels[static_cast<std::size_t>(i)] = c;
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = means(c, j) + normal(rng);
    }
    return x;
}

}  // namespace

void ShiftSpec::validate() const {
    if (num_classes < 2) throw ConfigError("synthetic spec needs at least two classes");
    if (num_classes > dim) throw ConfigError("synthetic spec needs num_classes <= dim");
    if (dim < 2) throw ConfigError("synthetic spec needs dim >= 2");
    if (!(separation > 0.0)) throw ConfigError("class separation must be positive");
    if (n_per_domain < num_classes) throw ConfigError("synthetic spec needs n >= num_classes");
    if (static_cast<int>(translation.size()) > dim) throw ConfigError("translation longer than dim");
    if (!(noise_scale >= 0.0)) throw ConfigError("noise_scale must be nonnegative");
}

ShiftSpec standard_shift_spec(std::uint64_t seed) {
    ShiftSpec spec;
    spec.num_classes = 2;
    spec.n_per_domain = 200;
    spec.dim = 10;
    spec.separation = 6.0;
    spec.rotation_deg = 15.0;
    spec.translation = {1.8, -1.8, 3.0};
    spec.seed = seed;
    return spec;
}

ShiftSpec parse_shift_spec(std::string_view text) {
    ShiftSpec spec;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("spec line without '=': " + std::string(line));
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "num_classes") spec.num_classes = parse_number<int>(key, value);
        else if (key == "n_per_domain") spec.n_per_domain = parse_number<int>(key, value);
        else if (key == "dim") spec.dim = parse_number<int>(key, value);
        else if (key == "separation") spec.separation = parse_number<double>(key, value);
        else if (key == "rotation_deg") spec.rotation_deg = parse_number<double>(key, value);
        else if (key == "noise_scale") spec.noise_scale = parse_number<double>(key, value);
        else if (key == "seed") spec.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "translation") {
            spec.translation.clear();
            auto rest = value;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                spec.translation.push_back(parse_number<double>(key, trim(rest.substr(0, comma))));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        } else {
            throw ConfigError("unknown synthetic spec key '" + std::string(key) + "'");
        }
    }
    spec.validate();
    return spec;
}

ShiftSpec load_shift_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spec " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_shift_spec(buf.str());
}

SyntheticTask generate(const ShiftSpec& spec) {
    spec.validate();
    const int c = spec.num_classes;
    const int d = spec.dim;

    // Means on scaled axis vectors: pairwise distance equals the separation.
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(c, d);
    for (int k = 0; k < c; ++k) means(k, k) = spec.separation / std::numbers::sqrt2;
    means.rowwise() -= means.colwise().mean();

    std::mt19937_64 source_rng(spec.seed);
    std::mt19937_64 target_rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    std::vector<int> source_labels;
    std::vector<int> target_labels;
    Eigen::MatrixXd source = sample_blobs(means, spec.n_per_domain, source_rng, source_labels);
    Eigen::MatrixXd target = sample_blobs(means, spec.n_per_domain, target_rng, target_labels);

    const double angle = spec.rotation_deg * std::numbers::pi / 180.0;
    Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(d, d);
    rotation(0, 0) = std::cos(angle);
    rotation(0, 1) = -std::sin(angle);
    rotation(1, 0) = std::sin(angle);
    rotation(1, 1) = std::cos(angle);
    target = target * rotation.transpose();

    Eigen::RowVectorXd shift = Eigen::RowVectorXd::Zero(d);
    for (std::size_t j = 0; j < spec.translation.size(); ++j) shift(static_cast<Eigen::Index>(j)) = spec.translation[j];
    target.rowwise() += shift;

    if (spec.noise_scale > 0.0) {
        std::normal_distribution<double> normal(0.0, spec.noise_scale);
        for (Eigen::Index i = 0; i < target.rows(); ++i)
            for (Eigen::Index j = 0; j < d; ++j) target(i, j) += normal(target_rng);
    }

    return SyntheticTask{
        make_domain_pair(FeatureMatrix(std::move(source)), LabelVector(std::move(source_labels), c),
                         FeatureMatrix(std::move(target))),
        LabelVector(std::move(target_labels), c)};
}

ExperimentConfig synthetic_config(const ShiftSpec& spec) {
    ExperimentConfig c;
    c.task_name = "synthetic";
    c.pca_dim = spec.dim;
    c.subspace_dim = std::min(4, spec.dim);
    c.iterations = 11;
    c.seed = spec.seed;
    c.normalize = false;
    return c;
}

void write_synthetic(const SyntheticTask& task, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix(task.pair.source, dir / "source.cdm");
    write_labels(task.pair.source_labels.values(), dir / "source_labels.txt");
    write_matrix(task.pair.target, dir / "target.cdm");
    write_labels(task.target_labels.values(), dir / "target_labels.txt");
    std::ofstream cfg(dir / "config.txt");
    if (!cfg) throw IoError("cannot write " + (dir / "config.txt").string());
    cfg << "task_name=synthetic\n"
        << "source_features=source.cdm\n"
        << "source_labels=source_labels.txt\n"
        << "target_features=target.cdm\n"
        << "target_labels=target_labels.txt\n"
        << "num_classes=" << task.pair.num_classes() << "\n"
        << "pca_dim=" << task.pair.source.cols() << "\n"
        << "subspace_dim=" << std::min<Eigen::Index>(4, task.pair.source.cols()) << "\n"
        << "normalize=false\n";
}

}  // namespace cdem
