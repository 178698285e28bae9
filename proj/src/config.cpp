#include "cdem/config.hpp"

#include <charconv>
#include <fstream>
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

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    bad_value(key, value);
}

std::string to_path(std::string_view value, const std::filesystem::path& base_dir) {
    std::filesystem::path p{std::string(value)};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.string();
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        value = value.substr(comma + 1);
    }
    return out;
}

}  // namespace

void Hyperparams::validate() const {
    for (const double v : {beta, lambda, gamma, eta, delta}) {
        if (!(v >= 0.0)) throw ConfigError("hyperparameters must be nonnegative");
    }
}

ComponentFlags ComponentFlags::parse(std::string_view list) {
    ComponentFlags flags{false, false, false, false};
    for (const auto& item : split_list(list)) {
        if (item == "erm") flags.erm = true;
        else if (item == "da") flags.da = true;
        else if (item == "cde") flags.cde = true;
        else if (item == "dfl") flags.dfl = true;
        else if (item == "all") flags = ComponentFlags{};
        else throw ConfigError("unknown objective component '" + item + "'");
    }
    return flags;
}

std::string ComponentFlags::to_string() const {
    std::string out;
    auto add = [&out](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += '+';
        out += name;
    };
    add(erm, "erm");
    add(da, "da");
    add(cde, "cde");
    add(dfl, "dfl");
    return out.empty() ? "none" : out;
}

void ExperimentConfig::validate(int feature_dim) const {
    hp.validate();
    const int m = pca_dim > 0 ? pca_dim : feature_dim;
    if (m > feature_dim) {
        throw ConfigError("pca_dim " + std::to_string(m) + " exceeds feature dimension " +
                          std::to_string(feature_dim));
    }
    if (subspace_dim < 1 || subspace_dim > m) {
        throw ConfigError("subspace_dim must lie in [1, " + std::to_string(m) + "], got " +
                          std::to_string(subspace_dim));
    }
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    if (kmeans_max_iters < 1) throw ConfigError("kmeans_max_iters must be at least 1");
}

ExperimentConfig ExperimentConfig::for_task(const std::string& task) const {
    const auto dash = task.find('-');
    if (dash == std::string::npos) throw ConfigError("task '" + task + "' is not of the form SRC-TGT");
    const auto src = domains.find(task.substr(0, dash));
    const auto tgt = domains.find(task.substr(dash + 1));
    if (src == domains.end() || tgt == domains.end()) {
        throw ConfigError("task '" + task + "' names a domain missing from the registry");
    }
    ExperimentConfig out = *this;
    out.task_name = task;
    out.source_features = src->second.features;
    out.source_labels = src->second.labels;
    out.target_features = tgt->second.features;
    out.target_labels = tgt->second.labels;
    return out;
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir) {
    if (key == "task_name") c.task_name = value;
    else if (key == "source_features") c.source_features = to_path(value, base_dir);
    else if (key == "source_labels") c.source_labels = to_path(value, base_dir);
    else if (key == "target_features") c.target_features = to_path(value, base_dir);
    else if (key == "target_labels") c.target_labels = value.empty() ? "" : to_path(value, base_dir);
    else if (key == "num_classes") c.num_classes = to_int<int>(key, value);
    else if (key == "tasks") c.tasks = split_list(value);
    else if (key == "pca_dim") c.pca_dim = to_int<int>(key, value);
    else if (key == "subspace_dim") c.subspace_dim = to_int<int>(key, value);
    else if (key == "iterations") c.iterations = to_int<int>(key, value);
    else if (key == "seed") c.seed = to_int<std::uint64_t>(key, value);
    else if (key == "beta") c.hp.beta = to_double(key, value);
    else if (key == "lambda") c.hp.lambda = to_double(key, value);
    else if (key == "gamma") c.hp.gamma = to_double(key, value);
    else if (key == "eta") c.hp.eta = to_double(key, value);
    else if (key == "delta") c.hp.delta = to_double(key, value);
    else if (key == "components") c.components = ComponentFlags::parse(value);
    else if (key == "normalize") c.normalize = to_bool(key, value);
    else if (key == "pca_fit") {
        if (value == "joint") c.pca_joint = true;
        else if (value == "source") c.pca_joint = false;
        else bad_value(key, value);
    } else if (key == "legacy_beta_prefactor") c.legacy_beta_prefactor = to_bool(key, value);
    else if (key == "include_unselected_in_m0") c.include_unselected_in_m0 = to_bool(key, value);
    else if (key == "kmeans_warm_start") c.kmeans_warm_start = to_bool(key, value);
    else if (key == "kmeans_max_iters") c.kmeans_max_iters = to_int<int>(key, value);
    else if (key == "kmeans_tol") c.kmeans_tol = to_double(key, value);
    else if (key == "out_dir") c.out_dir = to_path(value, base_dir);
    else if (key == "dump_dir") c.dump_dir = to_path(value, base_dir);
    else if (key.starts_with("domain.")) {
        // domain.<name>.features / domain.<name>.labels
        const auto rest = key.substr(7);
        const auto dot = rest.rfind('.');
        if (dot == std::string_view::npos || dot == 0) throw ConfigError("bad registry key '" + std::string(key) + "'");
        auto& files = c.domains[std::string(rest.substr(0, dot))];
        const auto field = rest.substr(dot + 1);
        if (field == "features") files.features = to_path(value, base_dir);
        else if (field == "labels") files.labels = to_path(value, base_dir);
        else throw ConfigError("bad registry key '" + std::string(key) + "'");
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
    if (key == "beta" || key == "lambda" || key == "gamma" || key == "eta" || key == "delta") c.hp.validate();
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

}  // namespace cdem
