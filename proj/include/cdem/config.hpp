#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cdem {

/// Trade-off weights of the composed objective. All nonnegative.
struct Hyperparams {
    double beta = 0.1;
    double lambda = 0.1;
    double gamma = 0.1;
    double eta = 0.1;
    double delta = 0.1;

    void validate() const;
};

/// Which objective components enter the composed matrix.
///   erm: empirical error (label projection and complement push-away)
///   da:  marginal + conditional mean alignment
///   cde: cross-domain error push-away
///   dfl: same-class graph Laplacian
struct ComponentFlags {
    bool erm = true;
    bool da = true;
    bool cde = true;
    bool dfl = true;

    static ComponentFlags parse(std::string_view list);
    std::string to_string() const;
};

struct DomainFiles {
    std::string features;
    std::string labels;
};

struct ExperimentConfig {
    std::string task_name = "task";
    std::string source_features;
    std::string source_labels;
    std::string target_features;
    std::string target_labels;  // evaluation only
    int num_classes = 0;        // 0: infer from source labels

    std::map<std::string, DomainFiles> domains;
    std::vector<std::string> tasks;

    int pca_dim = 0;  // 0: keep the input dimension
    int subspace_dim = 32;
    int iterations = 11;
    std::uint64_t seed = 0;

    Hyperparams hp;
    ComponentFlags components;
    bool normalize = true;
    bool pca_joint = true;
    bool legacy_beta_prefactor = false;
    bool include_unselected_in_m0 = true;
    bool kmeans_warm_start = false;
    int kmeans_max_iters = 100;
    double kmeans_tol = 1e-6;

    std::string out_dir;
    std::string dump_dir;

    /// Checks k <= m <= d and T >= 1 once the feature dimension is known.
    void validate(int feature_dim) const;

    /// Copy of this config with the source/target paths of a registry task such as "C-A".
    ExperimentConfig for_task(const std::string& task) const;
};

/// Parses flat key=value text. '#' starts a comment; unknown keys are rejected.
/// Relative paths are resolved against base_dir.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one key=value assignment, as used by the parser and by CLI overrides.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir = {});

}  // namespace cdem
