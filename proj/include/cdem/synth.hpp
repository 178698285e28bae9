#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "cdem/config.hpp"
#include "cdem/matio.hpp"

namespace cdem {

/// Gaussian-blob source domain and a rotated, translated, noisier copy as target.
struct ShiftSpec {
    int num_classes = 2;
    int n_per_domain = 200;
    int dim = 10;
    double separation = 6.0;         // distance between any two class means, in noise std units
    double rotation_deg = 0.0;       // rotation of the target in the (e0, e1) plane
    std::vector<double> translation;  // padded with zeros to dim
    double noise_scale = 0.0;        // extra isotropic target noise
    std::uint64_t seed = 0;

    void validate() const;
};

/// Two classes 6 apart in 10-D, target rotated 15 degrees and translated by (1.8, -1.8, 3):
/// 2.55 std along the class axis (which hurts a source-only classifier) and 3 std across it.
ShiftSpec standard_shift_spec(std::uint64_t seed = 0);

ShiftSpec parse_shift_spec(std::string_view text);
ShiftSpec load_shift_spec(const std::filesystem::path& path);

struct SyntheticTask {
    DomainPair pair;
    LabelVector target_labels;  // evaluation only
};

/// Class of sample i is i mod C, so each class holds n/C samples with the remainder going to
/// the low class ids.
SyntheticTask generate(const ShiftSpec& spec);

/// Experiment settings used with synthetic tasks: m = dim, k = min(4, dim), T = 11, default
/// hyperparameters, no row normalization (the blobs carry their class signal in the norm).
ExperimentConfig synthetic_config(const ShiftSpec& spec);

/// source.cdm, source_labels.txt, target.cdm, target_labels.txt and a matching config.txt.
void write_synthetic(const SyntheticTask& task, const std::filesystem::path& dir);

}  // namespace cdem
