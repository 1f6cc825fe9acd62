#pragma once

// JSON experiment configuration.
//
//   {
//     "model": {"P": 5, "R1": 2, "R2": 2, "beta": 0.5, "omega": 1.5,
//               "lambda": 0.05, "mu": 0.1, "alpha": 0.8, "gamma": 0.25},
//     "grid": {"m": 80, "n": 400, "T": 100},
//     "x0": 0.5,
//     "noise_levels": [0.05, 0.01],
//     "replicates": 10,
//     "seed": 1,
//     "inversion": {"z0": [0, 0], "j0": 5, "sigma": 0.9, "max_iter": 100,
//                   "step_tol": 1e-8, "jacobian_step": 1e-3, "clamp_margin": 0.01},
//     "reference": {"points": [[0.5, 100]], "nodes": 24, "tolerance": 1e-6},
//     "output_dir": "out"
//   }
//
// Every physical constant in "model" is required. "alpha"/"gamma" are optional
// and, when present, are the exact orders used to synthesize data and to score
// inversions. Everything else has a default.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mimfrac/inversion.hpp"
#include "mimfrac/laplace.hpp"
#include "mimfrac/model.hpp"

namespace mimfrac {

struct ReferenceSettings {
    std::vector<std::pair<double, double>> points;  ///< (x, t)
    ContourQuadrature quadrature;
};

struct ExperimentSpec {
    ModelParams model;
    std::optional<Orders> exact;
    GridSpec grid{80, 400, 100.0};
    double x0 = 0.5;
    std::vector<double> noise_levels;
    int replicates = 10;
    std::uint64_t seed = 1;
    InversionConfig inversion;
    ReferenceSettings reference;
    std::filesystem::path output_dir = ".";

    /// Model with the exact orders; throws ValidationError if they are absent.
    [[nodiscard]] ModelParams model_with_orders() const;
};

/// Throws ValidationError with the line/column of JSON syntax errors or the
/// path of the offending field (e.g. "model.P: required field missing").
ExperimentSpec parse_config(const std::string& json_text);

/// Throws IoError if the file cannot be read, otherwise as parse_config.
ExperimentSpec load_config(const std::filesystem::path& path);

/// Built-in example settings ("ex51", "ex52", "ex53"): physical constants,
/// exact orders, z0, noise levels {5%, 1%, 0.1%, 0.01%, 0} and 10 replicates.
/// Throws ValidationError listing valid ids for anything else.
ExperimentSpec preset(std::string_view id);

inline constexpr std::string_view kPresetIds[] = {"ex51", "ex52", "ex53"};

}  // namespace mimfrac
