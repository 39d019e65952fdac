#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sfg/geometry.hpp"

namespace sfg {

struct RobustnessDraw {
    std::string config_id;
    std::size_t draw_index = 0;
    double annotation_error = 0.0;   // sum over EPs of per-point displacement (px)
    double focal_perturbation = 0.0; // displacement of the geometric median (px)
};

struct RobustnessReport {
    std::vector<RobustnessDraw> draws;
    double mean_annotation_error = 0.0;
    double mean_focal_perturbation = 0.0;
    double attenuation_ratio = 0.0; // 0 when mean_annotation_error is 0
};

struct RobustnessConfig {
    std::string id;
    PointSet extreme_points;

    friend bool operator==(const RobustnessConfig&, const RobustnessConfig&) = default;
};

inline constexpr double kRobustnessFocalTol = 1e-3;

/// Perturbs every EP by U[-magnitude, magnitude] per coordinate and measures how far
/// the focal point moves. Draw i uses Rng::substream(seed, i), so draws run in
/// parallel with schedule-independent results.
RobustnessReport run_robustness(const RobustnessConfig& config, std::size_t n_draws, double magnitude,
                                std::uint64_t seed);

/// Runs every configuration; configuration k draws from seed splitmix64(seed + k).
std::vector<RobustnessReport> run_robustness_suite(const std::vector<RobustnessConfig>& configs, std::size_t n_draws,
                                                   double magnitude, std::uint64_t seed);

/// Recomputes the means and ratio over an arbitrary collection of draws.
RobustnessReport summarize(std::vector<RobustnessDraw> draws);

/// Concatenates several reports and re-aggregates.
RobustnessReport pool(const std::vector<RobustnessReport>& reports);

/// 20 seeded random 4-EP configurations on a 512x512 grid (extreme points of rotated
/// ellipses, aspect <= 1.75, EP spacing >= 50 px) followed by the canonical square
/// ("square", corners 100 px apart).
std::vector<RobustnessConfig> default_robustness_configs(std::uint64_t seed = 20210105);

inline constexpr GridDims kRobustnessGrid{512, 512};

/// Smallest pairwise distance between the configuration's points.
double min_spacing(const PointSet& points);

struct DensityRow {
    std::string config_id;
    std::size_t draw = 0;
    double annotation_error_px = 0.0;
    double focal_perturbation_px = 0.0;
};

/// One row per draw, in draw order.
std::vector<DensityRow> export_density(const RobustnessReport& report);

namespace serial {

RobustnessReport run_robustness(const RobustnessConfig& config, std::size_t n_draws, double magnitude,
                                std::uint64_t seed);

} // namespace serial

} // namespace sfg
