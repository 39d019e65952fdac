#include "sfg/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "sfg/click_sim.hpp"
#include "sfg/errors.hpp"
#include "sfg/field.hpp"
#include "sfg/rng.hpp"

namespace sfg {
namespace {

void check_args(const RobustnessConfig& config, std::size_t n_draws, double magnitude) {
    if (config.extreme_points.size() != 4)
        throw InvalidArgument("run_robustness: configuration '" + config.id + "' must have exactly 4 points");
    if (n_draws == 0)
        throw InvalidArgument("run_robustness: n_draws must be at least 1");
    if (!(magnitude >= 0.0))
        throw InvalidArgument("run_robustness: magnitude must be non-negative");
}

RobustnessDraw one_draw(const RobustnessConfig& config, Point reference_focus, std::size_t i, double magnitude,
                        std::uint64_t seed) {
    Rng rng = Rng::substream(seed, i);
    const PointSet moved = perturb_points(config.extreme_points, magnitude, rng);
    RobustnessDraw d;
    d.config_id = config.id;
    d.draw_index = i;
    for (std::size_t k = 0; k < moved.size(); ++k)
        d.annotation_error += distance(moved[k], config.extreme_points[k]);
    d.focal_perturbation = distance(focal_point(moved, {kRobustnessFocalTol}), reference_focus);
    return d;
}

} // namespace

RobustnessReport summarize(std::vector<RobustnessDraw> draws) {
    RobustnessReport rep;
    rep.draws = std::move(draws);
    if (rep.draws.empty())
        return rep;
    double ann = 0.0, foc = 0.0;
    for (const auto& d : rep.draws) {
        ann += d.annotation_error;
        foc += d.focal_perturbation;
    }
    const double n = static_cast<double>(rep.draws.size());
    rep.mean_annotation_error = ann / n;
    rep.mean_focal_perturbation = foc / n;
    rep.attenuation_ratio = rep.mean_annotation_error > 0.0 ? rep.mean_focal_perturbation / rep.mean_annotation_error : 0.0;
    return rep;
}

RobustnessReport pool(const std::vector<RobustnessReport>& reports) {
    std::vector<RobustnessDraw> all;
    for (const auto& r : reports)
        all.insert(all.end(), r.draws.begin(), r.draws.end());
    return summarize(std::move(all));
}

RobustnessReport run_robustness(const RobustnessConfig& config, std::size_t n_draws, double magnitude,
                                std::uint64_t seed) {
    check_args(config, n_draws, magnitude);
    const Point focus = focal_point(config.extreme_points, {kRobustnessFocalTol});
    std::vector<RobustnessDraw> draws(n_draws);
    std::exception_ptr failure;
    const auto n = static_cast<std::int64_t>(n_draws);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            draws[std::size_t(i)] = one_draw(config, focus, std::size_t(i), magnitude, seed);
        } catch (...) {
#pragma omp critical(sfg_robustness_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return summarize(std::move(draws));
}

std::vector<RobustnessReport> run_robustness_suite(const std::vector<RobustnessConfig>& configs, std::size_t n_draws,
                                                   double magnitude, std::uint64_t seed) {
    std::vector<RobustnessReport> out;
    out.reserve(configs.size());
    for (std::size_t k = 0; k < configs.size(); ++k)
        out.push_back(run_robustness(configs[k], n_draws, magnitude, Rng::splitmix64(seed + k)));
    return out;
}

namespace serial {

RobustnessReport run_robustness(const RobustnessConfig& config, std::size_t n_draws, double magnitude,
                                std::uint64_t seed) {
    check_args(config, n_draws, magnitude);
    const Point focus = focal_point(config.extreme_points, {kRobustnessFocalTol});
    std::vector<RobustnessDraw> draws;
    draws.reserve(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i)
        draws.push_back(one_draw(config, focus, i, magnitude, seed));
    return summarize(std::move(draws));
}

} // namespace serial

double min_spacing(const PointSet& points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, distance(points[i], points[j]));
    return best;
}

std::vector<RobustnessConfig> default_robustness_configs(std::uint64_t seed) {
    // Extreme points of randomly rotated ellipses. Elongation is capped: for thin objects
    // at oblique angles the EP quadrilateral's diagonals become nearly parallel and
    // the focal point stops attenuating noise (ratio > 1 at aspect 4).
    constexpr std::size_t kConfigs = 20;
    constexpr double kBorder = 20.0;
    constexpr double kMinSpacing = 50.0;
    constexpr double kMaxAspect = 1.75;
    constexpr int kSamples = 7200;
    const double h = double(kRobustnessGrid.height), w = double(kRobustnessGrid.width);

    Rng rng(seed);
    std::vector<RobustnessConfig> out;
    while (out.size() < kConfigs) {
        const double r0 = rng.uniform(140.0, h - 140.0);
        const double c0 = rng.uniform(140.0, w - 140.0);
        const double major = rng.uniform(60.0, 180.0);
        const double minor = major / rng.uniform(1.0, kMaxAspect);
        const bool tall = rng.coin();
        const double a = tall ? major : minor;
        const double b = tall ? minor : major;
        const double theta = rng.uniform(0.0, std::numbers::pi);

        Point top{h, 0}, bottom{-1, 0}, left{0, w}, right{0, -1};
        for (int s = 0; s < kSamples; ++s) {
            const double t = 2.0 * std::numbers::pi * s / kSamples;
            const Point p{r0 + a * std::cos(t) * std::cos(theta) - b * std::sin(t) * std::sin(theta),
                          c0 + a * std::cos(t) * std::sin(theta) + b * std::sin(t) * std::cos(theta)};
            if (p.row < top.row) top = p;
            if (p.row > bottom.row) bottom = p;
            if (p.col < left.col) left = p;
            if (p.col > right.col) right = p;
        }
        PointSet eps{top, bottom, left, right};
        const bool inside = std::all_of(eps.begin(), eps.end(), [&](const Point& p) {
            return p.row >= kBorder && p.col >= kBorder && p.row <= h - 1 - kBorder && p.col <= w - 1 - kBorder;
        });
        if (!inside || min_spacing(eps) < kMinSpacing)
            continue;
        out.push_back({"cfg" + std::to_string(out.size()), std::move(eps)});
    }
    out.push_back({"square", {{206, 206}, {206, 306}, {306, 206}, {306, 306}}});
    return out;
}

std::vector<DensityRow> export_density(const RobustnessReport& report) {
    std::vector<DensityRow> rows;
    rows.reserve(report.draws.size());
    for (const auto& d : report.draws)
        rows.push_back({d.config_id, d.draw_index, d.annotation_error, d.focal_perturbation});
    return rows;
}

} // namespace sfg
