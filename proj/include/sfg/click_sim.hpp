#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sfg/geometry.hpp"
#include "sfg/rng.hpp"

namespace sfg {

enum class Polarity { FPC, FNC };

struct CorrectiveClick {
    Point location;
    Polarity polarity = Polarity::FNC;

    friend bool operator==(const CorrectiveClick&, const CorrectiveClick&) = default;
};

/// Top, bottom, left and right foreground pixels, in that order. Within an
/// extremal row/column the middle pixel of the run is taken (lower median for even
/// counts). Throws EmptyMask when the mask has no foreground.
PointSet extract_extreme_points(const BinaryMask& mask);

/// Adds independent U[-magnitude, magnitude] noise to each coordinate. With dims the
/// results are clipped to the grid extent.
PointSet perturb_points(const PointSet& points, double magnitude, Rng& rng,
                        std::optional<GridDims> dims = std::nullopt);

/// Drops one member (chosen by rng) of the closest pair of four points.
/// Distance ties go to the lexicographically smallest index pair.
PointSet select_three_points(const PointSet& extreme_points, Rng& rng);

struct Component {
    std::size_t label = 0; // 1-based, in raster order of each component's first pixel
    std::size_t size = 0;
    std::vector<Pixel> pixels;
};

/// 8-connected components, largest first (ties keep raster order).
std::vector<Component> connected_components(const BinaryMask& mask);

enum class SampleMode { Test, Train };

/// Exact Euclidean distance (px) from every pixel to the nearest boundary pixel of the
/// mask. Boundary pixels are foreground pixels with a background 4-neighbour inside
/// the grid. All entries are +inf when there is no boundary.
ScalarField boundary_distance(const BinaryMask& mask);

struct ClickSample {
    CorrectiveClick click;
    Component blob; // the error blob the click was drawn from
};

/// Samples a corrective click from the largest false-positive or false-negative blob
/// (size tie goes to FN). Train mode only draws pixels 15-60 px from the gt boundary,
/// falling back to the whole blob if that band is empty. Returns nullopt when pred == gt.
std::optional<ClickSample> sample_corrective_click_detailed(const BinaryMask& pred, const BinaryMask& gt,
                                                            SampleMode mode, Rng& rng);

std::optional<CorrectiveClick> sample_corrective_click(const BinaryMask& pred, const BinaryMask& gt, SampleMode mode,
                                                       Rng& rng);

inline constexpr double kTrainBandMin = 15.0;
inline constexpr double kTrainBandMax = 60.0;

} // namespace sfg
