#pragma once

#include <cstdint>

#include "sfg/geometry.hpp"

namespace sfg {

struct SFGParams {
    double beta = 5.0;           // decay exponent applied to 1/potential
    double sigma = 10.0;         // Gaussian width (px) for EP and corrective-click heat maps
    std::int64_t bbox_margin = 0;
    double epsilon_floor = 1e-6; // potential clamp before inversion

    void validate() const;
};

// FPC clicks raise the map (max with g); FNC clicks depress it (min with 1 - g).
struct ClickSet {
    PointSet fpc;
    PointSet fnc;

    bool empty() const { return fpc.empty() && fnc.empty(); }
};

/// Tight box over the snapped points, dilated by margin and clipped to the grid.
BoundingBox bounding_box(const PointSet& points, std::int64_t margin, GridDims dims);

/// (1 / max(pi, eps))^beta, min-max normalized over the whole grid, then zeroed
/// outside bbox. Throws DegenerateField when the normalization has zero range.
ScalarField postprocess(const ScalarField& potential, const BoundingBox& bbox, const SFGParams& params);

/// min(pi_hat, 1 - g(fnc)) followed by max(., g(fpc)). Click coordinates snap to
/// pixel centers. Empty clicks return an exact copy of the input.
ScalarField apply_corrective_clicks(const ScalarField& pi_hat, const ClickSet& clicks, double sigma);

/// max(pi_tilde, g(extreme points)), Gaussians centered on the snapped points.
ScalarField compose_extreme_points(const ScalarField& pi_tilde, const PointSet& extreme_points, double sigma);

struct EncodeStages {
    BoundingBox bbox;
    ScalarField potential;
    ScalarField pi_hat;
    ScalarField pi_tilde;
    ScalarField psi;
};

EncodeStages encode_stages(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params,
                           GridDims dims);

/// Full soft-focus map for >= 2 extreme points plus optional corrective clicks.
ScalarField encode(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params, GridDims dims);

/// Snapped pixel centers of the points; throws InvalidArgument if any lies off the grid.
PointSet snapped_on_grid(const PointSet& points, GridDims dims, const char* what);

namespace serial {

ScalarField encode(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params, GridDims dims);

} // namespace serial

} // namespace sfg
