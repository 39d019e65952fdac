#include "sfg/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfg/errors.hpp"
#include "sfg/field.hpp"

namespace sfg {

void SFGParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw InvalidArgument("beta must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidArgument("sigma must be positive");
    if (!(epsilon_floor > 0.0))
        throw InvalidArgument("epsilon_floor must be positive");
    if (bbox_margin < 0)
        throw InvalidArgument("bbox_margin must be non-negative");
}

BoundingBox bounding_box(const PointSet& points, std::int64_t margin, GridDims dims) {
    if (points.empty())
        throw InvalidArgument("bounding_box: point set is empty");
    if (dims.empty())
        throw InvalidArgument("bounding_box: grid dims must be positive");
    if (margin < 0)
        throw InvalidArgument("bounding_box: margin must be non-negative");

    const Pixel first = snap(points.front());
    BoundingBox box{first.row, first.col, first.row, first.col};
    for (const auto& p : points) {
        const Pixel px = snap(p);
        box.min_row = std::min(box.min_row, px.row);
        box.min_col = std::min(box.min_col, px.col);
        box.max_row = std::max(box.max_row, px.row);
        box.max_col = std::max(box.max_col, px.col);
    }
    const auto last_row = static_cast<std::int64_t>(dims.height) - 1;
    const auto last_col = static_cast<std::int64_t>(dims.width) - 1;
    box.min_row -= margin;
    box.min_col -= margin;
    box.max_row += margin;
    box.max_col += margin;
    if (box.max_row < 0 || box.max_col < 0 || box.min_row > last_row || box.min_col > last_col)
        throw InvalidArgument("bounding_box: points lie outside the grid");
    box.min_row = std::max<std::int64_t>(box.min_row, 0);
    box.min_col = std::max<std::int64_t>(box.min_col, 0);
    box.max_row = std::min(box.max_row, last_row);
    box.max_col = std::min(box.max_col, last_col);
    return box;
}

PointSet snapped_on_grid(const PointSet& points, GridDims dims, const char* what) {
    PointSet out;
    out.reserve(points.size());
    for (const auto& p : points) {
        if (!std::isfinite(p.row) || !std::isfinite(p.col))
            throw InvalidArgument(std::string(what) + " coordinates must be finite");
        const Pixel px = snap(p);
        if (!dims.contains(px))
            throw InvalidArgument(std::string(what) + " lies outside the grid");
        out.push_back(center_of(px));
    }
    return out;
}

namespace {

ScalarField postprocess_impl(const ScalarField& potential, const BoundingBox& bbox, const SFGParams& params,
                             bool parallel) {
    params.validate();
    const GridDims dims = potential.dims();
    if (dims.empty())
        throw InvalidArgument("postprocess: empty field");

    const std::vector<double>& pi = potential.values();
    const auto n = static_cast<std::int64_t>(pi.size());
    std::vector<double> f(pi.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool bad_input = false;

#pragma omp parallel for schedule(static) if (parallel) reduction(min : lo) reduction(max : hi) reduction(|| : bad_input)
    for (std::int64_t i = 0; i < n; ++i) {
        const double v = pi[static_cast<std::size_t>(i)];
        if (!(v >= 0.0) || !std::isfinite(v))
            bad_input = true;
        const double inv = 1.0 / std::max(v, params.epsilon_floor);
        const double fi = std::pow(inv, params.beta);
        f[static_cast<std::size_t>(i)] = fi;
        lo = std::min(lo, fi);
        hi = std::max(hi, fi);
    }
    if (bad_input)
        throw InvalidArgument("postprocess: potential must be finite and non-negative");
    const double range = hi - lo;
    if (!(range > 0.0) || !std::isfinite(range))
        throw DegenerateField("postprocess: potential field has no dynamic range");

    ScalarField out(dims);
    const auto h = static_cast<std::int64_t>(dims.height);
    const std::size_t w = dims.width;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            out.values()[i] = bbox.contains(r, static_cast<std::int64_t>(c)) ? (f[i] - lo) / range : 0.0;
        }
    }
    return out;
}

ScalarField apply_clicks_impl(const ScalarField& pi_hat, const ClickSet& clicks, double sigma, bool parallel) {
    const GridDims dims = pi_hat.dims();
    const PointSet fpc = snapped_on_grid(clicks.fpc, dims, "FPC click");
    const PointSet fnc = snapped_on_grid(clicks.fnc, dims, "FNC click");
    if (!(sigma > 0.0))
        throw InvalidArgument("sigma must be positive");
    if (fpc.empty() && fnc.empty())
        return pi_hat;

    const ScalarField g_fpc = parallel ? rasterize_gaussian(fpc, sigma, dims) : serial::rasterize_gaussian(fpc, sigma, dims);
    const ScalarField g_fnc = parallel ? rasterize_gaussian(fnc, sigma, dims) : serial::rasterize_gaussian(fnc, sigma, dims);
    const bool has_fpc = !fpc.empty();
    const bool has_fnc = !fnc.empty();

    ScalarField out(dims);
    const auto n = static_cast<std::int64_t>(dims.cells());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t s = 0; s < n; ++s) {
        const auto i = static_cast<std::size_t>(s);
        double v = pi_hat.values()[i];
        if (has_fnc)
            v = std::min(v, 1.0 - g_fnc.values()[i]);
        if (has_fpc)
            v = std::max(v, g_fpc.values()[i]);
        out.values()[i] = v;
    }
    return out;
}

ScalarField compose_impl(const ScalarField& pi_tilde, const PointSet& extreme_points, double sigma, bool parallel) {
    const GridDims dims = pi_tilde.dims();
    const PointSet eps = snapped_on_grid(extreme_points, dims, "extreme point");
    const ScalarField g = parallel ? rasterize_gaussian(eps, sigma, dims) : serial::rasterize_gaussian(eps, sigma, dims);
    ScalarField out(dims);
    const auto n = static_cast<std::int64_t>(dims.cells());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t s = 0; s < n; ++s) {
        const auto i = static_cast<std::size_t>(s);
        out.values()[i] = std::max(pi_tilde.values()[i], g.values()[i]);
    }
    return out;
}

EncodeStages encode_impl(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params,
                         GridDims dims, bool parallel) {
    params.validate();
    if (dims.empty())
        throw InvalidArgument("encode: grid dims must be positive");
    if (extreme_points.size() < 2)
        throw InvalidArgument("encode: at least two extreme points are required");
    snapped_on_grid(extreme_points, dims, "extreme point");

    EncodeStages st;
    st.bbox = bounding_box(extreme_points, params.bbox_margin, dims);
    st.potential = parallel ? rasterize_potential(extreme_points, dims) : serial::rasterize_potential(extreme_points, dims);
    st.pi_hat = postprocess_impl(st.potential, st.bbox, params, parallel);
    st.pi_tilde = apply_clicks_impl(st.pi_hat, clicks, params.sigma, parallel);
    st.psi = compose_impl(st.pi_tilde, extreme_points, params.sigma, parallel);
    return st;
}

} // namespace

ScalarField postprocess(const ScalarField& potential, const BoundingBox& bbox, const SFGParams& params) {
    return postprocess_impl(potential, bbox, params, true);
}

ScalarField apply_corrective_clicks(const ScalarField& pi_hat, const ClickSet& clicks, double sigma) {
    for (double v : pi_hat.values())
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidArgument("apply_corrective_clicks: input field must lie in [0, 1]");
    return apply_clicks_impl(pi_hat, clicks, sigma, true);
}

ScalarField compose_extreme_points(const ScalarField& pi_tilde, const PointSet& extreme_points, double sigma) {
    return compose_impl(pi_tilde, extreme_points, sigma, true);
}

EncodeStages encode_stages(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params,
                           GridDims dims) {
    return encode_impl(extreme_points, clicks, params, dims, true);
}

ScalarField encode(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params, GridDims dims) {
    return std::move(encode_impl(extreme_points, clicks, params, dims, true).psi);
}

namespace serial {

ScalarField encode(const PointSet& extreme_points, const ClickSet& clicks, const SFGParams& params, GridDims dims) {
    return std::move(encode_impl(extreme_points, clicks, params, dims, false).psi);
}

} // namespace serial

} // namespace sfg
