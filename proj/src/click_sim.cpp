#include "sfg/click_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sfg/errors.hpp"

namespace sfg {

PointSet extract_extreme_points(const BinaryMask& mask) {
    const std::size_t h = mask.height();
    const std::size_t w = mask.width();
    std::size_t min_r = h, max_r = 0, min_c = w, max_c = 0;
    bool any = false;
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            if (mask.at(r, c)) {
                any = true;
                min_r = std::min(min_r, r);
                max_r = std::max(max_r, r);
                min_c = std::min(min_c, c);
                max_c = std::max(max_c, c);
            }
    if (!any)
        throw EmptyMask("extract_extreme_points: mask has no foreground");

    auto row_middle = [&](std::size_t r) {
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < w; ++c)
            if (mask.at(r, c))
                cols.push_back(c);
        return Point{double(r), double(cols[(cols.size() - 1) / 2])};
    };
    auto col_middle = [&](std::size_t c) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < h; ++r)
            if (mask.at(r, c))
                rows.push_back(r);
        return Point{double(rows[(rows.size() - 1) / 2]), double(c)};
    };
    return {row_middle(min_r), row_middle(max_r), col_middle(min_c), col_middle(max_c)};
}

PointSet perturb_points(const PointSet& points, double magnitude, Rng& rng, std::optional<GridDims> dims) {
    if (!(magnitude >= 0.0))
        throw InvalidArgument("perturb_points: magnitude must be non-negative");
    PointSet out;
    out.reserve(points.size());
    for (const auto& p : points) {
        Point q = p;
        if (magnitude > 0.0) {
            q.row += rng.uniform(-magnitude, magnitude);
            q.col += rng.uniform(-magnitude, magnitude);
        }
        if (dims) {
            q.row = std::clamp(q.row, 0.0, double(dims->height) - 1.0);
            q.col = std::clamp(q.col, 0.0, double(dims->width) - 1.0);
        }
        out.push_back(q);
    }
    return out;
}

PointSet select_three_points(const PointSet& extreme_points, Rng& rng) {
    if (extreme_points.size() != 4)
        throw InvalidArgument("select_three_points: exactly four points are required");
    std::size_t bi = 0, bj = 1;
    double best = squared_distance(extreme_points[0], extreme_points[1]);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double d = squared_distance(extreme_points[i], extreme_points[j]);
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    const std::size_t drop = rng.coin() ? bj : bi;
    PointSet out;
    for (std::size_t i = 0; i < 4; ++i)
        if (i != drop)
            out.push_back(extreme_points[i]);
    return out;
}

std::vector<Component> connected_components(const BinaryMask& mask) {
    const auto h = static_cast<std::int64_t>(mask.height());
    const auto w = static_cast<std::int64_t>(mask.width());
    std::vector<std::uint8_t> seen(mask.bits().size(), 0);
    std::vector<Component> out;
    std::vector<Pixel> stack;

    for (std::int64_t r = 0; r < h; ++r)
        for (std::int64_t c = 0; c < w; ++c) {
            const auto idx = static_cast<std::size_t>(r * w + c);
            if (!mask.bits()[idx] || seen[idx])
                continue;
            Component comp;
            comp.label = out.size() + 1;
            seen[idx] = 1;
            stack.push_back({r, c});
            while (!stack.empty()) {
                const Pixel px = stack.back();
                stack.pop_back();
                comp.pixels.push_back(px);
                for (std::int64_t dr = -1; dr <= 1; ++dr)
                    for (std::int64_t dc = -1; dc <= 1; ++dc) {
                        const std::int64_t nr = px.row + dr, nc = px.col + dc;
                        if (nr < 0 || nc < 0 || nr >= h || nc >= w)
                            continue;
                        const auto nidx = static_cast<std::size_t>(nr * w + nc);
                        if (mask.bits()[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.push_back({nr, nc});
                        }
                    }
            }
            std::sort(comp.pixels.begin(), comp.pixels.end());
            comp.size = comp.pixels.size();
            out.push_back(std::move(comp));
        }
    std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) { return a.size > b.size; });
    return out;
}

namespace {

// Exact 1-D squared distance transform: lower envelope of parabolas rooted at the
// finite entries of f.
void squared_dt_1d(std::vector<double>& f, std::vector<double>& scratch, std::vector<std::size_t>& v,
                   std::vector<double>& z) {
    const std::size_t n = f.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    v.assign(n, 0);
    z.assign(n + 1, 0.0);

    std::ptrdiff_t k = -1;
    for (std::size_t q = 0; q < n; ++q) {
        if (f[q] == inf)
            continue;
        double s = -inf;
        while (k >= 0) {
            const std::size_t p = v[std::size_t(k)];
            s = ((f[q] + double(q) * double(q)) - (f[p] + double(p) * double(p))) / (2.0 * (double(q) - double(p)));
            if (s > z[std::size_t(k)])
                break;
            --k;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        ++k;
        v[std::size_t(k)] = q;
        z[std::size_t(k)] = s;
        z[std::size_t(k) + 1] = inf;
    }
    if (k < 0) {
        f.assign(n, inf);
        return;
    }
    scratch.assign(n, inf);
    std::size_t j = 0;
    for (std::size_t q = 0; q < n; ++q) {
        while (z[j + 1] < double(q))
            ++j;
        const double d = double(q) - double(v[j]);
        scratch[q] = d * d + f[v[j]];
    }
    f.swap(scratch);
}

} // namespace

ScalarField boundary_distance(const BinaryMask& mask) {
    const std::size_t h = mask.height();
    const std::size_t w = mask.width();
    constexpr double inf = std::numeric_limits<double>::infinity();
    ScalarField sq(mask.dims(), inf);

    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            if (!mask.at(r, c))
                continue;
            const bool boundary = (r > 0 && !mask.at(r - 1, c)) || (r + 1 < h && !mask.at(r + 1, c)) ||
                                  (c > 0 && !mask.at(r, c - 1)) || (c + 1 < w && !mask.at(r, c + 1));
            if (boundary)
                sq.at(r, c) = 0.0;
        }

    std::vector<double> line, scratch, z;
    std::vector<std::size_t> v;
    for (std::size_t c = 0; c < w; ++c) {
        line.resize(h);
        for (std::size_t r = 0; r < h; ++r)
            line[r] = sq.at(r, c);
        squared_dt_1d(line, scratch, v, z);
        for (std::size_t r = 0; r < h; ++r)
            sq.at(r, c) = line[r];
    }
    for (std::size_t r = 0; r < h; ++r) {
        line.assign(sq.values().begin() + std::ptrdiff_t(r * w), sq.values().begin() + std::ptrdiff_t((r + 1) * w));
        squared_dt_1d(line, scratch, v, z);
        std::copy(line.begin(), line.end(), sq.values().begin() + std::ptrdiff_t(r * w));
    }
    for (auto& x : sq.values())
        x = std::sqrt(x);
    return sq;
}

std::optional<ClickSample> sample_corrective_click_detailed(const BinaryMask& pred, const BinaryMask& gt,
                                                            SampleMode mode, Rng& rng) {
    if (pred.dims() != gt.dims())
        throw InvalidArgument("sample_corrective_click: prediction and ground truth dims differ");

    BinaryMask fp(gt.dims()), fn(gt.dims());
    bool any = false;
    for (std::size_t r = 0; r < gt.height(); ++r)
        for (std::size_t c = 0; c < gt.width(); ++c) {
            const bool p = pred.at(r, c), g = gt.at(r, c);
            if (p && !g) {
                fp.set(r, c);
                any = true;
            } else if (g && !p) {
                fn.set(r, c);
                any = true;
            }
        }
    if (!any)
        return std::nullopt;

    auto fp_blobs = connected_components(fp);
    auto fn_blobs = connected_components(fn);
    const std::size_t fp_size = fp_blobs.empty() ? 0 : fp_blobs.front().size;
    const std::size_t fn_size = fn_blobs.empty() ? 0 : fn_blobs.front().size;
    const bool pick_fn = fn_size >= fp_size;
    Component blob = pick_fn ? std::move(fn_blobs.front()) : std::move(fp_blobs.front());

    std::vector<Pixel> candidates;
    if (mode == SampleMode::Train) {
        const ScalarField dist = boundary_distance(gt);
        for (const auto& px : blob.pixels) {
            const double d = dist.at(std::size_t(px.row), std::size_t(px.col));
            if (d >= kTrainBandMin && d <= kTrainBandMax)
                candidates.push_back(px);
        }
    }
    const std::vector<Pixel>& pool = candidates.empty() ? blob.pixels : candidates;
    const Pixel chosen = pool[rng.index(pool.size())];

    ClickSample out;
    out.click = {center_of(chosen), pick_fn ? Polarity::FNC : Polarity::FPC};
    out.blob = std::move(blob);
    return out;
}

std::optional<CorrectiveClick> sample_corrective_click(const BinaryMask& pred, const BinaryMask& gt, SampleMode mode,
                                                       Rng& rng) {
    auto s = sample_corrective_click_detailed(pred, gt, mode, rng);
    if (!s)
        return std::nullopt;
    return s->click;
}

} // namespace sfg
