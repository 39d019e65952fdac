#include "sfg/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "sfg/errors.hpp"

namespace sfg {
namespace {

// Shared by the threaded and serial rasterizers so both accumulate in the same order.
inline double potential_at(const PointSet& points, double r, double c) {
    double sum = 0.0;
    for (const auto& p : points) {
        const double dr = r - p.row;
        const double dc = c - p.col;
        sum += std::sqrt(dr * dr + dc * dc);
    }
    return sum;
}

inline double gaussian_at(const PointSet& centers, double inv_two_sigma_sq, double r, double c) {
    double best = 0.0;
    for (const auto& p : centers) {
        const double dr = r - p.row;
        const double dc = c - p.col;
        best = std::max(best, std::exp(-(dr * dr + dc * dc) * inv_two_sigma_sq));
    }
    return best;
}

void check_dims(GridDims dims) {
    if (dims.empty())
        throw InvalidArgument("grid dims must be positive");
}

void check_points(const PointSet& points) {
    if (points.empty())
        throw InvalidArgument("point set is empty");
    for (const auto& p : points)
        if (!std::isfinite(p.row) || !std::isfinite(p.col))
            throw InvalidArgument("point coordinates must be finite");
}

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidArgument("gaussian sigma must be positive");
}

} // namespace

double potential_eval(const PointSet& points, Point x) {
    check_points(points);
    return potential_at(points, x.row, x.col);
}

double gaussian_eval(const PointSet& centers, double sigma, Point x) {
    check_sigma(sigma);
    return gaussian_at(centers, 1.0 / (2.0 * sigma * sigma), x.row, x.col);
}

ScalarField rasterize_potential(const PointSet& points, GridDims dims) {
    check_dims(dims);
    check_points(points);
    ScalarField out(dims);
    const auto h = static_cast<std::int64_t>(dims.height);
    const std::size_t w = dims.width;
    double* data = out.values().data();
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < h; ++r) {
        double* row = data + static_cast<std::size_t>(r) * w;
        for (std::size_t c = 0; c < w; ++c)
            row[c] = potential_at(points, static_cast<double>(r), static_cast<double>(c));
    }
    return out;
}

ScalarField rasterize_gaussian(const PointSet& centers, double sigma, GridDims dims) {
    check_dims(dims);
    check_sigma(sigma);
    ScalarField out(dims);
    if (centers.empty())
        return out;
    const double k = 1.0 / (2.0 * sigma * sigma);
    const auto h = static_cast<std::int64_t>(dims.height);
    const std::size_t w = dims.width;
    double* data = out.values().data();
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < h; ++r) {
        double* row = data + static_cast<std::size_t>(r) * w;
        for (std::size_t c = 0; c < w; ++c)
            row[c] = gaussian_at(centers, k, static_cast<double>(r), static_cast<double>(c));
    }
    return out;
}

namespace serial {

ScalarField rasterize_potential(const PointSet& points, GridDims dims) {
    check_dims(dims);
    check_points(points);
    ScalarField out(dims);
    for (std::size_t r = 0; r < dims.height; ++r)
        for (std::size_t c = 0; c < dims.width; ++c)
            out.at(r, c) = potential_at(points, static_cast<double>(r), static_cast<double>(c));
    return out;
}

ScalarField rasterize_gaussian(const PointSet& centers, double sigma, GridDims dims) {
    check_dims(dims);
    check_sigma(sigma);
    ScalarField out(dims);
    const double k = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t r = 0; r < dims.height; ++r)
        for (std::size_t c = 0; c < dims.width; ++c)
            out.at(r, c) = gaussian_at(centers, k, static_cast<double>(r), static_cast<double>(c));
    return out;
}

} // namespace serial

namespace {

bool passes_probe(const PointSet& points, Point x, double tol) {
    const double here = potential_at(points, x.row, x.col);
    const double slack = 1e-12 * std::max(1.0, here);
    const Point steps[] = {{tol, 0.0}, {-tol, 0.0}, {0.0, tol}, {0.0, -tol}};
    for (const auto& s : steps) {
        const Point probe = x + s;
        if (here > potential_at(points, probe.row, probe.col) + slack)
            return false;
    }
    return true;
}

struct AnchorStep {
    bool optimal = false;
    Point next;
};

// Sub-gradient test at an input point. R is the pull of all non-coincident points;
// the anchor is the minimizer iff |R| <= its multiplicity. Otherwise step along R by
// (|R| - m) / L, which strictly decreases the potential.
AnchorStep anchor_step(const PointSet& points, Point anchor) {
    double multiplicity = 0.0;
    Point pull{};
    double lipschitz = 0.0;
    for (const auto& p : points) {
        const double d = distance(p, anchor);
        if (d == 0.0) {
            multiplicity += 1.0;
            continue;
        }
        pull = pull + (1.0 / d) * (p - anchor);
        lipschitz += 1.0 / d;
    }
    const double norm = std::sqrt(pull.row * pull.row + pull.col * pull.col);
    if (norm <= multiplicity || lipschitz == 0.0)
        return {true, anchor};
    const double t = (norm - multiplicity) / lipschitz;
    return {false, anchor + (t / norm) * pull};
}

Point weiszfeld_step(const PointSet& points, Point x) {
    Point num{};
    double den = 0.0;
    for (const auto& p : points) {
        const double d = std::max(distance(p, x), std::numeric_limits<double>::min());
        num = num + (1.0 / d) * p;
        den += 1.0 / d;
    }
    return (1.0 / den) * num;
}

// Solves (H + mu I) s = -g for the potential's gradient g and Hessian
// H = sum (I - u u^T) / d. Returns nullopt next to an input point.
std::optional<Point> newton_step(const PointSet& points, Point x) {
    double g_r = 0.0, g_c = 0.0, h_rr = 0.0, h_rc = 0.0, h_cc = 0.0;
    for (const auto& p : points) {
        const double dr = x.row - p.row;
        const double dc = x.col - p.col;
        const double d = std::sqrt(dr * dr + dc * dc);
        if (d < 1e-9)
            return std::nullopt;
        const double ur = dr / d, uc = dc / d;
        g_r += ur;
        g_c += uc;
        h_rr += (1.0 - ur * ur) / d;
        h_rc += -ur * uc / d;
        h_cc += (1.0 - uc * uc) / d;
    }
    const double mu = 1e-12 * (h_rr + h_cc);
    h_rr += mu;
    h_cc += mu;
    const double det = h_rr * h_cc - h_rc * h_rc;
    if (!(det > 0.0))
        return std::nullopt;
    const Point step{-(h_cc * g_r - h_rc * g_c) / det, -(-h_rc * g_r + h_rr * g_c) / det};
    const Point next = x + step;
    if (!std::isfinite(next.row) || !std::isfinite(next.col))
        return std::nullopt;
    return next;
}

} // namespace

Point focal_point(const PointSet& points, FocalOptions options) {
    check_points(points);
    if (!(options.tol > 0.0))
        throw InvalidArgument("focal_point tolerance must be positive");

    const Point first = points.front();
    if (std::all_of(points.begin(), points.end(), [&](const Point& p) { return p == first; }))
        return first;

    // A minimizer sitting on an input point is found exactly here; Weiszfeld only
    // approaches such vertices sublinearly.
    for (const auto& p : points)
        if (anchor_step(points, p).optimal)
            return p;

    Point x{};
    for (const auto& p : points)
        x = x + p;
    x = (1.0 / static_cast<double>(points.size())) * x;

    Point best = x;
    double best_val = potential_at(points, x.row, x.col);
    std::vector<bool> rejected(points.size(), false);
    const double stop_step = options.tol * 1e-3;

    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        std::size_t nearest = 0;
        double nearest_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = distance(points[i], x);
            if (d < nearest_d) {
                nearest_d = d;
                nearest = i;
            }
        }

        Point next;
        if (nearest_d <= options.tol && !rejected[nearest]) {
            const Point anchor = points[nearest];
            const AnchorStep step = anchor_step(points, anchor);
            if (step.optimal)
                return anchor;
            for (std::size_t i = 0; i < points.size(); ++i)
                if (points[i] == anchor)
                    rejected[i] = true;
            next = step.next;
        } else {
            next = weiszfeld_step(points, x);
            // Weiszfeld crawls along thin valleys (near-collinear points); the best point
            // on a halving search along the Newton direction replaces it when lower.
            if (const auto nt = newton_step(points, x)) {
                double next_val = potential_at(points, next.row, next.col);
                const Point dir = *nt - x;
                double t = 1.0;
                for (int k = 0; k < 40; ++k, t *= 0.5) {
                    const Point cand = x + t * dir;
                    const double v = potential_at(points, cand.row, cand.col);
                    if (v < next_val) {
                        next_val = v;
                        next = cand;
                    }
                }
            }
        }

        const double moved = distance(next, x);
        x = next;
        const double val = potential_at(points, x.row, x.col);
        if (val < best_val) {
            best_val = val;
            best = x;
        }
        if (moved <= stop_step && passes_probe(points, x, options.tol))
            return x;
    }
    if (passes_probe(points, best, options.tol))
        return best;
    throw IterationLimit("focal_point: Weiszfeld iteration did not converge", best);
}

} // namespace sfg
