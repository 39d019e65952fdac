#pragma once

#include <cstddef>

#include "sfg/geometry.hpp"

namespace sfg {

/// Sum of Euclidean distances from x to every point (the n-ellipse potential).
/// Throws InvalidArgument for an empty point set.
double potential_eval(const PointSet& points, Point x);

/// Isotropic unit-peak Gaussian; several centers combine by pointwise maximum.
/// Returns 0 for an empty center set. Throws InvalidArgument when sigma <= 0.
double gaussian_eval(const PointSet& centers, double sigma, Point x);

/// potential_eval sampled at every integer pixel center. Rows are split across
/// OpenMP threads; the result is bit-identical to serial::rasterize_potential.
ScalarField rasterize_potential(const PointSet& points, GridDims dims);

/// gaussian_eval sampled at every pixel center.
ScalarField rasterize_gaussian(const PointSet& centers, double sigma, GridDims dims);

struct FocalOptions {
    double tol = 1e-3;
    std::size_t max_iter = 10000;
};

/// Geometric median of the points (argmin of potential_eval) by Weiszfeld iteration.
///
/// When an iterate reaches an input point the sub-gradient optimality test decides
/// whether that point is the minimizer; otherwise a descent step away from it is
/// taken. The returned point satisfies potential(x) <= potential(x +- tol * e) on
/// both axes. Throws IterationLimit (carrying the best iterate) if that cannot be
/// established within max_iter iterations.
Point focal_point(const PointSet& points, FocalOptions options = {});

namespace serial {

// Single-threaded references kept for equivalence tests and benchmarks.
ScalarField rasterize_potential(const PointSet& points, GridDims dims);
ScalarField rasterize_gaussian(const PointSet& centers, double sigma, GridDims dims);

} // namespace serial

} // namespace sfg
