#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace sfg {

// Image-plane location in (row, col) order. Pixel centers sit at integer coordinates,
// origin top-left.
struct Point {
    double row = 0.0;
    double col = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.row + b.row, a.col + b.col}; }
inline Point operator-(Point a, Point b) { return {a.row - b.row, a.col - b.col}; }
inline Point operator*(double s, Point p) { return {s * p.row, s * p.col}; }

inline double distance(Point a, Point b) {
    const double dr = a.row - b.row;
    const double dc = a.col - b.col;
    return std::sqrt(dr * dr + dc * dc);
}

inline double squared_distance(Point a, Point b) {
    const double dr = a.row - b.row;
    const double dc = a.col - b.col;
    return dr * dr + dc * dc;
}

using PointSet = std::vector<Point>;

struct Pixel {
    std::int64_t row = 0;
    std::int64_t col = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Nearest pixel center (halves round away from zero).
inline Pixel snap(Point p) {
    return {static_cast<std::int64_t>(std::llround(p.row)), static_cast<std::int64_t>(std::llround(p.col))};
}

inline Point center_of(Pixel px) {
    return {static_cast<double>(px.row), static_cast<double>(px.col)};
}

struct GridDims {
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t cells() const { return height * width; }
    bool empty() const { return height == 0 || width == 0; }
    bool contains(Pixel px) const {
        return px.row >= 0 && px.col >= 0 && static_cast<std::size_t>(px.row) < height &&
               static_cast<std::size_t>(px.col) < width;
    }

    friend bool operator==(const GridDims&, const GridDims&) = default;
};

// Inclusive integer box.
struct BoundingBox {
    std::int64_t min_row = 0;
    std::int64_t min_col = 0;
    std::int64_t max_row = 0;
    std::int64_t max_col = 0;

    bool contains(std::int64_t r, std::int64_t c) const {
        return r >= min_row && r <= max_row && c >= min_col && c <= max_col;
    }
    bool contains(Pixel px) const { return contains(px.row, px.col); }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Row-major grid of doubles.
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(GridDims dims, double fill = 0.0) : dims_(dims), values_(dims.cells(), fill) {}
    ScalarField(GridDims dims, std::vector<double> values);

    const GridDims& dims() const { return dims_; }
    std::size_t height() const { return dims_.height; }
    std::size_t width() const { return dims_.width; }

    double& at(std::size_t r, std::size_t c) { return values_[r * dims_.width + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * dims_.width + c]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

  private:
    GridDims dims_;
    std::vector<double> values_;
};

// Row-major foreground flags.
class BinaryMask {
  public:
    BinaryMask() = default;
    explicit BinaryMask(GridDims dims, bool fill = false) : dims_(dims), bits_(dims.cells(), fill ? 1 : 0) {}
    BinaryMask(GridDims dims, std::vector<std::uint8_t> bits);

    const GridDims& dims() const { return dims_; }
    std::size_t height() const { return dims_.height; }
    std::size_t width() const { return dims_.width; }

    bool at(std::size_t r, std::size_t c) const { return bits_[r * dims_.width + c] != 0; }
    void set(std::size_t r, std::size_t c, bool v = true) { bits_[r * dims_.width + c] = v ? 1 : 0; }

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::size_t count() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

  private:
    GridDims dims_;
    std::vector<std::uint8_t> bits_;
};

} // namespace sfg
