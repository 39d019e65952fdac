#include "sfg/geometry.hpp"

#include <algorithm>

#include "sfg/errors.hpp"

namespace sfg {

ScalarField::ScalarField(GridDims dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
    if (values_.size() != dims_.cells())
        throw InvalidArgument("ScalarField: value count does not match dims");
}

BinaryMask::BinaryMask(GridDims dims, std::vector<std::uint8_t> bits) : dims_(dims), bits_(std::move(bits)) {
    if (bits_.size() != dims_.cells())
        throw InvalidArgument("BinaryMask: bit count does not match dims");
    for (auto& b : bits_)
        b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

} // namespace sfg
