#pragma once

#include <stdexcept>
#include <string>

#include "sfg/geometry.hpp"

namespace sfg {

class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Thrown by postprocess when the potential field has no dynamic range.
class DegenerateField : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class EmptyMask : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed or unsupported file contents.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Weiszfeld did not satisfy its stopping test; best_iterate is the lowest-potential point seen.
class IterationLimit : public std::runtime_error {
  public:
    IterationLimit(const std::string& what, Point best)
        : std::runtime_error(what), best_iterate(best) {}

    Point best_iterate;
};

} // namespace sfg
