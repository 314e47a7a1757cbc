#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace mhdk {

using Index = std::int64_t;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

// Thrown for precondition violations on public operations.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical routine detects a state it cannot continue from
// (degenerate geometry, non-finite iterates).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mhdk
