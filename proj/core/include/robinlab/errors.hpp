#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace robinlab {

/// Malformed or degenerate geometry (bad interval, self-intersecting polygon,
/// inconsistent mesh file, broken mesh invariant).
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point handed to a chart lies outside its cylinder B(0,r) x (-r,r).
class ChartDomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Raised when a sampled coefficient violates strict ellipticity.
class NonElliptic : public std::runtime_error {
public:
    NonElliptic(const Eigen::Vector2d& where, double lambda_min);

    const Eigen::Vector2d& where() const noexcept { return where_; }
    double lambda_min() const noexcept { return lambda_min_; }

private:
    Eigen::Vector2d where_;
    double lambda_min_;
};

/// The shifted system matrix is (numerically) singular: the shift lies in the
/// discrete spectrum.
class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid problem configuration or command line input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace robinlab
