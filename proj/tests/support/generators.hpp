#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "robinlab/mesh.hpp"

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

/// a = R diag(l1, l2) R^T + k J with J the unit skew matrix: sym(a) has
/// eigenvalues l1 <= l2.
inline Eigen::Matrix2d elliptic_matrix(Rng& rng, double lmin, double lmax, double skew) {
    const double l1 = rng.uniform(lmin, lmax);
    const double l2 = rng.uniform(l1, lmax);
    const Eigen::Matrix2d r = rotation(rng.uniform(0.0, std::numbers::pi));
    Eigen::Matrix2d j;
    j << 0.0, 1.0, -1.0, 0.0;
    return r * Eigen::Vector2d(l1, l2).asDiagonal() * r.transpose() + rng.uniform(-skew, skew) * j;
}

/// Piecewise linear graph on [-r, r] with `pieces` segments and slopes bounded by max_slope.
inline robinlab::PiecewiseLinear graph(Rng& rng, double r, int pieces, double max_slope) {
    std::vector<double> knots{-r};
    for (int k = 1; k < pieces; ++k) knots.push_back(-r + 2.0 * r * k / pieces + rng.uniform(-0.2, 0.2) * r / pieces);
    knots.push_back(r);
    std::vector<double> values{rng.uniform(-0.1, 0.1) * r};
    for (std::size_t k = 1; k < knots.size(); ++k) {
        values.push_back(values.back() + rng.uniform(-max_slope, max_slope) * (knots[k] - knots[k - 1]));
    }
    return robinlab::PiecewiseLinear(knots, values);
}

inline robinlab::BoundaryChart chart(Rng& rng, double r, int pieces, double max_slope) {
    const robinlab::Point anchor(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return robinlab::BoundaryChart::make(anchor, rotation(rng.uniform(0.0, 2.0 * std::numbers::pi)), r,
                                         graph(rng, r, pieces, max_slope));
}

inline Eigen::VectorXd vector(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
    return v;
}

}  // namespace gen
