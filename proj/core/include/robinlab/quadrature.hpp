#pragma once

#include <vector>

#include <Eigen/Core>

namespace robinlab {

/// Quadrature point in barycentric coordinates of a simplex; weights of a
/// rule sum to one and are scaled by the cell measure at the call site.
struct QuadPoint {
    Eigen::Vector3d bary;
    double weight;
};

enum class CellRule {
    Barycenter,  ///< one point, coefficients treated as piecewise constant
    ThreePoint,  ///< degree-2 rule (2D) / two-point Gauss (1D)
};

/// Rules for sampling coefficients on a simplex of dimension `dim`.
std::vector<QuadPoint> cell_rule(int dim, CellRule rule);

/// Higher-order rule used for error norms (degree 4 in 2D, 5-point Gauss in 1D).
std::vector<QuadPoint> accurate_rule(int dim);

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule computed by Newton iteration on P_n.
GaussLegendre gauss_legendre(int n);

/// Integrates f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate_gauss(const GaussLegendre& rule, double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

}  // namespace robinlab
