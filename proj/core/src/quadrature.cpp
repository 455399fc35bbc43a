#include "robinlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace robinlab {

std::vector<QuadPoint> cell_rule(int dim, CellRule rule) {
    if (dim == 1) {
        if (rule == CellRule::Barycenter) return {{Eigen::Vector3d(0.5, 0.5, 0.0), 1.0}};
        const double g = 0.5 / std::sqrt(3.0);
        return {{Eigen::Vector3d(0.5 + g, 0.5 - g, 0.0), 0.5}, {Eigen::Vector3d(0.5 - g, 0.5 + g, 0.0), 0.5}};
    }
    if (rule == CellRule::Barycenter) return {{Eigen::Vector3d::Constant(1.0 / 3.0), 1.0}};
    const double a = 2.0 / 3.0, b = 1.0 / 6.0;
    return {{Eigen::Vector3d(a, b, b), 1.0 / 3.0},
            {Eigen::Vector3d(b, a, b), 1.0 / 3.0},
            {Eigen::Vector3d(b, b, a), 1.0 / 3.0}};
}

std::vector<QuadPoint> accurate_rule(int dim) {
    if (dim == 1) {
        const auto gl = gauss_legendre(5);
        std::vector<QuadPoint> out;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double t = 0.5 * (1.0 + gl.nodes[i]);
            out.push_back({Eigen::Vector3d(1.0 - t, t, 0.0), 0.5 * gl.weights[i]});
        }
        return out;
    }
    // Strang-Fix / Dunavant six-point rule, exact for degree 4.
    const double w1 = 0.223381589678011, w2 = 0.109951743655322;
    const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1;
    const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2;
    return {{Eigen::Vector3d(b1, a1, a1), w1}, {Eigen::Vector3d(a1, b1, a1), w1}, {Eigen::Vector3d(a1, a1, b1), w1},
            {Eigen::Vector3d(b2, a2, a2), w2}, {Eigen::Vector3d(a2, b2, a2), w2}, {Eigen::Vector3d(a2, a2, b2), w2}};
}

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

}  // namespace robinlab
