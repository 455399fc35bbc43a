#include "robinlab/counterexample.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "robinlab/parabolic.hpp"
#include "robinlab/quadrature.hpp"

namespace robinlab {

double counterexample_alpha(long n) {
    if (n < 1) throw std::invalid_argument("counterexample index must be >= 1");
    return std::sqrt(-std::expm1(-std::numbers::ln2 / static_cast<double>(n)));
}

double counterexample_u(long n, double x) {
    return 2.0 * std::exp(static_cast<double>(n) * std::log1p(-x * x));
}

double counterexample_du(long n, double x) {
    return -4.0 * static_cast<double>(n) * x * std::exp(static_cast<double>(n - 1) * std::log1p(-x * x));
}

long counterexample_index(double omega) {
    if (!std::isfinite(omega)) throw std::invalid_argument("omega must be finite");
    for (long n = 1; n <= kCounterexampleMaxN; ++n) {
        if (4.0 * omega * counterexample_alpha(n) < 2.0) return n;
    }
    throw std::domain_error("no admissible index below the cap for this omega");
}

CounterexampleReport verify_counterexample(double omega, int quadrature_n) {
    if (quadrature_n < 1) throw std::invalid_argument("quadrature_n must be >= 1");
    CounterexampleReport rep;
    rep.omega = omega;
    rep.n = counterexample_index(omega);
    rep.alpha_n = counterexample_alpha(rep.n);
    rep.bound = -2.0 + 4.0 * omega * rep.alpha_n;
    const long n = rep.n;
    const auto integrand = [n, omega](double x) {
        const double sg = (x > 0.0) - (x < 0.0);
        return sg * counterexample_du(n, x) + omega * counterexample_u(n, x);
    };
    const auto integrate = [&](int nodes) {
        const auto rule = gauss_legendre(nodes);
        return integrate_gauss(rule, -rep.alpha_n, 0.0, integrand) + integrate_gauss(rule, 0.0, rep.alpha_n, integrand);
    };
    int nodes = quadrature_n;
    double prev = integrate(nodes);
    for (;;) {
        const double next = integrate(2 * nodes);
        nodes *= 2;
        const bool settled = std::abs(next - prev) <= 1e-12;
        prev = next;
        if (settled || nodes >= 4096) break;
    }
    rep.quadrature_nodes = nodes;
    rep.form_value = prev;
    rep.violated = rep.form_value <= rep.bound + 1e-8 && rep.form_value < 0.0;
    return rep;
}

std::vector<CounterexampleReport> verify_counterexample(const std::vector<double>& omegas, int quadrature_n) {
    std::vector<CounterexampleReport> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back(verify_counterexample(w, quadrature_n));
    return out;
}

double counterexample_discrete_growth(double omega, int cells, double dt, int steps) {
    if (cells < 2 || cells % 2 != 0) throw std::invalid_argument("cell count must be even so 0 is a vertex");
    auto mesh = std::make_shared<const Mesh>(build_interval_mesh(-1.0, 1.0, cells));
    const auto sys = make_evolution_system(mesh, sgn_drift_coefficients(0.0), BoundaryModel::Wentzell, true);
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.t_end = dt * steps;
    cfg.model = BoundaryModel::Wentzell;
    cfg.lumped = true;
    Eigen::VectorXd u0(static_cast<Eigen::Index>(mesh->num_vertices()));
    for (std::size_t i = 0; i < mesh->num_vertices(); ++i) {
        const double x = mesh->vertices()[i].x();
        u0[static_cast<Eigen::Index>(i)] = 1.0 - x * x;
    }
    return linfty_growth(sys, cfg, omega, u0);
}

}  // namespace robinlab
