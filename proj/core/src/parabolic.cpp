#include "robinlab/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "robinlab/elliptic.hpp"

namespace robinlab {

int EvolutionConfig::steps() const {
    validate();
    return std::max(1, static_cast<int>(std::lround(t_end / dt)));
}

void EvolutionConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
    if (!(t_end >= dt) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be at least dt");
}

Eigen::VectorXd EvolutionSystem::norm_weights() const { return mass * Eigen::VectorXd::Ones(mass.cols()); }

EvolutionSystem make_evolution_system(std::shared_ptr<const Mesh> mesh, const CoefficientField& field,
                                      BoundaryModel model, bool lumped_mass, const AssemblyOptions& options) {
    EvolutionSystem sys;
    sys.mesh = mesh;
    sys.field = field;
    sys.model = model;
    sys.lumped = lumped_mass;
    if (model == BoundaryModel::Wentzell) {
        auto w = assemble_wentzell_system(std::move(mesh), field, options);
        sys.form = std::move(w.form);
        sys.mass = std::move(w.mass);
    } else {
        sys.form = assemble_robin_form(std::move(mesh), field, options);
        sys.mass = sys.form.mass;
    }
    if (lumped_mass) sys.mass = lumped(sys.mass);
    return sys;
}

Stepper::Stepper(const SparseMatrix& stiffness, const SparseMatrix& mass, double dt, double theta) : dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    SparseMatrix lhs = mass + theta * dt * stiffness;
    rhs_matrix_ = mass - (1.0 - theta) * dt * stiffness;
    lhs.makeCompressed();
    lu_.analyzePattern(lhs);
    lu_.factorize(lhs);
    if (lu_.info() != Eigen::Success) throw SingularSystem("step matrix is singular");
}

Eigen::VectorXd Stepper::step(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out = lu_.solve(rhs_matrix_ * u);
    if (!out.allFinite()) throw SingularSystem("step produced non-finite values");
    return out;
}

Eigen::VectorXd step(const AssembledForm& form, const SparseMatrix& mass, const Eigen::VectorXd& u,
                     const EvolutionConfig& cfg) {
    cfg.validate();
    return Stepper(form.A, mass, cfg.dt, cfg.theta()).step(u);
}

Trajectory evolve(const EvolutionSystem& system, const EvolutionConfig& cfg, const Eigen::VectorXd& u0,
                  double generator_shift) {
    const int n = cfg.steps();
    if (u0.size() != system.mass.rows()) throw std::invalid_argument("initial state length does not match the system");
    const SparseMatrix stiffness = system.form.A + generator_shift * system.mass;
    const Stepper stepper(stiffness, system.mass, cfg.dt, cfg.theta());
    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n));
    traj.states.reserve(static_cast<std::size_t>(n));
    Eigen::VectorXd u = u0;
    for (int k = 1; k <= n; ++k) {
        u = stepper.step(u);
        traj.times.push_back(k * cfg.dt);
        traj.states.push_back(u);
    }
    return traj;
}

Trajectory evolve(const EvolutionSystem& system, const EvolutionConfig& cfg, const FemFunction& u0,
                  double generator_shift) {
    return evolve(system, cfg, u0.values, generator_shift);
}

PositivityCertificate certify_positivity_dt(const SparseMatrix& stiffness, const SparseMatrix& lumped_mass,
                                            double theta) {
    PositivityCertificate cert;
    const Eigen::Index n = stiffness.rows();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
    double scale = 0.0;
    for (Eigen::Index k = 0; k < stiffness.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(stiffness, k); it; ++it) {
            rowsum[it.row()] += it.value();
            scale = std::max(scale, std::abs(it.value()));
            if (it.row() == it.col()) {
                diag[it.row()] += it.value();
            } else {
                cert.worst_offdiagonal = std::max(cert.worst_offdiagonal, it.value());
            }
        }
    }
    const Eigen::VectorXd m = lumped_mass.diagonal();
    cert.z_matrix = cert.worst_offdiagonal <= 1e-14 * scale;
    if (!cert.z_matrix) return cert;
    double dt_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (rowsum[i] < -1e-14 * scale) dt_max = std::min(dt_max, m[i] / (theta * -rowsum[i]));
        if (theta < 1.0 && diag[i] > 0.0) dt_max = std::min(dt_max, m[i] / ((1.0 - theta) * diag[i]));
    }
    cert.dt_max = dt_max;
    return cert;
}

double submarkovian_shift(const CoefficientField& field) {
    const auto k = field.drift_bound();
    if (!k) throw std::invalid_argument("field '" + field.name + "' has no Lipschitz drift bound");
    return std::max(field.sup_bounds.d + *k, field.sup_bounds.beta + *k);
}

double linfty_growth(const EvolutionSystem& system, const EvolutionConfig& cfg, double omega,
                     const Eigen::VectorXd& u0) {
    const double n0 = u0.cwiseAbs().maxCoeff();
    if (!(n0 > 0.0)) throw std::invalid_argument("initial state must be nonzero");
    const auto traj = evolve(system, cfg, u0);
    double growth = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        growth = std::max(growth, std::exp(-omega * traj.times[k]) * traj.states[k].cwiseAbs().maxCoeff() / n0);
    }
    return growth;
}

ContractionReport check_linfty_contraction(const EvolutionSystem& system, const EvolutionConfig& cfg, double omega,
                                           int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = cfg.steps();
    const SparseMatrix& a = system.form.A;
    const Stepper stepper(a, system.mass, cfg.dt, cfg.theta());
    ContractionReport rep;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd u(system.mass.rows());
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = unit(rng);
        u /= u.cwiseAbs().maxCoeff();
        double growth = 0.0;
        for (int k = 1; k <= n; ++k) {
            u = stepper.step(u);
            growth = std::max(growth, std::exp(-omega * k * cfg.dt) * u.cwiseAbs().maxCoeff());
        }
        rep.trial_growth.push_back(growth);
        rep.max_growth = std::max(rep.max_growth, growth);
    }
    return rep;
}

LpContractionReport check_lp_contraction(const EvolutionSystem& system, const EvolutionConfig& cfg,
                                         const std::vector<double>& p_list, int trials, std::uint64_t seed,
                                         double inflation) {
    for (double p : p_list) {
        if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("p must lie in (1, infinity)");
    }
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    LpContractionReport rep;
    rep.inflation = inflation;
    std::vector<double> ps = p_list;
    if (std::find(ps.begin(), ps.end(), 2.0) == ps.end()) ps.insert(ps.begin(), 2.0);

    const Eigen::VectorXd weights = system.norm_weights();
    const int n = cfg.steps();
    const Stepper stepper(system.form.A, system.mass, cfg.dt, cfg.theta());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> omega_p(ps.size(), -std::numeric_limits<double>::infinity());
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd u(system.mass.rows());
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = unit(rng);
        std::vector<double> n0(ps.size());
        for (std::size_t j = 0; j < ps.size(); ++j) n0[j] = weighted_lp_norm(u, weights, ps[j]);
        for (int k = 1; k <= n; ++k) {
            u = stepper.step(u);
            const double time = k * cfg.dt;
            for (std::size_t j = 0; j < ps.size(); ++j) {
                const double ratio = weighted_lp_norm(u, weights, ps[j]) / n0[j];
                const double w = (std::log(ratio) - std::log1p(rep.tolerance)) / time;
                omega_p[j] = std::max(omega_p[j], w);
            }
        }
    }
    for (std::size_t j = 0; j < ps.size(); ++j) {
        if (ps[j] == 2.0) rep.omega_2 = omega_p[j];
    }
    rep.delta0_hat = inflation * std::max(rep.omega_2, 0.0) / 2.0;
    for (std::size_t j = 0; j < ps.size(); ++j) {
        LpFit fit;
        fit.p = ps[j];
        fit.omega_p = omega_p[j];
        const double conj = ps[j] / (ps[j] - 1.0);
        fit.envelope = rep.delta0_hat * std::max(ps[j], conj);
        fit.within_envelope = fit.omega_p <= fit.envelope + rep.tolerance;
        rep.fits.push_back(fit);
    }
    return rep;
}

double ouhabaz_form_value(const SparseMatrix& stiffness, const SparseMatrix& mass, double omega,
                          const Eigen::VectorXd& u) {
    Eigen::VectorXd v(u.size()), w(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        const double sg = (u[i] > 0.0) - (u[i] < 0.0);
        v[i] = std::min(1.0, a) * sg;
        w[i] = std::max(a - 1.0, 0.0) * sg;
    }
    return w.dot(stiffness * v + omega * (mass * v));
}

KernelProbe probe_kernel(const EvolutionSystem& system, const EvolutionConfig& cfg, Index y,
                         const std::vector<double>& times, double gamma) {
    cfg.validate();
    if (times.empty()) throw std::invalid_argument("probe_kernel needs at least one time");
    for (double t : times) {
        if (!(t > 0.0)) throw std::invalid_argument("kernel probe times must be positive");
    }
    if (y < 0 || static_cast<std::size_t>(y) >= system.mesh->num_vertices()) {
        throw std::invalid_argument("kernel probe vertex out of range");
    }
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    const Eigen::VectorXd mw = lumped(system.mass).diagonal();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(system.mass.rows());
    u[y] = 1.0 / mw[y];
    const Stepper stepper(system.form.A, system.mass, cfg.dt, cfg.theta());
    const Eigen::RowVectorXd ones_mass = Eigen::RowVectorXd::Ones(u.size()) * system.mass;

    KernelProbe probe;
    probe.source = y;
    int done = 0;
    for (double t : sorted) {
        const int target = std::max(1, static_cast<int>(std::lround(t / cfg.dt)));
        while (done < target) {
            u = stepper.step(u);
            ++done;
        }
        FemFunction col(system.mesh, u);
        probe.times.push_back(done * cfg.dt);
        probe.holder_modulus.push_back(holder_seminorm(col, gamma));
        probe.mass.push_back(ones_mass * u);
        probe.min_value.push_back(u.minCoeff());
        probe.columns.push_back(std::move(col));
    }
    probe.modulus_bounded = true;
    for (std::size_t i = 0; i < probe.holder_modulus.size(); ++i) {
        for (std::size_t j = i + 1; j < probe.holder_modulus.size(); ++j) {
            if (probe.holder_modulus[j] > 10.0 * probe.holder_modulus[i]) probe.modulus_bounded = false;
        }
    }
    return probe;
}

}  // namespace robinlab
