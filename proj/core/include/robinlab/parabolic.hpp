#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "robinlab/assembly.hpp"
#include "robinlab/coeff.hpp"
#include "robinlab/fem_function.hpp"

namespace robinlab {

enum class Scheme { ImplicitEuler, CrankNicolson };
enum class BoundaryModel { Robin, Wentzell };

struct EvolutionConfig {
    Scheme scheme = Scheme::ImplicitEuler;
    double dt = 1e-2;
    double t_end = 1e-1;
    BoundaryModel model = BoundaryModel::Robin;
    double omega = 0.0;  ///< shift used by the e^{-omega t} rescaling in contraction checks
    bool lumped = false;  ///< row-sum lumped evolution mass

    double theta() const { return scheme == Scheme::ImplicitEuler ? 1.0 : 0.5; }
    /// Number of steps to reach t_end (t_end / dt rounded to the nearest integer).
    int steps() const;
    /// Throws std::invalid_argument unless dt > 0 and t_end >= dt.
    void validate() const;
};

/// Stiffness and evolution mass of u' = -L u: mass M (Robin) or M + M_boundary
/// (Wentzell), optionally lumped.
struct EvolutionSystem {
    std::shared_ptr<const Mesh> mesh;
    CoefficientField field;
    AssembledForm form;
    SparseMatrix mass;
    BoundaryModel model = BoundaryModel::Robin;
    bool lumped = false;

    /// Nodal weights of the discrete L^p norms: row sums of the evolution mass.
    Eigen::VectorXd norm_weights() const;
};

EvolutionSystem make_evolution_system(std::shared_ptr<const Mesh> mesh, const CoefficientField& field,
                                      BoundaryModel model, bool lumped, const AssemblyOptions& options = {});

/// Theta scheme (M + theta dt A) u+ = (M - (1 - theta) dt A) u with a single
/// factorization of the step matrix.
class Stepper {
public:
    Stepper(const SparseMatrix& stiffness, const SparseMatrix& mass, double dt, double theta);

    Eigen::VectorXd step(const Eigen::VectorXd& u) const;
    double dt() const noexcept { return dt_; }

private:
    SparseMatrix rhs_matrix_;
    Eigen::SparseLU<SparseMatrix> lu_;
    double dt_;
};

/// One step with stiffness form.A (throws SingularSystem if the step matrix is singular).
Eigen::VectorXd step(const AssembledForm& form, const SparseMatrix& mass, const Eigen::VectorXd& u,
                     const EvolutionConfig& cfg);

struct Trajectory {
    std::vector<double> times;           ///< dt, 2 dt, ..., t_end
    std::vector<Eigen::VectorXd> states;
};

/// Evolves u0 with the system stiffness plus `generator_shift` times the mass.
Trajectory evolve(const EvolutionSystem& system, const EvolutionConfig& cfg, const Eigen::VectorXd& u0,
                  double generator_shift = 0.0);
Trajectory evolve(const EvolutionSystem& system, const EvolutionConfig& cfg, const FemFunction& u0,
                  double generator_shift = 0.0);

/// Certified step bound for positivity of the lumped theta scheme: A must have
/// nonpositive off-diagonals; then (M_L + theta dt A) is a strictly row-dominant
/// Z-matrix for dt < dt_max, and for theta < 1 the explicit part stays
/// nonnegative for dt <= dt_max.
struct PositivityCertificate {
    bool z_matrix = false;
    double dt_max = 0.0;  ///< +infinity when every dt works
    double worst_offdiagonal = 0.0;
};

PositivityCertificate certify_positivity_dt(const SparseMatrix& stiffness, const SparseMatrix& lumped_mass,
                                            double theta);

/// omega = max{||d||_inf + k, ||beta||_inf + k} with k = drift_bound().
/// Throws std::invalid_argument when the field has no Lipschitz drift bound.
double submarkovian_shift(const CoefficientField& field);

struct ContractionReport {
    double max_growth = 0.0;            ///< max over trials and steps of e^{-omega t} ||u(t)||_inf / ||u0||_inf
    std::vector<double> trial_growth;
};

/// Random u0 with ||u0||_inf = 1 (uniform in [-1, 1], rescaled).
ContractionReport check_linfty_contraction(const EvolutionSystem& system, const EvolutionConfig& cfg, double omega,
                                           int trials, std::uint64_t seed = 42);
/// Same measure for a single given initial state.
double linfty_growth(const EvolutionSystem& system, const EvolutionConfig& cfg, double omega,
                     const Eigen::VectorXd& u0);

struct LpFit {
    double p = 2.0;
    double omega_p = 0.0;     ///< smallest omega with ||u(t)||_p <= e^{omega t} (1 + tol) ||u0||_p
    double envelope = 0.0;    ///< delta0_hat * max{p, p'}
    bool within_envelope = false;
};

struct LpContractionReport {
    std::vector<LpFit> fits;
    double omega_2 = 0.0;
    double delta0_hat = 0.0;
    double inflation = 2.0;
    double tolerance = 1e-9;
};

/// Fits omega_p for every p in p_list (p = 2 is always included for delta0_hat).
LpContractionReport check_lp_contraction(const EvolutionSystem& system, const EvolutionConfig& cfg,
                                         const std::vector<double>& p_list, int trials, std::uint64_t seed = 42,
                                         double inflation = 2.0);

/// Discrete form on the truncation pair v = (1 ^ |u|) sgn u, w = (|u| - 1)^+ sgn u:
/// w^T (A + omega mass) v.
double ouhabaz_form_value(const SparseMatrix& stiffness, const SparseMatrix& mass, double omega,
                          const Eigen::VectorXd& u);

struct KernelProbe {
    Index source = 0;
    std::vector<double> times;            ///< actual times (whole steps)
    std::vector<FemFunction> columns;     ///< discrete k(t, ., y)
    std::vector<double> holder_modulus;   ///< C^{0,gamma} vertex-pair seminorm per time
    std::vector<double> mass;             ///< 1^T M k(t, ., y)
    std::vector<double> min_value;
    bool modulus_bounded = false;         ///< modulus(t2) <= 10 modulus(t1) for all t1 < t2
};

/// Evolves the mass-normalized delta e_y / m_y, where m_y is the lumped mass
/// of vertex y. Requested times are rounded to whole steps (at least one).
KernelProbe probe_kernel(const EvolutionSystem& system, const EvolutionConfig& cfg, Index y,
                         const std::vector<double>& times, double gamma);

}  // namespace robinlab
