#pragma once

#include <stdexcept>
#include <vector>

namespace robinlab {

/// Ouhabaz L-infinity test for the one-dimensional field a = 1, b = c = sgn on
/// (-1, 1) with the peaked functions u_n(x) = 2 (1 - x^2)^n.
struct CounterexampleReport {
    double omega = 0.0;
    long n = 0;
    double alpha_n = 0.0;     ///< (1 - 2^{-1/n})^{1/2}, where u_n = 1
    double form_value = 0.0;  ///< int_{-alpha_n}^{alpha_n} (sgn u_n' + omega u_n) dx
    double bound = 0.0;       ///< -2 + 4 omega alpha_n
    int quadrature_nodes = 0; ///< final Gauss-Legendre node count per half interval
    bool violated = false;    ///< form_value <= bound + 1e-8 and form_value < 0
};

inline constexpr long kCounterexampleMaxN = 1000000;

double counterexample_alpha(long n);
double counterexample_u(long n, double x);
double counterexample_du(long n, double x);

/// Smallest n with 4 omega alpha_n < 2; throws std::domain_error above kCounterexampleMaxN.
long counterexample_index(double omega);

/// Evaluates the form on [-alpha_n, 0] and [0, alpha_n] separately with
/// Gauss-Legendre rules starting at `quadrature_n` nodes and doubling until
/// successive values agree to 1e-12.
CounterexampleReport verify_counterexample(double omega, int quadrature_n = 32);
std::vector<CounterexampleReport> verify_counterexample(const std::vector<double>& omegas, int quadrature_n = 32);

/// Discrete shadow: lumped-mass Wentzell evolution of the sgn-drift field on a
/// uniform mesh of (-1, 1) from u0 = 1 - x^2. Returns max_t e^{-omega t}
/// ||u(t)||_inf / ||u0||_inf, which exceeds 1 for fine meshes.
double counterexample_discrete_growth(double omega, int cells = 2000, double dt = 1e-5, int steps = 20);

}  // namespace robinlab
