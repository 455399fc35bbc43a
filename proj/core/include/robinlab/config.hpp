#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "robinlab/assembly.hpp"
#include "robinlab/coeff.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/parabolic.hpp"

namespace robinlab {

/// Problem description read from a flat `key = value` file with `[section]`
/// headers. Unknown sections or keys, duplicates and malformed values are
/// rejected with ConfigError. `to_string` writes every key in a fixed order,
/// so parse(to_string(c)) == c and the text hash identifies the config.
struct ProblemConfig {
    // [domain]
    std::string domain = "unit_square";  ///< interval | unit_square | l_shape | polygon
    double a = 0.0;                      ///< interval endpoints
    double b = 1.0;
    std::vector<Point> polygon;          ///< vertex loop for domain = polygon
    double h = 0.0625;                   ///< target cell size
    std::string mesher = "structured";   ///< structured (unit square / interval) | delaunay

    // [coefficients]
    std::string family = "constant";  ///< constant | checkerboard | sgn_drift | custom_table | linear_drift
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
    double b1 = 0.0, b2 = 0.0, c1 = 0.0, c2 = 0.0;
    double d = 0.0;
    double beta = 0.0;
    double contrast = 100.0;
    int tiles = 4;
    double gain = 0.3;
    std::string table;  ///< value table path for custom_table

    // [boundary]
    BoundaryModel model = BoundaryModel::Robin;

    // [rhs]
    std::string f0 = "zero";  ///< zero | constant | cos | sign_split
    double f0_value = 1.0;
    double f1 = 0.0, f2 = 0.0;  ///< constant f_j
    double g = 0.0;             ///< constant boundary datum

    // [shift]
    std::string omega_policy = "fixed";  ///< fixed | auto
    double omega = 1.0;
    double eta = 0.5;

    // [evolution]
    Scheme scheme = Scheme::ImplicitEuler;
    double dt = 1e-3;
    double t_end = 1e-1;
    bool lumped = true;

    static ProblemConfig parse(std::istream& in);
    static ProblemConfig parse_string(const std::string& text);
    static ProblemConfig load(const std::string& path);

    std::string to_string() const;
    /// FNV-1a 64 of to_string().
    std::uint64_t hash() const;
    /// Checks cross-field consistency (positive h, family parameters, ...); throws ConfigError.
    void validate() const;

    bool operator==(const ProblemConfig&) const = default;
};

std::uint64_t fnv1a64(const std::string& text);

int problem_dim(const ProblemConfig& cfg);
Mesh build_problem_mesh(const ProblemConfig& cfg);
CoefficientField build_problem_field(const ProblemConfig& cfg);
RhsData build_problem_rhs(const ProblemConfig& cfg);
EvolutionConfig build_evolution_config(const ProblemConfig& cfg);

}  // namespace robinlab
