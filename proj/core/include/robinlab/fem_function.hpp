#pragma once

#include <memory>

#include <Eigen/Core>

#include "robinlab/mesh.hpp"

namespace robinlab {

/// P1 finite element function: one nodal value per mesh vertex.
struct FemFunction {
    std::shared_ptr<const Mesh> mesh;
    Eigen::VectorXd values;

    FemFunction() = default;
    FemFunction(std::shared_ptr<const Mesh> m, Eigen::VectorXd v) : mesh(std::move(m)), values(std::move(v)) {
        if (!mesh || static_cast<std::size_t>(values.size()) != mesh->num_vertices()) {
            throw std::invalid_argument("FemFunction: value count does not match the mesh");
        }
    }

    /// Nodal interpolant of f.
    template <class F>
    static FemFunction interpolate(std::shared_ptr<const Mesh> m, F&& f) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(m->num_vertices()));
        for (std::size_t i = 0; i < m->num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = f(m->vertices()[i]);
        return FemFunction(std::move(m), std::move(v));
    }
};

}  // namespace robinlab
