#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "robinlab/mesh.hpp"

namespace robinlab {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
    const int dim = mesh.dim();
    out << dim << '\n';
    for (const auto& v : mesh.vertices()) {
        out << "v " << fmt17(v.x());
        if (dim == 2) out << ' ' << fmt17(v.y());
        out << '\n';
    }
    for (const auto& c : mesh.cells()) {
        out << "c";
        for (int k = 0; k <= dim; ++k) out << ' ' << c[k];
        out << '\n';
    }
    for (const auto& f : mesh.boundary_facets()) {
        out << "bf";
        for (int k = 0; k < dim; ++k) out << ' ' << f.vertices[k];
        out << ' ' << fmt17(f.normal.x());
        if (dim == 2) out << ' ' << fmt17(f.normal.y());
        out << '\n';
    }
}

Mesh read_mesh(std::istream& in) {
    int dim = 0;
    std::vector<Point> vertices;
    std::vector<Cell> cells;
    struct FacetRecord {
        std::array<Index, 2> v;
        Point normal;
    };
    std::vector<FacetRecord> facets;

    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& what) {
        throw MeshError("mesh file line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (dim == 0) {
            if (!(ls >> dim) || (dim != 1 && dim != 2)) fail("expected dimension 1 or 2");
            continue;
        }
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Point p = Point::Zero();
            if (!(ls >> p.x())) fail("bad vertex");
            if (dim == 2 && !(ls >> p.y())) fail("bad vertex");
            vertices.push_back(p);
        } else if (tag == "c") {
            Cell c{-1, -1, -1};
            for (int k = 0; k <= dim; ++k) {
                if (!(ls >> c[k])) fail("bad cell");
            }
            cells.push_back(c);
        } else if (tag == "bf") {
            FacetRecord f{{-1, -1}, Point::Zero()};
            for (int k = 0; k < dim; ++k) {
                if (!(ls >> f.v[k])) fail("bad boundary facet");
            }
            if (!(ls >> f.normal.x())) fail("bad boundary facet normal");
            if (dim == 2 && !(ls >> f.normal.y())) fail("bad boundary facet normal");
            facets.push_back(f);
        } else {
            fail("unknown record '" + tag + "'");
        }
        std::string rest;
        if (ls >> rest) fail("trailing tokens");
    }
    if (dim == 0) throw MeshError("mesh file is empty");

    Mesh mesh(dim, std::move(vertices), std::move(cells));
    if (!facets.empty()) {
        std::map<std::pair<Index, Index>, Point> derived;
        for (const auto& f : mesh.boundary_facets()) {
            derived[{std::min(f.vertices[0], f.vertices[1]), std::max(f.vertices[0], f.vertices[1])}] = f.normal;
        }
        if (derived.size() != facets.size()) throw MeshError("mesh file boundary facets do not match the cells");
        for (const auto& f : facets) {
            const auto it = derived.find({std::min(f.v[0], f.v[1]), std::max(f.v[0], f.v[1])});
            if (it == derived.end()) throw MeshError("mesh file lists an interior facet as boundary");
            if ((it->second - f.normal).norm() > 1e-12) throw MeshError("mesh file boundary normal is not outward");
        }
    }
    return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot open '" + path + "' for writing");
    write_mesh(out, mesh);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open '" + path + "'");
    return read_mesh(in);
}

}  // namespace robinlab
