#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "splitadj/pointcloud.hpp"

namespace splitadj {

/// Uniform triangulation of a rectangle. Vertex (i, j) has index j * (nx + 1) + i;
/// each cell splits along its lower-left to upper-right diagonal.
class StructuredTriMesh {
public:
    StructuredTriMesh(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny);
    static StructuredTriMesh unit_square(std::size_t n) { return {0.0, 1.0, 0.0, 1.0, n, n}; }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }

    const std::array<double, 2>& vertex(std::size_t v) const { return vertices_[v]; }
    const std::array<std::uint32_t, 3>& triangle(std::size_t t) const { return triangles_[t]; }
    /// Signed area (positive for every triangle of this mesh).
    double area(std::size_t t) const;

    std::array<double, 4> bounds() const { return {x0_, x1_, y0_, y1_}; }

    /// The vertices as a point set.
    PointSet points(std::size_t chunk_size = kDefaultChunkSize) const;

private:
    double x0_, x1_, y0_, y1_;
    std::size_t nx_, ny_;
    std::vector<std::array<double, 2>> vertices_;
    std::vector<std::array<std::uint32_t, 3>> triangles_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric 2x2 conductivity tensor.
struct Conductivity {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;
};

/// P1 mass matrix, consistent or row-sum lumped.
SparseMatrix assemble_mass(const StructuredTriMesh& mesh, bool lumped = false);

/// Diagonal of the lumped mass matrix.
std::vector<double> lumped_mass(const StructuredTriMesh& mesh);

/// P1 stiffness matrix of -div(G grad u); G per triangle. Throws InvalidArgument
/// for a tensor that is not symmetric positive definite.
SparseMatrix assemble_stiffness(const StructuredTriMesh& mesh, const std::function<Conductivity(std::size_t)>& g);
SparseMatrix assemble_stiffness(const StructuredTriMesh& mesh, const Conductivity& g);

/// Stiffness for one axis only (diag(1,0) or diag(0,1)); may be semidefinite.
SparseMatrix assemble_axis_stiffness(const StructuredTriMesh& mesh, int axis);

} // namespace splitadj
