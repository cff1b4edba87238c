#include "splitadj/mesh.hpp"

#include <cmath>

#include "splitadj/error.hpp"

namespace splitadj {

StructuredTriMesh::StructuredTriMesh(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny)
    : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny) {
    if (nx == 0 || ny == 0 || !(x1 > x0) || !(y1 > y0)) {
        throw InvalidArgument("mesh needs positive extent and cell counts");
    }
    vertices_.reserve((nx + 1) * (ny + 1));
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            vertices_.push_back({x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx),
                                 y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny)});
        }
    }
    triangles_.reserve(2 * nx * ny);
    const auto id = [nx](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            triangles_.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles_.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
}

double StructuredTriMesh::area(std::size_t t) const {
    const auto& tri = triangles_[t];
    const auto& a = vertices_[tri[0]];
    const auto& b = vertices_[tri[1]];
    const auto& c = vertices_[tri[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

PointSet StructuredTriMesh::points(std::size_t chunk_size) const {
    PointSet ps;
    ps.dim = 2;
    ps.coords = vertices_;
    ps.chunk_size = chunk_size;
    return ps;
}

namespace {

using Triplet = Eigen::Triplet<double>;

double checked_area(const StructuredTriMesh& mesh, std::size_t t) {
    const double a = mesh.area(t);
    if (!(a > 0.0)) {
        throw InvalidArgument("degenerate triangle " + std::to_string(t));
    }
    return a;
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& trips) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

SparseMatrix stiffness(const StructuredTriMesh& mesh, const std::function<Conductivity(std::size_t)>& g,
                       bool check_spd) {
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double area = checked_area(mesh, t);
        const Conductivity k = g(t);
        if (check_spd && !(k.xx > 0.0 && k.xx * k.yy - k.xy * k.xy > 0.0)) {
            throw InvalidArgument("conductivity on triangle " + std::to_string(t) + " is not positive definite");
        }
        const auto& tri = mesh.triangle(t);
        const auto& p1 = mesh.vertex(tri[0]);
        const auto& p2 = mesh.vertex(tri[1]);
        const auto& p3 = mesh.vertex(tri[2]);
        const double inv = 1.0 / (2.0 * area);
        const double gx[3] = {(p2[1] - p3[1]) * inv, (p3[1] - p1[1]) * inv, (p1[1] - p2[1]) * inv};
        const double gy[3] = {(p3[0] - p2[0]) * inv, (p1[0] - p3[0]) * inv, (p2[0] - p1[0]) * inv};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const double v = area * (gx[a] * (k.xx * gx[b] + k.xy * gy[b]) + gy[a] * (k.xy * gx[b] + k.yy * gy[b]));
                trips.emplace_back(tri[a], tri[b], v);
            }
        }
    }
    return from_triplets(mesh.num_vertices(), trips);
}

} // namespace

SparseMatrix assemble_mass(const StructuredTriMesh& mesh, bool lumped) {
    std::vector<Triplet> trips;
    trips.reserve(9 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double area = checked_area(mesh, t);
        const auto& tri = mesh.triangle(t);
        for (int a = 0; a < 3; ++a) {
            if (lumped) {
                trips.emplace_back(tri[a], tri[a], area / 3.0);
                continue;
            }
            for (int b = 0; b < 3; ++b) {
                trips.emplace_back(tri[a], tri[b], a == b ? area / 6.0 : area / 12.0);
            }
        }
    }
    return from_triplets(mesh.num_vertices(), trips);
}

std::vector<double> lumped_mass(const StructuredTriMesh& mesh) {
    std::vector<double> d(mesh.num_vertices(), 0.0);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double area = checked_area(mesh, t);
        for (std::uint32_t v : mesh.triangle(t)) {
            d[v] += area / 3.0;
        }
    }
    return d;
}

SparseMatrix assemble_stiffness(const StructuredTriMesh& mesh, const std::function<Conductivity(std::size_t)>& g) {
    return stiffness(mesh, g, true);
}

SparseMatrix assemble_stiffness(const StructuredTriMesh& mesh, const Conductivity& g) {
    return stiffness(mesh, [&](std::size_t) { return g; }, true);
}

SparseMatrix assemble_axis_stiffness(const StructuredTriMesh& mesh, int axis) {
    const Conductivity g = axis == 0 ? Conductivity{1.0, 0.0, 0.0} : Conductivity{0.0, 0.0, 1.0};
    return stiffness(mesh, [&](std::size_t) { return g; }, false);
}

} // namespace splitadj
