#pragma once

// Uniform grids and the field containers the solvers operate on, plus the
// quadrature/interpolation/file primitives every other module leans on.

#include <complex>
#include <string>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

/// Uniform 1-D grid with n >= 3 nodes on [min, max].
struct Grid1D {
    double min = 0.0;
    double max = 1.0;
    int n = 3;

    double h() const { return (max - min) / double(n - 1); }
    double coord(int i) const { return min + double(i) * h(); }
    bool operator==(const Grid1D&) const = default;
};

/// Validated constructor.
Grid1D make_grid1d(double min, double max, int n);

/// Tensor grid: x is the momentum-like axis, y the position-like axis.
struct Grid2D {
    Grid1D x, y;
    bool operator==(const Grid2D&) const = default;
};

Grid2D make_grid2d(const Grid1D& x, const Grid1D& y);

/// Real scalar field sampled on a Grid2D at one instant.  Storage is
/// x-major: value(i, j) = values[i * y.n + j].
struct Field2D {
    Grid2D grid;
    double t = 0.0;
    std::vector<double> values;

    double& at(int i, int j) { return values[size_t(i) * grid.y.n + j]; }
    double at(int i, int j) const { return values[size_t(i) * grid.y.n + j]; }
};

Field2D make_field2d(const Grid2D& grid, double t);

/// Complex scalar field on a Grid1D (the reduced/Schroedinger side).
struct Field1D {
    Grid1D grid;
    double t = 0.0;
    std::vector<std::complex<double>> values;
};

Field1D make_field1d(const Grid1D& grid, double t);

/// Correlated Gaussian amp * exp(-Q/2) with
/// Q = [((x-x0)/sx)^2 - 2 rho ((x-x0)/sx)((y-y0)/sy) + ((y-y0)/sy)^2]/(1-rho^2).
struct GaussianSpec {
    double x0 = 0.0, y0 = 0.0;
    double sx = 1.0, sy = 1.0;
    double rho = 0.0;
    double amp = 1.0;
};

Field2D gaussian2d(const Grid2D& grid, const GaussianSpec& g, double t = 0.0);

/// Trapezoidal integral over the full grid.
double integrate2d(const Field2D& f);

/// 4-point Lagrange interpolation setup along one uniform axis: the window
/// start index and the four basis weights.  Exact (weights snap to {0,1})
/// when the query sits on a node.  Queries outside the grid throw
/// DomainError naming `axis`.
struct CubicAxis {
    int start;
    double w[4];
};
CubicAxis cubic_axis(const Grid1D& g, double q, const char* axis);

/// Tensor-product cubic (4-point Lagrange) interpolation.  Exact at nodes,
/// O(h^4) for smooth data.  Queries outside the grid throw DomainError.
double sample2d(const Field2D& f, double x, double y);

/// Same interpolation rule in 1-D, for real and complex data.
double sample1d(const std::vector<double>& values, const Grid1D& g, double x);
std::complex<double> sample1d(const Field1D& f, double x);

/// CSV snapshot I/O.  2-D files: "# t=<value>" header then "x,y,value" rows
/// (x-major).  1-D files: "w,re,im" rows.  17 significant digits, so a
/// write/read round trip is bit-exact.
void write_field2d_csv(const Field2D& f, const std::string& path);
Field2D read_field2d_csv(const std::string& path);
void write_field1d_csv(const Field1D& f, const std::string& path);
Field1D read_field1d_csv(const std::string& path);

/// Max |value| on the boundary ring / endpoints (solver sanity reporting).
double boundary_max_abs(const Field2D& f);

} // namespace qbm
