#include "qbm/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace qbm {

namespace {

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_finite(const std::vector<double>& vals, const char* what) {
    for (double v : vals)
        if (!std::isfinite(v)) throw InvalidParameterError(std::string(what) + " contains non-finite values");
}

} // namespace

Grid1D make_grid1d(double min, double max, int n) {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
        throw InvalidGridError("grid bounds must be finite with min < max");
    if (n < 3) throw InvalidGridError("grid needs at least 3 nodes");
    return {min, max, n};
}

Grid2D make_grid2d(const Grid1D& x, const Grid1D& y) {
    make_grid1d(x.min, x.max, x.n);
    make_grid1d(y.min, y.max, y.n);
    return {x, y};
}

Field2D make_field2d(const Grid2D& grid, double t) {
    Field2D f;
    f.grid = make_grid2d(grid.x, grid.y);
    f.t = t;
    f.values.assign(size_t(grid.x.n) * grid.y.n, 0.0);
    return f;
}

Field1D make_field1d(const Grid1D& grid, double t) {
    Field1D f;
    f.grid = make_grid1d(grid.min, grid.max, grid.n);
    f.t = t;
    f.values.assign(size_t(grid.n), {0.0, 0.0});
    return f;
}

Field2D gaussian2d(const Grid2D& grid, const GaussianSpec& g, double t) {
    if (!(g.sx > 0.0) || !(g.sy > 0.0))
        throw InvalidParameterError("gaussian widths must be > 0");
    if (!(std::abs(g.rho) < 1.0))
        throw InvalidParameterError("gaussian correlation must satisfy |rho| < 1");
    if (!std::isfinite(g.amp) || !std::isfinite(g.x0) || !std::isfinite(g.y0))
        throw InvalidParameterError("gaussian parameters must be finite");

    Field2D f = make_field2d(grid, t);
    const double one_minus = 1.0 - g.rho * g.rho;
    for (int i = 0; i < grid.x.n; ++i) {
        const double u = (grid.x.coord(i) - g.x0) / g.sx;
        for (int j = 0; j < grid.y.n; ++j) {
            const double v = (grid.y.coord(j) - g.y0) / g.sy;
            const double Q = (u * u - 2.0 * g.rho * u * v + v * v) / one_minus;
            f.at(i, j) = g.amp * std::exp(-0.5 * Q);
        }
    }
    return f;
}

double integrate2d(const Field2D& f) {
    const int nx = f.grid.x.n, ny = f.grid.y.n;
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        double row = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            row += wy * f.at(i, j);
        }
        acc += wx * row;
    }
    return acc * f.grid.x.h() * f.grid.y.h();
}

CubicAxis cubic_axis(const Grid1D& g, double q, const char* axis) {
    const double h = g.h();
    const double span = g.max - g.min;
    if (q < g.min - 1e-12 * span || q > g.max + 1e-12 * span)
        throw DomainError(std::string("sample query outside grid along ") + axis);
    q = std::clamp(q, g.min, g.max);

    double pos = (q - g.min) / h;
    int cell = std::clamp(int(std::floor(pos)), 0, g.n - 2);
    int start = std::clamp(cell - 1, 0, g.n - 4);
    double u = pos - double(start);

    // Snap to an exact node so stored values are reproduced bit-exactly.
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-13) u = nearest;

    CubicAxis a;
    a.start = start;
    // Lagrange basis on nodes {0,1,2,3} evaluated at u.
    a.w[0] = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    a.w[1] = u * (u - 2.0) * (u - 3.0) / 2.0;
    a.w[2] = -u * (u - 1.0) * (u - 3.0) / 2.0;
    a.w[3] = u * (u - 1.0) * (u - 2.0) / 6.0;
    if (u == nearest) {
        // Exact basis at integer offsets avoids rounding residue.
        const int k = int(nearest);
        for (int i = 0; i < 4; ++i) a.w[i] = (i == k) ? 1.0 : 0.0;
    }
    return a;
}

double sample2d(const Field2D& f, double x, double y) {
    if (f.grid.x.n < 4 || f.grid.y.n < 4)
        throw InvalidGridError("cubic sampling needs >= 4 nodes per axis");
    const CubicAxis ax = cubic_axis(f.grid.x, x, "x");
    const CubicAxis ay = cubic_axis(f.grid.y, y, "y");
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j)
            row += ay.w[j] * f.at(ax.start + i, ay.start + j);
        acc += ax.w[i] * row;
    }
    return acc;
}

double sample1d(const std::vector<double>& values, const Grid1D& g, double x) {
    if (g.n < 4) throw InvalidGridError("cubic sampling needs >= 4 nodes");
    const CubicAxis a = cubic_axis(g, x, "w");
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += a.w[i] * values[size_t(a.start) + i];
    return acc;
}

std::complex<double> sample1d(const Field1D& f, double x) {
    if (f.grid.n < 4) throw InvalidGridError("cubic sampling needs >= 4 nodes");
    const CubicAxis a = cubic_axis(f.grid, x, "w");
    std::complex<double> acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += a.w[i] * f.values[size_t(a.start) + i];
    return acc;
}

void write_field2d_csv(const Field2D& f, const std::string& path) {
    check_finite(f.values, "field");
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "# t=" << fmt17(f.t) << "\n";
    out << "x,y,value\n";
    for (int i = 0; i < f.grid.x.n; ++i) {
        const std::string xs = fmt17(f.grid.x.coord(i));
        for (int j = 0; j < f.grid.y.n; ++j)
            out << xs << ',' << fmt17(f.grid.y.coord(j)) << ','
                << fmt17(f.at(i, j)) << "\n";
    }
    if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

double parse_time_header(const std::string& line, const std::string& path) {
    const char* tag = "# t=";
    if (line.rfind(tag, 0) != 0)
        throw ParseError("'" + path + "': missing '# t=' header", 1);
    char* end = nullptr;
    const double t = std::strtod(line.c_str() + std::strlen(tag), &end);
    if (end == line.c_str() + std::strlen(tag))
        throw ParseError("'" + path + "': cannot parse header time", 1);
    return t;
}

std::vector<double> split_numeric(const std::string& line, size_t want,
                                  const std::string& path, long line_no) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= line.size()) {
        size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        const std::string cell = line.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
            throw ParseError("'" + path + "': non-numeric cell '" + cell + "'",
                             line_no);
        out.push_back(v);
        pos = comma + 1;
        if (comma == line.size()) break;
    }
    if (out.size() != want)
        throw ParseError("'" + path + "': expected " + std::to_string(want) +
                             " columns, got " + std::to_string(out.size()),
                         line_no);
    return out;
}

void check_uniform(const std::vector<double>& coords, const std::string& path,
                   const char* axis) {
    if (coords.size() < 3)
        throw ParseError("'" + path + "': grid along " + axis +
                         " has fewer than 3 nodes");
    const double h = coords[1] - coords[0];
    if (!(h > 0.0))
        throw ParseError("'" + path + "': grid along " + axis +
                         " is not increasing");
    for (size_t i = 1; i < coords.size(); ++i) {
        const double d = coords[i] - coords[i - 1];
        if (std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw ParseError("'" + path + "': grid along " + axis +
                             " is not uniform");
    }
}

} // namespace

Field2D read_field2d_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
    const double t = parse_time_header(line, path);
    long line_no = 1;
    if (!std::getline(in, line) || line != "x,y,value")
        throw ParseError("'" + path + "': missing 'x,y,value' column header", 2);
    ++line_no;

    std::vector<double> xs, ys, vals;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto row = split_numeric(line, 3, path, line_no);
        xs.push_back(row[0]);
        ys.push_back(row[1]);
        vals.push_back(row[2]);
    }
    if (vals.empty()) throw ParseError("'" + path + "' has no data rows");

    // x-major layout: y cycles fastest; count the first block to get ny.
    size_t ny = 1;
    while (ny < xs.size() && xs[ny] == xs[0]) ++ny;
    if (ny < 2 || vals.size() % ny != 0)
        throw ParseError("'" + path + "': rows do not form an x-major grid");
    const size_t nx = vals.size() / ny;

    std::vector<double> xcoords, ycoords(ys.begin(), ys.begin() + long(ny));
    for (size_t i = 0; i < nx; ++i) {
        xcoords.push_back(xs[i * ny]);
        for (size_t j = 0; j < ny; ++j) {
            if (xs[i * ny + j] != xcoords[i] || ys[i * ny + j] != ycoords[j])
                throw ParseError("'" + path + "': rows are not in x-major order",
                                 long(3 + i * ny + j));
        }
    }
    check_uniform(xcoords, path, "x");
    check_uniform(ycoords, path, "y");

    Field2D f;
    f.grid = make_grid2d({xcoords.front(), xcoords.back(), int(nx)},
                         {ycoords.front(), ycoords.back(), int(ny)});
    f.t = t;
    f.values = std::move(vals);
    return f;
}

void write_field1d_csv(const Field1D& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "# t=" << fmt17(f.t) << "\n";
    out << "w,re,im\n";
    for (int i = 0; i < f.grid.n; ++i)
        out << fmt17(f.grid.coord(i)) << ',' << fmt17(f.values[i].real()) << ','
            << fmt17(f.values[i].imag()) << "\n";
    if (!out) throw Error("write to '" + path + "' failed");
}

Field1D read_field1d_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
    const double t = parse_time_header(line, path);
    if (!std::getline(in, line) || line != "w,re,im")
        throw ParseError("'" + path + "': missing 'w,re,im' column header", 2);
    long line_no = 2;

    std::vector<double> ws;
    std::vector<std::complex<double>> vals;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto row = split_numeric(line, 3, path, line_no);
        ws.push_back(row[0]);
        vals.emplace_back(row[1], row[2]);
    }
    if (vals.empty()) throw ParseError("'" + path + "' has no data rows");
    check_uniform(ws, path, "w");

    Field1D f;
    f.grid = make_grid1d(ws.front(), ws.back(), int(ws.size()));
    f.t = t;
    f.values = std::move(vals);
    return f;
}

double boundary_max_abs(const Field2D& f) {
    const int nx = f.grid.x.n, ny = f.grid.y.n;
    double m = 0.0;
    for (int i = 0; i < nx; ++i) {
        m = std::max(m, std::abs(f.at(i, 0)));
        m = std::max(m, std::abs(f.at(i, ny - 1)));
    }
    for (int j = 0; j < ny; ++j) {
        m = std::max(m, std::abs(f.at(0, j)));
        m = std::max(m, std::abs(f.at(nx - 1, j)));
    }
    return m;
}

} // namespace qbm
