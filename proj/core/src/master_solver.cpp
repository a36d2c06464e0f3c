#include "qbm/master_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qbm {

Field2D spatial_rhs(const Field2D& f, const CoefficientSet& cs, double t) {
    if (f.grid.x.n < 5 || f.grid.y.n < 5)
        throw InvalidGridError("stencil evaluation needs a grid of at least 5x5");
    const auto c = cs.eval(t);
    const int nx = f.grid.x.n, ny = f.grid.y.n;
    const double hx = f.grid.x.h(), hy = f.grid.y.h();
    const double inv2hx = 1.0 / (2.0 * hx);
    const double inv2hy = 1.0 / (2.0 * hy);
    const double invhx2 = 1.0 / (hx * hx);
    const double inv4hxhy = 1.0 / (4.0 * hx * hy);
    const double invm = 1.0 / cs.m;

    Field2D out = make_field2d(f.grid, t);
    for (int i = 1; i < nx - 1; ++i) {
        const double x = f.grid.x.coord(i);
        for (int j = 1; j < ny - 1; ++j) {
            const double y = f.grid.y.coord(j);
            const double zc = f.at(i, j);
            const double zxp = f.at(i + 1, j), zxm = f.at(i - 1, j);
            const double zyp = f.at(i, j + 1), zym = f.at(i, j - 1);

            const double Zx = (zxp - zxm) * inv2hx;
            const double Zy = (zyp - zym) * inv2hy;
            const double Zxx = (zxp - 2.0 * zc + zxm) * invhx2;
            const double Zxy = (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) -
                                f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) *
                               inv4hxhy;

            out.at(i, j) = -x * invm * Zy + c.p * y * Zx +
                           c.q * (zc + x * Zx) + c.r * Zxx + c.s * Zxy;
        }
    }
    return out;
}

double admissible_dt(const Grid2D& grid, const CoefficientSet& cs, double t,
                     double cfl_safety) {
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw InvalidParameterError("cfl_safety must lie in (0, 1]");
    const auto c = cs.eval(t);
    const double hx = grid.x.h(), hy = grid.y.h();
    const double xmax = std::max(std::abs(grid.x.min), std::abs(grid.x.max));
    const double ymax = std::max(std::abs(grid.y.min), std::abs(grid.y.max));

    double limit = std::numeric_limits<double>::max();
    const double ax = std::abs(c.p) * ymax + std::abs(c.q) * xmax;
    if (ax > 0.0) limit = std::min(limit, hx / ax);
    const double ay = xmax / cs.m;
    if (ay > 0.0) limit = std::min(limit, hy / ay);
    if (c.r != 0.0) limit = std::min(limit, hx * hx / (2.0 * std::abs(c.r)));
    if (c.s != 0.0) limit = std::min(limit, hx * hy / (2.0 * std::abs(c.s)));
    if (c.q != 0.0) limit = std::min(limit, 1.0 / std::abs(c.q));
    return cfl_safety * limit;
}

namespace {

// out = f + a * g on the raw value arrays (grids known to match).
Field2D axpy(const Field2D& f, double a, const Field2D& g, double t) {
    Field2D out = f;
    out.t = t;
    const size_t n = out.values.size();
    for (size_t k = 0; k < n; ++k) out.values[k] += a * g.values[k];
    return out;
}

} // namespace

Field2D step(const Field2D& f, const CoefficientSet& cs, double dt,
             double cfl_safety) {
    if (dt < 0.0) throw InvalidParameterError("dt must be >= 0");
    if (dt == 0.0) return f;

    const double adm = admissible_dt(f.grid, cs, f.t, cfl_safety);
    if (dt > adm * (1.0 + 1e-12)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "dt = %.12g exceeds the admissible explicit step %.12g",
                      dt, adm);
        throw StepSizeError(buf, adm);
    }

    const double t = f.t;
    const Field2D k1 = spatial_rhs(f, cs, t);
    const Field2D k2 = spatial_rhs(axpy(f, 0.5 * dt, k1, t + 0.5 * dt), cs, t + 0.5 * dt);
    const Field2D k3 = spatial_rhs(axpy(f, 0.5 * dt, k2, t + 0.5 * dt), cs, t + 0.5 * dt);
    const Field2D k4 = spatial_rhs(axpy(f, dt, k3, t + dt), cs, t + dt);

    Field2D out = f;
    out.t = t + dt;
    const size_t n = out.values.size();
    const double w = dt / 6.0;
    for (size_t k = 0; k < n; ++k)
        out.values[k] += w * (k1.values[k] + 2.0 * k2.values[k] +
                              2.0 * k3.values[k] + k4.values[k]);
    return out;
}

Trajectory2D evolve(const Field2D& f0, const CoefficientSet& cs,
                    const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InvalidParameterError("evolve needs dt > 0");
    if (cfg.snapshot_stride < 1)
        throw InvalidParameterError("snapshot_stride must be >= 1");
    const double span = cfg.t_end - f0.t;
    if (span < 0.0)
        throw InvalidParameterError("t_end must not precede the initial time");
    if (span == 0.0) {
        const TimeDomain dom0 = cs.domain();
        if (!dom0.contains(f0.t))
            throw DomainError("evolution window leaves the coefficient domain");
        Trajectory2D only;
        only.cs = cs;
        only.snapshots.push_back(f0);
        return only;
    }

    const long long nsteps = std::llround(span / cfg.dt);
    if (nsteps < 1 || std::abs(double(nsteps) * cfg.dt - span) >
                          1e-9 * std::max(1.0, std::abs(span)))
        throw InvalidParameterError("dt must divide t_end - t0 evenly");

    const TimeDomain dom = cs.domain();
    if (!dom.contains(f0.t) || !dom.contains(cfg.t_end))
        throw DomainError("evolution window leaves the coefficient domain");

    Trajectory2D traj;
    traj.cs = cs;
    traj.snapshots.push_back(f0);

    Field2D cur = f0;
    for (long long k = 1; k <= nsteps; ++k) {
        cur = step(cur, cs, cfg.dt, cfg.cfl_safety);
        // Keep snapshot times exact multiples of dt (no accumulated drift).
        cur.t = f0.t + double(k) * cfg.dt;
        for (double v : cur.values)
            if (!std::isfinite(v))
                throw BlowUpError("field became non-finite during evolution",
                                  cur.t);
        if (k % cfg.snapshot_stride == 0 || k == nsteps)
            traj.snapshots.push_back(cur);
    }
    return traj;
}

Trajectory2D uniform_prefix(const Trajectory2D& traj) {
    const auto& sn = traj.snapshots;
    if (sn.size() < 3) return traj;
    const double d0 = sn[1].t - sn[0].t;
    size_t keep = 2;
    while (keep < sn.size() &&
           std::abs((sn[keep].t - sn[keep - 1].t) - d0) <=
               1e-9 * std::max(1.0, std::abs(d0)))
        ++keep;
    Trajectory2D out;
    out.cs = traj.cs;
    out.snapshots.assign(sn.begin(), sn.begin() + long(keep));
    return out;
}

double residual2d(const Trajectory2D& traj) {
    const auto& sn = traj.snapshots;
    if (sn.size() < 3)
        throw InvalidTrajectoryError("residual needs >= 3 snapshots");
    const double d0 = sn[1].t - sn[0].t;
    if (!(d0 > 0.0))
        throw InvalidTrajectoryError("snapshot times must be strictly increasing");
    for (size_t k = 1; k < sn.size(); ++k) {
        const double d = sn[k].t - sn[k - 1].t;
        if (std::abs(d - d0) > 1e-9 * std::max(1.0, std::abs(d0)))
            throw InvalidTrajectoryError("snapshots are not uniformly spaced");
        if (!(sn[k].grid == sn[0].grid))
            throw InvalidTrajectoryError("snapshots do not share one grid");
    }

    const int nx = sn[0].grid.x.n, ny = sn[0].grid.y.n;
    double worst = 0.0;
    for (size_t k = 1; k + 1 < sn.size(); ++k) {
        const Field2D rhs = spatial_rhs(sn[k], traj.cs, sn[k].t);
        const double inv2dt = 1.0 / (sn[k + 1].t - sn[k - 1].t);
        for (int i = 1; i < nx - 1; ++i)
            for (int j = 1; j < ny - 1; ++j) {
                const double zt =
                    (sn[k + 1].at(i, j) - sn[k - 1].at(i, j)) * inv2dt;
                worst = std::max(worst, std::abs(zt - rhs.at(i, j)));
            }
    }
    return worst;
}

Moments field_moments(const Field2D& f) {
    const int nx = f.grid.x.n, ny = f.grid.y.n;
    const double hx = f.grid.x.h(), hy = f.grid.y.h();
    Moments m;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        const double x = f.grid.x.coord(i);
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            const double y = f.grid.y.coord(j);
            const double w = wx * wy * f.at(i, j);
            m.m0 += w;
            m.mx += w * x;
            m.my += w * y;
            m.mxx += w * x * x;
            m.mxy += w * x * y;
            m.myy += w * y * y;
        }
    }
    const double cell = hx * hy;
    m.m0 *= cell; m.mx *= cell; m.my *= cell;
    m.mxx *= cell; m.mxy *= cell; m.myy *= cell;
    return m;
}

namespace {

Moments moment_rhs(const Moments& m, const CoefficientSet& cs, double t) {
    const auto c = cs.eval(t);
    Moments d;
    d.m0 = 0.0;
    d.mx = -c.p * m.my - c.q * m.mx;
    d.my = m.mx / cs.m;
    d.mxx = -2.0 * c.p * m.mxy - 2.0 * c.q * m.mxx + 2.0 * c.r * m.m0;
    d.mxy = m.mxx / cs.m - c.p * m.myy - c.q * m.mxy + c.s * m.m0;
    d.myy = 2.0 * m.mxy / cs.m;
    return d;
}

Moments maxpy(const Moments& a, double w, const Moments& b) {
    return {a.m0 + w * b.m0,  a.mx + w * b.mx,  a.my + w * b.my,
            a.mxx + w * b.mxx, a.mxy + w * b.mxy, a.myy + w * b.myy};
}

} // namespace

Moments moment_oracle(const Moments& init, const CoefficientSet& cs, double t0,
                      double t1, double dt) {
    if (!(dt > 0.0)) throw InvalidParameterError("moment oracle needs dt > 0");
    if (!(t1 > t0)) throw InvalidParameterError("moment oracle needs t1 > t0");
    const long long n = std::llround((t1 - t0) / dt);
    if (n < 1 || std::abs(double(n) * dt - (t1 - t0)) > 1e-9)
        throw InvalidParameterError("dt must divide t1 - t0 evenly");

    Moments m = init;
    for (long long k = 0; k < n; ++k) {
        const double t = t0 + double(k) * dt;
        const Moments k1 = moment_rhs(m, cs, t);
        const Moments k2 = moment_rhs(maxpy(m, 0.5 * dt, k1), cs, t + 0.5 * dt);
        const Moments k3 = moment_rhs(maxpy(m, 0.5 * dt, k2), cs, t + 0.5 * dt);
        const Moments k4 = moment_rhs(maxpy(m, dt, k3), cs, t + dt);
        Moments acc = maxpy(m, dt / 6.0, k1);
        acc = maxpy(acc, dt / 3.0, k2);
        acc = maxpy(acc, dt / 3.0, k3);
        acc = maxpy(acc, dt / 6.0, k4);
        m = acc;
    }
    return m;
}

} // namespace qbm
