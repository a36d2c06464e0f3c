#include "qbm/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qbm {

namespace {

double sup_abs_on(const Profile& p, double t0, double t1, int nsamples) {
    double worst = 0.0;
    for (int k = 0; k < nsamples; ++k) {
        const double t =
            t0 + (t1 - t0) * double(k) / double(std::max(1, nsamples - 1));
        worst = std::max(worst, std::abs(p(t)));
    }
    return worst;
}

// Validates monotone/uniform snapshot times and a shared grid; returns the
// spacing.
double uniform_spacing(const Trajectory1D& traj, size_t min_count) {
    const auto& sn = traj.snapshots;
    if (sn.size() < min_count) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "operation needs >= %zu snapshots",
                      min_count);
        throw InvalidTrajectoryError(buf);
    }
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
    return d0;
}

} // namespace

// ---------------------------------------------------------------------------
// Invariant variable and reduced coefficients

double invariant_slope(const CoefficientSet& cs) {
    const double L = lambda_const(cs);
    const double q = cs.q.constant_value();
    const double gap = L - q;
    if (std::abs(gap) <= 1e-14 * std::max(1.0, std::abs(L) + std::abs(q)))
        throw DegenerateReductionError(
            "invariant direction degenerates when the decay rate equals q");
    return 2.0 / (cs.m * gap);
}

double invariant_w(const CoefficientSet& cs, double t, double x, double y) {
    (void)t; // constant-coefficient invariant; kept for interface uniformity
    const double c = invariant_slope(cs);
    return y - c * x;
}

Profile invariant_directional_derivative(const CoefficientSet& cs,
                                         const PointGenerator& g) {
    const double c = invariant_slope(cs);
    return g.xi_y - c * g.xi_x;
}

ReducedCoefficients reduced_from_constants(const CoefficientSet& cs) {
    const double L = lambda_const(cs);
    const double q = cs.q.constant_value();
    const double r = cs.r.constant_value();
    const double s = cs.s.constant_value();
    const double d = cs.m * (L - q);
    if (std::abs(L - q) <= 1e-14 * std::max(1.0, std::abs(L) + std::abs(q)))
        throw DegenerateReductionError(
            "reduced coefficients degenerate when the decay rate equals q");

    const double sbar = 2.0 * (-2.0 * r + s * d) / (d * d);
    const double scale = 2.0 * (2.0 * std::abs(r) + std::abs(s * d)) / (d * d);

    ReducedCoefficients rc;
    rc.S = Profile::constant(sbar);
    rc.R = Profile::constant(0.5 * (L + q));
    rc.qt = Profile::constant(2.0 * q);
    rc.degenerate_diffusion =
        sbar == 0.0 || std::abs(sbar) <= 1e-14 * scale;
    return rc;
}

// ---------------------------------------------------------------------------
// 1-D solver

namespace {

Field1D rhs_1d(const Field1D& f, const ReducedCoefficients& rc, double t) {
    if (f.grid.n < 5)
        throw InvalidGridError("stencil evaluation needs at least 5 nodes");
    const int n = f.grid.n;
    const double h = f.grid.h();
    const double invh2 = 1.0 / (h * h);
    const double inv2h = 1.0 / (2.0 * h);
    const double S = rc.S(t), R = rc.R(t), qt = rc.qt(t);

    Field1D out = make_field1d(f.grid, t);
    for (int i = 1; i < n - 1; ++i) {
        const double w = f.grid.coord(i);
        const std::complex<double> uc = f.values[i];
        const std::complex<double> up = f.values[i + 1], um = f.values[i - 1];
        const std::complex<double> uww = (up - 2.0 * uc + um) * invh2;
        const std::complex<double> uw = (up - um) * inv2h;
        out.values[i] = S * uww - R * w * uw + qt * uc;
    }
    return out;
}

Field1D axpy1(const Field1D& f, double a, const Field1D& g, double t) {
    Field1D out = f;
    out.t = t;
    const size_t n = out.values.size();
    for (size_t k = 0; k < n; ++k) out.values[k] += a * g.values[k];
    return out;
}

void require_wellposed(const ReducedCoefficients& rc, double t) {
    const double S = rc.S(t);
    if (S < 0.0) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "reduced equation is ill-posed forward in time: S(%.12g) "
                      "= %.12g < 0",
                      t, S);
        throw IllPosedError(buf);
    }
}

} // namespace

double admissible_dt_1d(const Grid1D& grid, const ReducedCoefficients& rc,
                        double t, double cfl_safety) {
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw InvalidParameterError("cfl_safety must lie in (0, 1]");
    const double h = grid.h();
    const double wmax = std::max(std::abs(grid.min), std::abs(grid.max));
    const double S = rc.S(t), R = rc.R(t), qt = rc.qt(t);

    double limit = std::numeric_limits<double>::max();
    if (S != 0.0) limit = std::min(limit, h * h / (2.0 * std::abs(S)));
    const double adv = std::abs(R) * wmax;
    if (adv > 0.0) limit = std::min(limit, h / adv);
    if (qt != 0.0) limit = std::min(limit, 1.0 / std::abs(qt));
    return cfl_safety * limit;
}

Field1D step_reduced(const Field1D& f, const ReducedCoefficients& rc,
                     double dt, double cfl_safety) {
    if (dt < 0.0) throw InvalidParameterError("dt must be >= 0");
    if (dt == 0.0) return f;

    const double t = f.t;
    require_wellposed(rc, t);
    require_wellposed(rc, t + 0.5 * dt);
    require_wellposed(rc, t + dt);

    const double adm = admissible_dt_1d(f.grid, rc, t, cfl_safety);
    if (dt > adm * (1.0 + 1e-12)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "dt = %.12g exceeds the admissible explicit step %.12g",
                      dt, adm);
        throw StepSizeError(buf, adm);
    }

    const Field1D k1 = rhs_1d(f, rc, t);
    const Field1D k2 = rhs_1d(axpy1(f, 0.5 * dt, k1, t + 0.5 * dt), rc, t + 0.5 * dt);
    const Field1D k3 = rhs_1d(axpy1(f, 0.5 * dt, k2, t + 0.5 * dt), rc, t + 0.5 * dt);
    const Field1D k4 = rhs_1d(axpy1(f, dt, k3, t + dt), rc, t + dt);

    Field1D out = f;
    out.t = t + dt;
    const size_t n = out.values.size();
    const double wgt = dt / 6.0;
    for (size_t k = 0; k < n; ++k)
        out.values[k] += wgt * (k1.values[k] + 2.0 * k2.values[k] +
                                2.0 * k3.values[k] + k4.values[k]);
    return out;
}

Trajectory1D solve_reduced(const Field1D& U0, const ReducedCoefficients& rc,
                           double t_end, double dt, int stride,
                           double cfl_safety) {
    if (!(dt > 0.0)) throw InvalidParameterError("solve_reduced needs dt > 0");
    if (stride < 1)
        throw InvalidParameterError("snapshot stride must be >= 1");
    const double span = t_end - U0.t;
    if (span < 0.0)
        throw InvalidParameterError("t_end must not precede the initial time");
    if (span == 0.0) {
        const TimeDomain dom0 =
            rc.S.domain().intersect(rc.R.domain()).intersect(rc.qt.domain());
        if (!dom0.contains(U0.t))
            throw DomainError("evolution window leaves the coefficient domain");
        Trajectory1D only;
        only.rc = rc;
        only.snapshots.push_back(U0);
        return only;
    }

    const long long nsteps = std::llround(span / dt);
    if (nsteps < 1 || std::abs(double(nsteps) * dt - span) >
                          1e-9 * std::max(1.0, std::abs(span)))
        throw InvalidParameterError("dt must divide t_end - t0 evenly");

    const TimeDomain dom =
        rc.S.domain().intersect(rc.R.domain()).intersect(rc.qt.domain());
    if (!dom.contains(U0.t) || !dom.contains(t_end))
        throw DomainError("evolution window leaves the coefficient domain");

    Trajectory1D traj;
    traj.rc = rc;
    traj.snapshots.push_back(U0);

    Field1D cur = U0;
    for (long long k = 1; k <= nsteps; ++k) {
        cur = step_reduced(cur, rc, dt, cfl_safety);
        cur.t = U0.t + double(k) * dt;
        for (const auto& v : cur.values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw BlowUpError("field became non-finite during evolution",
                                  cur.t);
        if (k % stride == 0 || k == nsteps) traj.snapshots.push_back(cur);
    }
    return traj;
}

Trajectory1D uniform_prefix(const Trajectory1D& traj) {
    const auto& sn = traj.snapshots;
    if (sn.size() < 3) return traj;
    const double d0 = sn[1].t - sn[0].t;
    size_t keep = 2;
    while (keep < sn.size() &&
           std::abs((sn[keep].t - sn[keep - 1].t) - d0) <=
               1e-9 * std::max(1.0, std::abs(d0)))
        ++keep;
    Trajectory1D out;
    out.rc = traj.rc;
    out.snapshots.assign(sn.begin(), sn.begin() + long(keep));
    return out;
}

double residual1d(const Trajectory1D& traj) {
    uniform_spacing(traj, 3);
    const auto& sn = traj.snapshots;
    const int n = sn[0].grid.n;
    double worst = 0.0;
    for (size_t k = 1; k + 1 < sn.size(); ++k) {
        const Field1D rhs = rhs_1d(sn[k], traj.rc, sn[k].t);
        const double inv2dt = 1.0 / (sn[k + 1].t - sn[k - 1].t);
        for (int i = 1; i < n - 1; ++i) {
            const std::complex<double> ut =
                (sn[k + 1].values[i] - sn[k - 1].values[i]) * inv2dt;
            worst = std::max(worst, std::abs(ut - rhs.values[i]));
        }
    }
    return worst;
}

Trajectory1D trim(const Trajectory1D& traj, int k_lo, int k_hi, int i_lo,
                  int i_hi) {
    const auto& sn = traj.snapshots;
    if (k_lo < 0 || k_hi < k_lo || size_t(k_hi) >= sn.size())
        throw InvalidParameterError("trim: snapshot window out of range");
    if (sn.empty()) throw InvalidTrajectoryError("trim: empty trajectory");
    const Grid1D& g = sn[0].grid;
    if (i_lo < 0 || i_hi >= g.n || i_hi - i_lo < 2)
        throw InvalidParameterError("trim: node window out of range");

    const Grid1D sub = make_grid1d(g.coord(i_lo), g.coord(i_hi), i_hi - i_lo + 1);
    Trajectory1D out;
    out.rc = traj.rc;
    for (int k = k_lo; k <= k_hi; ++k) {
        Field1D f = make_field1d(sub, sn[size_t(k)].t);
        for (int i = i_lo; i <= i_hi; ++i)
            f.values[size_t(i - i_lo)] = sn[size_t(k)].values[size_t(i)];
        out.snapshots.push_back(std::move(f));
    }
    return out;
}

namespace {

// Hoists the validation of sample_traj1d outside per-point loops.
struct TrajSampler {
    const Trajectory1D& traj;
    Grid1D taxis;

    explicit TrajSampler(const Trajectory1D& tr) : traj(tr) {
        uniform_spacing(tr, 4);
        taxis = make_grid1d(tr.snapshots.front().t, tr.snapshots.back().t,
                            int(tr.snapshots.size()));
        if (tr.snapshots[0].grid.n < 4)
            throw InvalidGridError("cubic sampling needs >= 4 nodes");
    }

    std::complex<double> operator()(double t, double w) const {
        const CubicAxis at = cubic_axis(taxis, t, "t");
        std::complex<double> acc = 0.0;
        for (int j = 0; j < 4; ++j)
            acc += at.w[j] * sample1d(traj.snapshots[size_t(at.start) + j], w);
        return acc;
    }
};

} // namespace

std::complex<double> sample_traj1d(const Trajectory1D& traj, double t,
                                   double w) {
    return TrajSampler(traj)(t, w);
}

// ---------------------------------------------------------------------------
// Reconstruction and time rescaling

ReconstructResult reconstruct(const Trajectory1D& utraj,
                              const CoefficientSet& cs, const Grid2D& grid) {
    const auto& sn = utraj.snapshots;
    if (sn.empty())
        throw InvalidTrajectoryError("reconstruct: empty trajectory");
    for (size_t k = 1; k < sn.size(); ++k)
        if (!(sn[k].grid == sn[0].grid))
            throw InvalidTrajectoryError("snapshots do not share one grid");

    const double c = invariant_slope(cs);
    const Grid1D& wg = sn[0].grid;

    // w = y - c x is affine, so its range over the rectangle is attained at
    // the corners.
    double wlo = std::numeric_limits<double>::max(), whi = -wlo;
    for (double x : {grid.x.min, grid.x.max})
        for (double y : {grid.y.min, grid.y.max}) {
            const double w = y - c * x;
            wlo = std::min(wlo, w);
            whi = std::max(whi, w);
        }
    const double slack = 1e-12 * (wg.max - wg.min);
    if (wlo < wg.min - slack || whi > wg.max + slack) {
        char buf[192];
        std::snprintf(buf, sizeof buf,
                      "reconstruction needs w in [%.6g, %.6g] but the 1-D grid "
                      "covers [%.6g, %.6g]",
                      wlo, whi, wg.min, wg.max);
        throw CoverageError(buf);
    }

    ReconstructResult res;
    res.traj.cs = cs;
    double max_re = 0.0, max_im = 0.0;
    for (const Field1D& u : sn) {
        Field2D f = make_field2d(grid, u.t);
        for (int i = 0; i < grid.x.n; ++i) {
            const double x = grid.x.coord(i);
            for (int j = 0; j < grid.y.n; ++j) {
                const double w = grid.y.coord(j) - c * x;
                const std::complex<double> v = sample1d(u, w);
                max_re = std::max(max_re, std::abs(v.real()));
                max_im = std::max(max_im, std::abs(v.imag()));
                f.at(i, j) = v.real();
            }
        }
        res.traj.snapshots.push_back(std::move(f));
    }
    res.max_imag_ratio = max_im / std::max(max_re, 1e-300);
    return res;
}

namespace {

double positive_S(const Profile& S, double u) {
    const double v = S(u);
    if (!(v > 0.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "time rescaling needs S > 0; S(%.12g) = %.12g", u, v);
        throw MonotonicityError(buf);
    }
    return v;
}

double adaptive_simpson(const Profile& S, double a, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = positive_S(S, lm), frm = positive_S(S, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double refined = left + right;
    if (depth <= 0 || std::abs(refined - whole) <= 15.0 * tol)
        return refined + (refined - whole) / 15.0;
    return adaptive_simpson(S, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(S, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double rescale_time(const Profile& S, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw InvalidParameterError("rescaling time must be finite and >= 0");
    const TimeDomain dom = S.domain();
    if (!dom.contains(0.0) || !dom.contains(t))
        throw DomainError("rescaling window leaves the profile domain");
    const double fa = positive_S(S, 0.0);
    if (t == 0.0) return 0.0;
    const double fb = positive_S(S, t);
    const double fm = positive_S(S, 0.5 * t);
    const double whole = t / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = 1e-12 * std::max(1.0, std::abs(whole));
    return adaptive_simpson(S, 0.0, t, fa, fm, fb, whole, tol, 40);
}

// ---------------------------------------------------------------------------
// Symmetries of the rescaled reduced equation

ReducedGenerator make_reduced_generator(const Profile& alpha,
                                        const Profile& beta, double phi0,
                                        const Profile& R, const Profile& qt,
                                        PhiReading reading) {
    ReducedGenerator g;
    g.alpha = alpha;
    g.beta = beta;
    g.phi0 = phi0;
    g.reading = reading;

    const Profile a1 = alpha.derivative();
    const Profile a2 = a1.derivative();
    g.v2_coeff = 0.25 * (a1 * R + alpha * R.derivative() - 0.5 * a2);
    g.v_coeff = 0.5 * (R * beta - beta.derivative());

    const Profile base = Profile::constant(phi0) + alpha * (qt + 0.5 * R);
    g.phi = (reading == PhiReading::TruncatedParen) ? base - 0.25 * a1
                                                    : base - 0.25 * (alpha * a1);
    return g;
}

Profile alpha_condition_residual(const Profile& alpha, const Profile& R) {
    const Profile w2 = omega2_from_R(R);
    const Profile a1 = alpha.derivative();
    const Profile a3 = a1.derivative().derivative();
    return a3 - 4.0 * (a1 * w2) - 2.0 * (alpha * w2.derivative());
}

Profile beta_condition_residual(const Profile& beta, const Profile& R) {
    const Profile w2 = omega2_from_R(R);
    return beta.derivative().derivative() - w2 * beta;
}

namespace {

struct FlowState {
    double T = 0, v = 0, E = 0;
};

FlowState fmadd(const FlowState& s, double c, const FlowState& k) {
    return {s.T + c * k.T, s.v + c * k.v, s.E + c * k.E};
}

} // namespace

Trajectory1D apply_reduced_flow(const ReducedGenerator& g, double eps,
                                const Trajectory1D& traj, int k_lo, int k_hi,
                                int i_lo, int i_hi, int substeps) {
    if (substeps < 1)
        throw InvalidParameterError("flow integration needs substeps >= 1");
    const TrajSampler sampler(traj); // validates uniformity and grid size
    const auto& sn = traj.snapshots;
    if (k_lo < 0 || k_hi < k_lo || size_t(k_hi) >= sn.size())
        throw InvalidParameterError("flow: snapshot window out of range");
    const Grid1D& grid = sn[0].grid;
    if (i_lo < 0 || i_hi >= grid.n || i_hi - i_lo < 2)
        throw InvalidParameterError("flow: node window out of range");

    const Profile a1 = g.alpha.derivative();
    const double t_first = sn.front().t, t_last = sn.back().t;
    const double h = eps / double(substeps);

    // Backward characteristics: sigma' = -(generator field), with the
    // U-exponent accumulated along the same path.
    const auto rhs = [&](const FlowState& s) -> FlowState {
        return {-g.alpha(s.T), -(0.5 * a1(s.T) * s.v + g.beta(s.T)),
                g.phi(s.T) + g.v_coeff(s.T) * s.v + g.v2_coeff(s.T) * s.v * s.v};
    };

    const Grid1D sub =
        make_grid1d(grid.coord(i_lo), grid.coord(i_hi), i_hi - i_lo + 1);
    Trajectory1D out;
    out.rc = traj.rc;
    for (int k = k_lo; k <= k_hi; ++k) {
        Field1D f = make_field1d(sub, sn[size_t(k)].t);
        for (int i = i_lo; i <= i_hi; ++i) {
            FlowState s{sn[size_t(k)].t, grid.coord(i), 0.0};
            for (int step = 0; step < substeps; ++step) {
                const FlowState k1 = rhs(s);
                const FlowState k2 = rhs(fmadd(s, 0.5 * h, k1));
                const FlowState k3 = rhs(fmadd(s, 0.5 * h, k2));
                const FlowState k4 = rhs(fmadd(s, h, k3));
                s = fmadd(s, h / 6.0,
                          {k1.T + 2.0 * k2.T + 2.0 * k3.T + k4.T,
                           k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v,
                           k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E});
            }
            if (s.T < t_first || s.T > t_last || s.v < grid.min ||
                s.v > grid.max) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "flow pull-back left the lattice (T = %.6g, v = "
                              "%.6g); enlarge the window margins",
                              s.T, s.v);
                throw CoverageError(buf);
            }
            f.values[size_t(i - i_lo)] = sampler(s.T, s.v) * std::exp(s.E);
        }
        out.snapshots.push_back(std::move(f));
    }
    return out;
}

ReducedSymmetryReport reduced_symmetry_verdict(
    const Profile& alpha, const Profile& beta, double phi0, const Profile& R,
    const Profile& qt, const Field1D& U0, double t_end, double dt, int stride,
    double eps) {
    ReducedCoefficients rc;
    rc.S = Profile::constant(1.0);
    rc.R = R;
    rc.qt = qt;

    Trajectory1D traj = uniform_prefix(solve_reduced(U0, rc, t_end, dt, stride));
    const int K = int(traj.snapshots.size());
    if (K < 5)
        throw InvalidParameterError(
            "flow verdict needs at least 5 uniform snapshots");
    const double spacing = traj.snapshots[1].t - traj.snapshots[0].t;
    const Grid1D& grid = traj.snapshots[0].grid;

    ReducedSymmetryReport rep;
    rep.alpha_condition_sup =
        sup_abs_on(alpha_condition_residual(alpha, R), U0.t, t_end, 129);
    rep.beta_condition_sup =
        sup_abs_on(beta_condition_residual(beta, R), U0.t, t_end, 129);

    // Margins sized from the flow displacement plus cubic-window slack.
    const double sup_alpha = sup_abs_on(alpha, U0.t, t_end, 129);
    const Profile a1 = alpha.derivative();
    const double vmax = std::max(std::abs(grid.min), std::abs(grid.max));
    const double sup_dv = 0.5 * sup_abs_on(a1, U0.t, t_end, 129) * vmax +
                          sup_abs_on(beta, U0.t, t_end, 129);
    const int k_m =
        int(std::ceil(std::abs(eps) * sup_alpha * 1.2 / spacing)) + 2;
    const int i_m =
        int(std::ceil(std::abs(eps) * sup_dv * 1.2 / grid.h())) + 2;
    const int k_lo = k_m, k_hi = K - 1 - k_m;
    const int i_lo = i_m, i_hi = grid.n - 1 - i_m;
    if (k_hi - k_lo < 2 || i_hi - i_lo < 4)
        throw InvalidParameterError(
            "trajectory too short for the flow margins; refine the lattice or "
            "shrink eps");

    rep.base_residual = residual1d(trim(traj, k_lo, k_hi, i_lo, i_hi));

    double umax = 0.0;
    for (const auto& f : traj.snapshots)
        for (const auto& v : f.values) umax = std::max(umax, std::abs(v));

    const auto flow_residual = [&](PhiReading reading) {
        const ReducedGenerator g =
            make_reduced_generator(alpha, beta, phi0, R, qt, reading);
        return residual1d(
            apply_reduced_flow(g, eps, traj, k_lo, k_hi, i_lo, i_hi));
    };
    rep.residual_truncated = flow_residual(PhiReading::TruncatedParen);
    rep.residual_closed = flow_residual(PhiReading::ClosedAtEnd);

    const double allow = 5.0 * rep.base_residual + 1e-9 * umax;
    const bool ok_a = rep.residual_truncated <= allow;
    const bool ok_b = rep.residual_closed <= allow;
    rep.verdict = ok_a && ok_b ? "both"
                  : ok_a       ? "truncated-paren"
                  : ok_b       ? "closed-at-end"
                               : "failed";
    return rep;
}

// ---------------------------------------------------------------------------
// Riccati closed form

double riccati_beta_closed(double c, double beta0, double beta1, double T) {
    if (c == 0.0) return beta0 + beta1 * T;
    return beta0 * std::exp(c * T) - beta1 / (2.0 * c) * std::exp(-c * T);
}

SampledSolution riccati_beta(const Profile& R, double beta0, double beta1,
                             double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw InvalidParameterError("riccati path needs dt > 0");
    if (!(t1 > t0)) throw InvalidParameterError("riccati path needs t1 > t0");
    const long long n = std::llround((t1 - t0) / dt);
    if (n < 1 || std::abs(double(n) * dt - (t1 - t0)) >
                     1e-9 * std::max(1.0, std::abs(t1 - t0)))
        throw InvalidParameterError("dt must divide t1 - t0 evenly");
    const TimeDomain dom = R.domain();
    if (!dom.contains(t0) || !dom.contains(t1))
        throw DomainError("integration window leaves the profile domain");

    // State: L with L' = R L (L(t0) = 1) and I with I' = L^-2 (I(t0) = 0).
    double L = 1.0, I = 0.0;
    SampledSolution out;
    const auto push = [&](double t) {
        out.t.push_back(t);
        out.value.push_back(beta0 * L + beta1 * L * I);
        out.deriv.push_back(beta0 * R(t) * L + beta1 * (R(t) * L * I + 1.0 / L));
    };
    push(t0);
    for (long long k = 0; k < n; ++k) {
        const double t = t0 + double(k) * dt;
        const auto fL = [&](double tt, double LL) { return R(tt) * LL; };
        const auto fI = [&](double LL) { return 1.0 / (LL * LL); };
        const double l1 = fL(t, L), i1 = fI(L);
        const double l2 = fL(t + 0.5 * dt, L + 0.5 * dt * l1),
                     i2 = fI(L + 0.5 * dt * l1);
        const double l3 = fL(t + 0.5 * dt, L + 0.5 * dt * l2),
                     i3 = fI(L + 0.5 * dt * l2);
        const double l4 = fL(t + dt, L + dt * l3), i4 = fI(L + dt * l3);
        L += dt / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        I += dt / 6.0 * (i1 + 2.0 * i2 + 2.0 * i3 + i4);
        if (!(L > 0.0) || !std::isfinite(L) || !std::isfinite(I))
            throw AccuracyError(
                "linearizing factor left (0, inf); refine dt or shrink the "
                "window");
        push(t0 + double(k + 1) * dt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Free-particle Schroedinger picture

std::complex<double> free_schrodinger(const WaveParams& wave, double M,
                                      double hbar, std::complex<double> tau,
                                      double chi) {
    if (!(M > 0.0) || !(hbar > 0.0))
        throw InvalidParameterError("wave families need M > 0 and hbar > 0");
    const std::complex<double> i(0.0, 1.0);
    switch (wave.kind) {
    case WaveKind::PlaneWave: {
        const std::complex<double> omega =
            -i * wave.k * wave.k / (2.0 * M * hbar);
        return wave.amp * std::exp(i * wave.k * chi + omega * tau);
    }
    case WaveKind::GaussianPacket: {
        if (!(wave.sigma0 > 0.0))
            throw InvalidParameterError("packet width sigma0 must be > 0");
        const double s2 = wave.sigma0 * wave.sigma0;
        const std::complex<double> Sigma = s2 + i * tau / (M * hbar);
        if (std::abs(Sigma) <= 1e-12 * s2)
            throw SingularityError("wave packet focal singularity",
                                   std::abs(tau));
        return wave.amp * std::sqrt(s2 / Sigma) *
               std::exp(-chi * chi / (2.0 * Sigma));
    }
    }
    throw InvalidParameterError("unknown wave kind");
}

std::complex<double> SchrodingerMap::tau(double t) const {
    const double rate = lambda + q;
    const double f = (std::exp(-rate * t) - 1.0) / rate;
    return tau0 + std::complex<double>(0.0, hbar * f);
}

double SchrodingerMap::chi(double t, double w) const {
    return a * w * std::exp(-mu * t);
}

SchrodingerMap make_schrodinger_map(const CoefficientSet& cs, double M,
                                    std::complex<double> tau0,
                                    MapRadicand radicand) {
    if (!(M > 0.0)) throw InvalidParameterError("map mass M must be > 0");
    const double L = lambda_const(cs);
    const double q = cs.q.constant_value();
    if (std::abs(L + q) <= 1e-14 * std::max(1.0, std::abs(L) + std::abs(q)))
        throw DegenerateMapError(
            "complex-time map degenerates when the decay rate cancels q");

    const double rad = (radicand == MapRadicand::MasterS)
                           ? cs.s.constant_value()
                           : reduced_from_constants(cs).S.constant_value();
    if (!(rad > 0.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "coordinate-change radicand must be > 0 (got %.12g)",
                      rad);
        throw InvalidMapError(buf);
    }

    SchrodingerMap map;
    map.hbar = cs.hbar;
    map.lambda = L;
    map.q = q;
    map.M = M;
    map.mu = 0.5 * (L + q);
    map.a = std::sqrt(cs.hbar / (2.0 * M * rad));
    map.tau0 = tau0;
    return map;
}

std::complex<double> map_U(const SchrodingerMap& map, const WaveParams& wave,
                           double t, double w) {
    return std::exp(2.0 * map.q * t) *
           free_schrodinger(wave, map.M, map.hbar, map.tau(t), map.chi(t, w));
}

// ---------------------------------------------------------------------------
// Refinement studies

namespace {

double guarded_order(double coarse, double fine) {
    const double tiny = 1e-300;
    return std::log2(std::max(coarse, tiny) / std::max(fine, tiny));
}

} // namespace

RefinementReport map_residual_study(const CoefficientSet& cs,
                                    const WaveParams& wave, double M,
                                    std::complex<double> tau0,
                                    MapRadicand radicand, const Grid1D& wgrid,
                                    double t_end, int nt) {
    if (!(t_end > 0.0))
        throw InvalidParameterError("residual study needs t_end > 0");
    if (nt < 3) throw InvalidParameterError("residual study needs nt >= 3");

    const ReducedCoefficients rc = reduced_from_constants(cs);
    const SchrodingerMap map = make_schrodinger_map(cs, M, tau0, radicand);

    const auto level = [&](const Grid1D& wg, int nt_level) {
        Trajectory1D tr;
        tr.rc = rc;
        for (int k = 0; k < nt_level; ++k) {
            const double t = t_end * double(k) / double(nt_level - 1);
            Field1D f = make_field1d(wg, t);
            for (int i = 0; i < wg.n; ++i)
                f.values[size_t(i)] = map_U(map, wave, t, wg.coord(i));
            tr.snapshots.push_back(std::move(f));
        }
        return residual1d(tr);
    };

    RefinementReport rep;
    rep.residual_coarse = level(wgrid, nt);
    rep.residual_fine = level(make_grid1d(wgrid.min, wgrid.max,
                                          2 * (wgrid.n - 1) + 1),
                              2 * (nt - 1) + 1);
    rep.order = guarded_order(rep.residual_coarse, rep.residual_fine);
    return rep;
}

PipelineReport reduction_pipeline_study(const CoefficientSet& cs,
                                        const PipelineOptions& opt) {
    if (!(opt.t_end > 0.0))
        throw InvalidParameterError("pipeline study needs t_end > 0");
    if (opt.stride < 1)
        throw InvalidParameterError("pipeline stride must be >= 1");
    if (!(opt.u_sigma > 0.0))
        throw InvalidParameterError("initial profile width must be > 0");

    const ReducedCoefficients rc = reduced_from_constants(cs);

    PipelineReport rep;
    rep.degenerate_diffusion = rc.degenerate_diffusion;

    const auto level = [&](const Grid2D& g2, const Grid1D& wg) {
        Field1D U0 = make_field1d(wg, 0.0);
        for (int i = 0; i < wg.n; ++i) {
            const double w = wg.coord(i);
            U0.values[size_t(i)] =
                opt.u_amp * std::exp(-w * w / (2.0 * opt.u_sigma * opt.u_sigma));
        }
        const double adm =
            std::min(admissible_dt_1d(wg, rc, 0.0, opt.cfl_safety),
                     admissible_dt_1d(wg, rc, opt.t_end, opt.cfl_safety));
        long long nsteps = (long long)std::ceil(opt.t_end / adm);
        nsteps = ((nsteps + opt.stride - 1) / opt.stride) * opt.stride;
        const double dt = opt.t_end / double(nsteps);

        const Trajectory1D traj =
            solve_reduced(U0, rc, opt.t_end, dt, opt.stride, opt.cfl_safety);
        const ReconstructResult rec = reconstruct(traj, cs, g2);
        rep.max_imag_ratio = std::max(rep.max_imag_ratio, rec.max_imag_ratio);
        return residual2d(rec.traj);
    };

    rep.refinement.residual_coarse = level(opt.grid, opt.wgrid);
    const Grid2D fine2 = make_grid2d(
        {opt.grid.x.min, opt.grid.x.max, 2 * (opt.grid.x.n - 1) + 1},
        {opt.grid.y.min, opt.grid.y.max, 2 * (opt.grid.y.n - 1) + 1});
    const Grid1D finew =
        make_grid1d(opt.wgrid.min, opt.wgrid.max, 2 * (opt.wgrid.n - 1) + 1);
    rep.refinement.residual_fine = level(fine2, finew);
    rep.refinement.order = guarded_order(rep.refinement.residual_coarse,
                                         rep.refinement.residual_fine);
    return rep;
}

} // namespace qbm
