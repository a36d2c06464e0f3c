#include "qbm/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qbm {

namespace {

bool zero_profile(const Profile& p) {
    return p.is_constant() && p.constant_value() == 0.0;
}

double sup_abs(const Profile& p, const TimeDomain& window, int nsamples) {
    double worst = 0.0;
    for (int k = 0; k < nsamples; ++k) {
        const double t =
            window.t_min + (window.t_max - window.t_min) * double(k) /
                               double(std::max(1, nsamples - 1));
        worst = std::max(worst, std::abs(p.eval(t)));
    }
    return worst;
}

} // namespace

PointGenerator scale(double c, const PointGenerator& g) {
    PointGenerator out;
    out.name = g.name;
    out.xi_t = c * g.xi_t;
    out.xi_x = c * g.xi_x;
    out.xi_y = c * g.xi_y;
    out.alpha = c * g.alpha;
    out.beta = c * g.beta;
    out.gamma = c * g.gamma;
    return out;
}

std::vector<PointGenerator> constant_generators(const CoefficientSet& cs) {
    const double L = lambda_const(cs);
    const double m = cs.m;
    const double p = cs.p.constant_value();
    const double q = cs.q.constant_value();
    const double r = cs.r.constant_value();
    const double s = cs.s.constant_value();
    (void)p;

    std::vector<PointGenerator> gens(6);

    gens[0].name = "Y1";
    gens[0].xi_t = 1.0;

    gens[1].name = "YZ";
    gens[1].gamma = Profile::constant(1.0);

    const double mu1 = (L - q) / 2.0;  // X1 rate
    const double mu2 = -(L + q) / 2.0; // X2 rate
    const double mu3 = -(L - q) / 2.0; // X3 rate
    const double mu4 = (L + q) / 2.0;  // X4 rate

    gens[2].name = "X1";
    gens[2].xi_x = Profile::exponential(m * (L - q), mu1);
    gens[2].xi_y = Profile::exponential(2.0, mu1);

    gens[3].name = "X2";
    gens[3].xi_x = Profile::exponential(m * (L + q), mu2);
    gens[3].xi_y = Profile::exponential(-2.0, mu2);

    gens[4].name = "X3";
    gens[4].xi_x = Profile::exponential(2.0 * r * m * (q - L), mu3);
    gens[4].xi_y = Profile::exponential(4.0 * (r + s * q * m), mu3);
    gens[4].alpha = Profile::exponential(2.0 * m * q * (L - q), mu3);
    gens[4].beta = Profile::exponential(m * m * q * (L * L - q * q), mu3);

    gens[5].name = "X4";
    gens[5].xi_x = Profile::exponential(2.0 * r * m * (L + q), mu4);
    gens[5].xi_y = Profile::exponential(r + s * q * m, mu4);
    gens[5].alpha = Profile::exponential(-2.0 * m * q * (L + q), mu4);
    gens[5].beta = Profile::exponential(m * m * q * (L * L - q * q), mu4);

    return gens;
}

ConditionDefects condition_defects(const PointGenerator& g,
                                   const CoefficientSet& cs) {
    const double inv_m = 1.0 / cs.m;
    ConditionDefects d;
    d.alpha_cond = g.alpha.derivative() - cs.q * g.alpha + inv_m * g.beta;
    d.beta_cond = g.beta.derivative() - cs.p * g.alpha;
    d.gamma_cond = g.gamma.derivative();
    d.xi_x_cond = g.xi_x.derivative() + cs.q * g.xi_x + cs.p * g.xi_y +
                  2.0 * (cs.r * g.alpha) + cs.s * g.beta;
    d.xi_y_cond = g.xi_y.derivative() - inv_m * g.xi_x + cs.s * g.alpha;
    return d;
}

double ConditionDefects::sup(const TimeDomain& window, int nsamples) const {
    double worst = 0.0;
    for (const Profile* p :
         {&alpha_cond, &beta_cond, &gamma_cond, &xi_x_cond, &xi_y_cond})
        worst = std::max(worst, sup_abs(*p, window, nsamples));
    return worst;
}

PointGenerator lie_bracket(const PointGenerator& g1, const PointGenerator& g2) {
    PointGenerator b;
    b.name = "[" + g1.name + "," + g2.name + "]";
    b.xi_t = 0.0;
    b.xi_x = g1.xi_t * g2.xi_x.derivative() - g2.xi_t * g1.xi_x.derivative();
    b.xi_y = g1.xi_t * g2.xi_y.derivative() - g2.xi_t * g1.xi_y.derivative();
    b.alpha = g1.xi_t * g2.alpha.derivative() - g2.xi_t * g1.alpha.derivative();
    b.beta = g1.xi_t * g2.beta.derivative() - g2.xi_t * g1.beta.derivative();
    b.gamma = g1.xi_t * g2.gamma.derivative() -
              g2.xi_t * g1.gamma.derivative() + g1.xi_x * g2.alpha -
              g2.xi_x * g1.alpha + g1.xi_y * g2.beta - g2.xi_y * g1.beta;
    return b;
}

namespace {

Field2D flow_snapshot(const PointGenerator& g, double eps, const Field2D& f) {
    const double t = f.t;
    const double sx = eps * g.xi_x.eval(t);
    const double sy = eps * g.xi_y.eval(t);
    const double a = g.alpha.eval(t);
    const double b = g.beta.eval(t);
    const double c = g.gamma.eval(t);
    const double quad =
        eps * eps * (a * g.xi_x.eval(t) + b * g.xi_y.eval(t)) / 2.0;

    const Grid1D& gx = f.grid.x;
    const Grid1D& gy = f.grid.y;
    const double ext_x = gx.max - gx.min;
    const double ext_y = gy.max - gy.min;
    if (std::abs(sx) > 0.1 * ext_x || std::abs(sy) > 0.1 * ext_y) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "flow displacement (%.6g, %.6g) at t = %.6g exceeds 10%% "
                      "of the grid extents (%.6g, %.6g); enlarge the grid to "
                      "at least (%.6g, %.6g) per axis",
                      sx, sy, t, ext_x, ext_y, 10.0 * std::abs(sx),
                      10.0 * std::abs(sy));
        throw CoverageError(buf);
    }

    const bool pure_scaling = sx == 0.0 && sy == 0.0;
    Field2D out = make_field2d(f.grid, t);
    for (int i = 0; i < gx.n; ++i) {
        const double xp = gx.coord(i) - sx;
        for (int j = 0; j < gy.n; ++j) {
            const double yp = gy.coord(j) - sy;
            double base;
            if (pure_scaling) {
                base = f.at(i, j); // pull-back is the identity: stay exact
            } else if (xp < gx.min || xp > gx.max || yp < gy.min ||
                       yp > gy.max) {
                base = 0.0; // Dirichlet far field
            } else {
                base = sample2d(f, xp, yp);
            }
            const double mult =
                std::exp(eps * (a * xp + b * yp + c) + quad);
            out.at(i, j) = base * mult;
        }
    }
    return out;
}

} // namespace

Trajectory2D push_forward(const PointGenerator& g, double eps,
                          const Trajectory2D& traj) {
    if (traj.snapshots.empty())
        throw InvalidTrajectoryError("push_forward needs a nonempty trajectory");

    const bool spatial = !zero_profile(g.xi_x) || !zero_profile(g.xi_y) ||
                         !zero_profile(g.alpha) || !zero_profile(g.beta) ||
                         !zero_profile(g.gamma);

    Trajectory2D out;
    out.cs = traj.cs;
    out.snapshots.reserve(traj.snapshots.size());

    if (g.xi_t != 0.0) {
        if (spatial)
            throw InvalidParameterError(
                "flows mixing time translation with spatial or scaling "
                "components are not supported");
        if (!traj.cs.is_constant())
            throw NotConstantError(
                "time translation maps solutions to solutions only for "
                "constant coefficients");
        for (const Field2D& f : traj.snapshots) {
            Field2D shifted = f;
            shifted.t = f.t + eps * g.xi_t;
            out.snapshots.push_back(std::move(shifted));
        }
        return out;
    }

    if (eps == 0.0) return traj;
    for (const Field2D& f : traj.snapshots)
        out.snapshots.push_back(flow_snapshot(g, eps, f));
    return out;
}

namespace {

// Gaussian elimination with partial pivoting for the small dense normal
// systems the table fit produces.
std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> rhs) {
    const size_t n = rhs.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t row = col + 1; row < n; ++row)
            if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        if (std::abs(A[col][col]) < 1e-14) {
            // Degenerate direction: drop it from the fit.
            A[col][col] = 1.0;
            rhs[col] = 0.0;
            for (size_t k = col + 1; k < n; ++k) A[col][k] = 0.0;
            for (size_t row = col + 1; row < n; ++row) A[row][col] = 0.0;
            continue;
        }
        for (size_t row = col + 1; row < n; ++row) {
            const double fac = A[row][col] / A[col][col];
            for (size_t k = col; k < n; ++k) A[row][k] -= fac * A[col][k];
            rhs[row] -= fac * rhs[col];
        }
    }
    // Back substitution.
    std::vector<double> x(n, 0.0);
    for (size_t i = n; i-- > 0;) {
        double acc = rhs[i];
        for (size_t k = i + 1; k < n; ++k) acc -= A[i][k] * x[k];
        x[i] = acc / A[i][i];
    }
    return x;
}

bool pure_central(const PointGenerator& g) {
    return g.xi_t == 0.0 && zero_profile(g.xi_x) && zero_profile(g.xi_y) &&
           zero_profile(g.alpha) && zero_profile(g.beta);
}

} // namespace

AlgebraTable algebra_table(const std::vector<PointGenerator>& gens,
                           const TimeDomain& window, int nsamples) {
    if (nsamples < 2)
        throw InvalidParameterError("algebra_table needs >= 2 sample times");
    const size_t n = gens.size();

    std::vector<double> times(static_cast<size_t>(nsamples));
    for (int k = 0; k < nsamples; ++k)
        times[size_t(k)] = window.t_min + (window.t_max - window.t_min) *
                                              double(k) / double(nsamples - 1);

    // Columns of the least-squares system: non-central inputs only (a pure
    // gamma generator has no non-central component to match).
    std::vector<size_t> fit_cols;
    for (size_t k = 0; k < n; ++k)
        if (!pure_central(gens[k])) fit_cols.push_back(k);

    // Component samples of one generator: xi_t, then xi_x, xi_y, alpha, beta
    // at every sample time.
    auto samples = [&](const PointGenerator& g) {
        std::vector<double> v;
        v.reserve(1 + 4 * times.size());
        v.push_back(g.xi_t);
        for (double t : times) v.push_back(g.xi_x.eval(t));
        for (double t : times) v.push_back(g.xi_y.eval(t));
        for (double t : times) v.push_back(g.alpha.eval(t));
        for (double t : times) v.push_back(g.beta.eval(t));
        return v;
    };

    std::vector<std::vector<double>> basis;
    basis.reserve(fit_cols.size());
    for (size_t k : fit_cols) basis.push_back(samples(gens[k]));

    AlgebraTable table;
    for (const auto& g : gens) table.names.push_back(g.name);

    const double tol = 1e-10;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            BracketEntry e;
            e.i = int(i);
            e.j = int(j);
            e.bracket = lie_bracket(gens[i], gens[j]);
            e.coeff.assign(n, 0.0);

            const std::vector<double> target = samples(e.bracket);
            double target_norm = 0.0;
            for (double v : target)
                target_norm = std::max(target_norm, std::abs(v));
            double gamma_norm = sup_abs(e.bracket.gamma, window, nsamples);

            if (target_norm <= 1e-14 && gamma_norm <= 1e-14) {
                e.is_zero = true;
                e.in_span = true;
                table.entries.push_back(std::move(e));
                continue;
            }

            // Least squares over the non-central components.
            std::vector<double> c(fit_cols.size(), 0.0);
            if (!fit_cols.empty() && target_norm > 1e-14) {
                const size_t nc = fit_cols.size();
                std::vector<std::vector<double>> normal(
                    nc, std::vector<double>(nc, 0.0));
                std::vector<double> rhs(nc, 0.0);
                for (size_t a = 0; a < nc; ++a) {
                    for (size_t b = 0; b < nc; ++b)
                        for (size_t kk = 0; kk < target.size(); ++kk)
                            normal[a][b] += basis[a][kk] * basis[b][kk];
                    for (size_t kk = 0; kk < target.size(); ++kk)
                        rhs[a] += basis[a][kk] * target[kk];
                }
                c = solve_dense(std::move(normal), std::move(rhs));
            }

            // Residual of the non-central fit.
            double fit_residual = 0.0;
            for (size_t kk = 0; kk < target.size(); ++kk) {
                double acc = target[kk];
                for (size_t a = 0; a < fit_cols.size(); ++a)
                    acc -= c[a] * basis[a][kk];
                fit_residual = std::max(fit_residual, std::abs(acc));
            }

            if (fit_residual > tol) {
                // Bracket leaves the span in a non-central direction.
                table.entries.push_back(std::move(e));
                continue;
            }
            for (size_t a = 0; a < fit_cols.size(); ++a)
                e.coeff[fit_cols[a]] = c[a];

            // Whatever gamma remains after subtracting the fitted span must
            // be matched by pure-central inputs, or it is a central element
            // outside the list.
            Profile gamma_left = e.bracket.gamma;
            for (size_t a = 0; a < fit_cols.size(); ++a)
                gamma_left = gamma_left - c[a] * gens[fit_cols[a]].gamma;

            // One-dimensional projections onto each pure-central input.
            for (size_t k = 0; k < n; ++k) {
                if (!pure_central(gens[k])) continue;
                double num = 0.0, den = 0.0;
                for (double t : times) {
                    const double gk = gens[k].gamma.eval(t);
                    num += gk * gamma_left.eval(t);
                    den += gk * gk;
                }
                if (den > 1e-14) {
                    const double ck = num / den;
                    e.coeff[k] = ck;
                    gamma_left = gamma_left - ck * gens[k].gamma;
                }
            }

            const double gamma_residual = sup_abs(gamma_left, window, nsamples);
            if (gamma_residual <= tol) {
                e.in_span = true;
            } else {
                e.is_central = true;
                e.central_profile = gamma_left.to_string();
            }
            table.entries.push_back(std::move(e));
        }
    }
    return table;
}

std::string format_algebra_table(const AlgebraTable& table) {
    std::string out;
    char buf[128];
    for (const auto& e : table.entries) {
        std::snprintf(buf, sizeof buf, "[%s,%s] = ",
                      table.names[size_t(e.i)].c_str(),
                      table.names[size_t(e.j)].c_str());
        out += buf;
        if (e.is_zero) {
            out += "0\n";
            continue;
        }
        bool first = true;
        for (size_t k = 0; k < e.coeff.size(); ++k) {
            if (std::abs(e.coeff[k]) <= 1e-12) continue;
            std::snprintf(buf, sizeof buf, "%s%.10g*%s", first ? "" : " + ",
                          e.coeff[k], table.names[k].c_str());
            out += buf;
            first = false;
        }
        if (e.is_central) {
            if (!first) out += " + ";
            out += "central{(" + e.central_profile + ") Z dZ}";
            first = false;
        }
        if (first) out += e.in_span ? "0" : "unresolved";
        out += "\n";
    }
    return out;
}

} // namespace qbm
