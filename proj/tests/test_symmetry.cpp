#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qbm/symmetry.hpp"

using namespace qbm;

namespace {

Profile c(double v) { return Profile::constant(v); }

CoefficientSet coeffs(double p, double q, double r, double s, double m = 1.0) {
    return make_coefficients(m, 1.0, c(p), c(q), c(r), c(s));
}

// Baseline undamped set: lambda = 2 exactly.
CoefficientSet base() { return coeffs(1.0, 0.0, 0.05, 0.02); }

// Damped set used by the bracket-table checks: lambda = sqrt(3.96).
CoefficientSet damped() { return coeffs(1.0, 0.2, 0.05, 0.02); }

const BracketEntry& entry(const AlgebraTable& t, int i, int j) {
    for (const auto& e : t.entries)
        if (e.i == i && e.j == j) return e;
    REQUIRE(false);
    return t.entries.front();
}

double sup5(const ConditionDefects& d, const TimeDomain& w) {
    return d.sup(w);
}

// Largest |p(t)| over equispaced samples of the window (per-condition view;
// ConditionDefects::sup covers all five at once).
double sup_prof(const Profile& p, const TimeDomain& w, int n = 65) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t =
            w.t_min + (w.t_max - w.t_min) * double(i) / double(n - 1);
        worst = std::max(worst, std::abs(p.eval(t)));
    }
    return worst;
}

} // namespace

TEST_CASE("constant_generators transcribes the six closed forms literally") {
    const CoefficientSet cs = damped();
    const double lam = lambda_const(cs);
    CHECK(lam == doctest::Approx(std::sqrt(3.96)).epsilon(1e-15));

    const auto gens = constant_generators(cs);
    REQUIRE(gens.size() == 6);
    CHECK(gens[0].name == "Y1");
    CHECK(gens[1].name == "YZ");
    CHECK(gens[2].name == "X1");
    CHECK(gens[3].name == "X2");
    CHECK(gens[4].name == "X3");
    CHECK(gens[5].name == "X4");

    const double m = 1.0, q = 0.2, r = 0.05, s = 0.02;
    auto probe = [&](const PointGenerator& g, double t, double rate,
                     double xi_x0, double xi_y0, double a0, double b0) {
        const double f = std::exp(rate * t);
        CHECK(g.xi_t == 0.0);
        CHECK(g.xi_x.eval(t) == doctest::Approx(xi_x0 * f).epsilon(1e-13));
        CHECK(g.xi_y.eval(t) == doctest::Approx(xi_y0 * f).epsilon(1e-13));
        CHECK(g.alpha.eval(t) == doctest::Approx(a0 * f).epsilon(1e-13));
        CHECK(g.beta.eval(t) == doctest::Approx(b0 * f).epsilon(1e-13));
        CHECK(g.gamma.eval(t) == 0.0);
    };

    // Y1 = d/dt and YZ = Z d/dZ.
    CHECK(gens[0].xi_t == 1.0);
    CHECK(gens[0].xi_x.eval(0.4) == 0.0);
    CHECK(gens[0].gamma.eval(0.4) == 0.0);
    CHECK(gens[1].xi_t == 0.0);
    CHECK(gens[1].gamma.is_constant());
    CHECK(gens[1].gamma.eval(0.4) == 1.0);
    CHECK(gens[1].xi_y.eval(0.4) == 0.0);

    for (double t : {0.0, 0.7}) {
        probe(gens[2], t, (lam - q) / 2, m * (lam - q), 2.0, 0.0, 0.0);
        probe(gens[3], t, -(lam + q) / 2, m * (lam + q), -2.0, 0.0, 0.0);
        probe(gens[4], t, -(lam - q) / 2, 2 * r * m * (q - lam),
              4 * (r + s * q * m), 2 * m * q * (lam - q),
              m * m * q * (lam * lam - q * q));
        probe(gens[5], t, (lam + q) / 2, 2 * r * m * (lam + q),
              (r + s * q * m), -2 * m * q * (lam + q),
              m * m * q * (lam * lam - q * q));
    }
}

TEST_CASE("Y1 and YZ satisfy all five determining conditions exactly") {
    const auto gens = constant_generators(base());
    const TimeDomain w{0.0, 0.5};
    for (int k : {0, 1}) {
        const ConditionDefects d = condition_defects(gens[size_t(k)], base());
        CHECK(d.alpha_cond.eval(0.2) == 0.0);
        CHECK(d.beta_cond.eval(0.2) == 0.0);
        CHECK(d.gamma_cond.eval(0.2) == 0.0);
        CHECK(d.xi_x_cond.eval(0.2) == 0.0);
        CHECK(d.xi_y_cond.eval(0.2) == 0.0);
        CHECK(sup5(d, w) == 0.0);
    }
}

TEST_CASE("the closed-form X1/X2 violate the momentum-translation condition") {
    // With the constant-rate exponentials built from the square root of
    // (4p - m q^2), the xi_x determining condition picks up the defect
    // (m/2) e^{rate t} (lambda^2 - q^2 + 4p/m), which at the baseline set
    // equals 4 e^{t} for X1 and -4 e^{-t} for X2.  The other four
    // conditions stay identically zero.  This pins the defect so any
    // change in the transcription or the determining equations shows up.
    const auto gens = constant_generators(base());
    const TimeDomain w{0.0, 0.5};

    const ConditionDefects d1 = condition_defects(gens[2], base());
    CHECK(d1.xi_x_cond.eval(0.0) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(sup_prof(d1.xi_x_cond, w) ==
          doctest::Approx(4.0 * std::exp(0.5)).epsilon(1e-12));
    CHECK(d1.alpha_cond.eval(0.3) == 0.0);
    CHECK(d1.beta_cond.eval(0.3) == 0.0);
    CHECK(d1.gamma_cond.eval(0.3) == 0.0);
    CHECK(d1.xi_y_cond.eval(0.3) == 0.0);

    const ConditionDefects d2 = condition_defects(gens[3], base());
    CHECK(d2.xi_x_cond.eval(0.0) == doctest::Approx(-4.0).epsilon(1e-13));
    CHECK(sup_prof(d2.xi_x_cond, w) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(d2.xi_y_cond.eval(0.3) == 0.0);

    // X3 and X4 at q = 0: defects 0.4 e^{-t} and 0.25 e^{t} (xi_x), and
    // X4 additionally fails the position condition by -0.15 e^{t}.
    const ConditionDefects d3 = condition_defects(gens[4], base());
    CHECK(d3.xi_x_cond.eval(0.0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d3.xi_y_cond.eval(0.3) == doctest::Approx(0.0).epsilon(1e-15));
    const ConditionDefects d4 = condition_defects(gens[5], base());
    CHECK(d4.xi_x_cond.eval(0.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d4.xi_y_cond.eval(0.0) == doctest::Approx(-0.15).epsilon(1e-12));
}

TEST_CASE("a tabulated sine/cosine generator is a symmetry of the q = 0 set") {
    // For m = 1, p = 1, q = 0 the momentum/position translation pair
    // (xi_x, xi_y) = (-sin t, cos t) solves the determining system for any
    // r and s (the alpha/beta couplings vanish).  Feeding it in as cubic
    // tables — the generic route, no closed-form node — must drive all
    // five condition defects to spline accuracy.  This is the positive
    // control showing condition_defects() itself is sound.
    const int n = 2801;
    std::vector<double> ts(n), sx(n), sy(n);
    for (int k = 0; k < n; ++k) {
        const double t = -0.2 + 1.4 * double(k) / double(n - 1);
        ts[size_t(k)] = t;
        sx[size_t(k)] = -std::sin(t);
        sy[size_t(k)] = std::cos(t);
    }
    PointGenerator g;
    g.name = "trig";
    g.xi_x = Profile::tabulated(ts, sx, Interp::Cubic);
    g.xi_y = Profile::tabulated(ts, sy, Interp::Cubic);

    const ConditionDefects d = condition_defects(g, base());
    const TimeDomain w{0.0, 0.6};
    CHECK(sup_prof(d.xi_x_cond, w, 129) < 1e-9);
    CHECK(sup_prof(d.xi_y_cond, w, 129) < 1e-9);
    CHECK(sup_prof(d.alpha_cond, w) == 0.0);
    CHECK(sup_prof(d.beta_cond, w) == 0.0);
    CHECK(sup_prof(d.gamma_cond, w) == 0.0);
}

TEST_CASE("overdamped sets reject the closed forms but admit exact exponentials") {
    // 4p - m q^2 = -5 < 0: no constant lambda, so the printed family is
    // unavailable...
    const CoefficientSet cs = coeffs(1.0, 3.0, 0.05, 0.02);
    CHECK_THROWS_AS((void)constant_generators(cs), OverdampedError);

    // ...yet exact exponential translation symmetries exist: xi_y = e^{nu t},
    // xi_x = m nu e^{nu t} with nu^2 + q nu + p/m = 0.
    const double root = std::sqrt(5.0);
    for (double nu : {(-3.0 + root) / 2.0, (-3.0 - root) / 2.0}) {
        PointGenerator g;
        g.name = "exact";
        g.xi_x = Profile::exponential(nu, nu);
        g.xi_y = Profile::exponential(1.0, nu);
        const ConditionDefects d = condition_defects(g, cs);
        CHECK(d.sup(TimeDomain{0.0, 1.0}) < 1e-13);
    }

    // The X1 shape becomes exact once the rate constant is the root of
    // q^2 - 4p/m instead: same defect formula, now vanishing.
    const double lam_true = root; // sqrt(q^2 - 4p/m) = sqrt(5)
    PointGenerator x1;
    x1.name = "X1-true";
    x1.xi_x = Profile::exponential(lam_true - 3.0, (lam_true - 3.0) / 2.0);
    x1.xi_y = Profile::exponential(2.0, (lam_true - 3.0) / 2.0);
    const ConditionDefects d = condition_defects(x1, cs);
    CHECK(d.sup(TimeDomain{0.0, 1.0}) < 1e-13);
}

TEST_CASE("pushing along an exact symmetry keeps the evolution residual small") {
    const CoefficientSet cs = coeffs(1.0, 3.0, 0.05, 0.02);
    const Grid2D grid =
        make_grid2d(make_grid1d(-6, 6, 101), make_grid1d(-6, 6, 101));
    GaussianSpec spec;
    const Field2D f0 = gaussian2d(grid, spec);
    SolverConfig cfg;
    cfg.dt = 0.002;
    cfg.t_end = 0.1;
    cfg.snapshot_stride = 10;
    const Trajectory2D traj = evolve(f0, cs, cfg);
    const double rbase = residual2d(traj);
    REQUIRE(rbase > 0.0);

    const double nu = (-3.0 + std::sqrt(5.0)) / 2.0;
    PointGenerator g;
    g.name = "exact";
    g.xi_x = Profile::exponential(nu, nu);
    g.xi_y = Profile::exponential(1.0, nu);
    const double rpush = residual2d(push_forward(g, 0.05, traj));
    CHECK(rpush <= 5.0 * rbase);
}

TEST_CASE("lie_bracket is antisymmetric") {
    const auto gens = constant_generators(damped());
    const PointGenerator ab = lie_bracket(gens[0], gens[4]);
    const PointGenerator ba = lie_bracket(gens[4], gens[0]);
    for (double t : {0.0, 0.3, 0.9}) {
        CHECK(ab.xi_x.eval(t) == doctest::Approx(-ba.xi_x.eval(t)));
        CHECK(ab.xi_y.eval(t) == doctest::Approx(-ba.xi_y.eval(t)));
        CHECK(ab.alpha.eval(t) == doctest::Approx(-ba.alpha.eval(t)));
        CHECK(ab.beta.eval(t) == doctest::Approx(-ba.beta.eval(t)));
        CHECK(ab.gamma.eval(t) == doctest::Approx(-ba.gamma.eval(t)));
    }
    CHECK(ab.xi_t == 0.0);
    CHECK(ba.xi_t == 0.0);
}

TEST_CASE("lie_bracket satisfies the Jacobi identity on random class members") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_real_distribution<double> rate(-1.0, 1.0);
    auto random_gen = [&]() {
        PointGenerator g;
        g.xi_t = rate(rng);
        g.xi_x = Profile::exponential(amp(rng), rate(rng));
        g.xi_y = Profile::exponential(amp(rng), rate(rng));
        g.alpha = Profile::exponential(amp(rng), rate(rng));
        g.beta = Profile::exponential(amp(rng), rate(rng));
        g.gamma = Profile::exponential(amp(rng), rate(rng));
        return g;
    };

    for (int trial = 0; trial < 4; ++trial) {
        const PointGenerator g1 = random_gen();
        const PointGenerator g2 = random_gen();
        const PointGenerator g3 = random_gen();
        const PointGenerator b1 = lie_bracket(g1, lie_bracket(g2, g3));
        const PointGenerator b2 = lie_bracket(g2, lie_bracket(g3, g1));
        const PointGenerator b3 = lie_bracket(g3, lie_bracket(g1, g2));
        CHECK(std::abs(b1.xi_t + b2.xi_t + b3.xi_t) <= 1e-12);
        for (int k = 0; k < 20; ++k) {
            const double t = -1.0 + 2.0 * double(k) / 19.0;
            auto sum3 = [&](const Profile& a, const Profile& b,
                            const Profile& cc) {
                return a.eval(t) + b.eval(t) + cc.eval(t);
            };
            CHECK(std::abs(sum3(b1.xi_x, b2.xi_x, b3.xi_x)) <= 1e-10);
            CHECK(std::abs(sum3(b1.xi_y, b2.xi_y, b3.xi_y)) <= 1e-10);
            CHECK(std::abs(sum3(b1.alpha, b2.alpha, b3.alpha)) <= 1e-10);
            CHECK(std::abs(sum3(b1.beta, b2.beta, b3.beta)) <= 1e-10);
            CHECK(std::abs(sum3(b1.gamma, b2.gamma, b3.gamma)) <= 1e-10);
        }
    }
}

TEST_CASE("time translation grades the closed-form family by its rates") {
    const CoefficientSet cs = damped();
    const double lam = lambda_const(cs), q = 0.2;
    const auto gens = constant_generators(cs);
    const double mu[4] = {(lam - q) / 2, -(lam + q) / 2, -(lam - q) / 2,
                          (lam + q) / 2};
    for (int k = 0; k < 4; ++k) {
        const PointGenerator b = lie_bracket(gens[0], gens[size_t(k + 2)]);
        const PointGenerator& x = gens[size_t(k + 2)];
        for (double t : {0.0, 0.4, 1.1}) {
            CHECK(b.xi_x.eval(t) ==
                  doctest::Approx(mu[k] * x.xi_x.eval(t)).epsilon(1e-12));
            CHECK(b.xi_y.eval(t) ==
                  doctest::Approx(mu[k] * x.xi_y.eval(t)).epsilon(1e-12));
            CHECK(std::abs(b.alpha.eval(t) - mu[k] * x.alpha.eval(t)) <=
                  1e-12 * std::max(1.0, std::abs(b.alpha.eval(t))));
            CHECK(std::abs(b.beta.eval(t) - mu[k] * x.beta.eval(t)) <=
                  1e-12 * std::max(1.0, std::abs(b.beta.eval(t))));
        }
    }
}

TEST_CASE("the bracket table closes on the span plus central directions") {
    const CoefficientSet cs = damped();
    const double lam = lambda_const(cs);
    const double m = 1.0, q = 0.2, r = 0.05, s = 0.02;
    const auto gens = constant_generators(cs);
    const TimeDomain w{0.0, 0.5};
    const AlgebraTable table = algebra_table(gens, w);
    REQUIRE(table.entries.size() == 15);
    REQUIRE(table.names.size() == 6);
    CHECK(table.names[2] == "X1");

    // [Y1, YZ] and every [YZ, Xi] vanish.
    CHECK(entry(table, 0, 1).is_zero);
    for (int j : {2, 3, 4, 5}) CHECK(entry(table, 1, j).is_zero);

    // [Y1, Xi] = mu_i Xi.
    const double mu[4] = {(lam - q) / 2, -(lam + q) / 2, -(lam - q) / 2,
                          (lam + q) / 2};
    for (int k = 0; k < 4; ++k) {
        const BracketEntry& e = entry(table, 0, k + 2);
        CHECK(e.in_span);
        CHECK_FALSE(e.is_central);
        CHECK(e.coeff[size_t(k + 2)] == doctest::Approx(mu[k]).epsilon(1e-9));
        for (int other = 0; other < 6; ++other)
            if (other != k + 2) CHECK(std::abs(e.coeff[size_t(other)]) <= 1e-8);
    }

    // Vanishing pairs among the X's.
    CHECK(entry(table, 2, 3).is_zero);
    CHECK(entry(table, 2, 5).is_zero);
    CHECK(entry(table, 3, 4).is_zero);

    // [X1, X3] and [X2, X4] are constant multiples of YZ.
    const BracketEntry& e13 = entry(table, 2, 4);
    CHECK(e13.in_span);
    CHECK_FALSE(e13.is_central);
    CHECK(e13.coeff[1] ==
          doctest::Approx(4 * m * m * q * lam * (lam - q)).epsilon(1e-9));
    const BracketEntry& e24 = entry(table, 3, 5);
    CHECK(e24.in_span);
    CHECK(e24.coeff[1] ==
          doctest::Approx(-4 * m * m * q * lam * (lam + q)).epsilon(1e-9));

    // [X3, X4] is central but genuinely time-dependent: the asymmetric
    // position components of X3/X4 leave 3(r + s q m) m^2 q (lam^2 - q^2)
    // e^{q t} Z d/dZ, which no constant multiple of YZ absorbs.
    const BracketEntry& e34 = entry(table, 4, 5);
    CHECK(e34.is_central);
    CHECK_FALSE(e34.in_span);
    CHECK_FALSE(e34.is_zero);
    CHECK(!e34.central_profile.empty());
    const double g34 = 3 * (r + s * q * m) * m * m * q * (lam * lam - q * q);
    for (double t : {0.0, 0.5})
        CHECK(e34.bracket.gamma.eval(t) ==
              doctest::Approx(g34 * std::exp(q * t)).epsilon(1e-10));

    // Every pair among {X1..X4} resolves into a pure Z d/dZ element: the
    // translation and scaling components of the bracket vanish identically.
    for (int i = 2; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            const BracketEntry& e = entry(table, i, j);
            CHECK((e.is_zero || e.in_span || e.is_central));
            for (double t : {0.0, 0.25, 0.5}) {
                CHECK(std::abs(e.bracket.xi_x.eval(t)) <= 1e-12);
                CHECK(std::abs(e.bracket.xi_y.eval(t)) <= 1e-12);
                CHECK(std::abs(e.bracket.alpha.eval(t)) <= 1e-12);
                CHECK(std::abs(e.bracket.beta.eval(t)) <= 1e-12);
            }
        }
    }

    CHECK(!format_algebra_table(table).empty());
}

TEST_CASE("all central brackets vanish when the damping q is zero") {
    const auto gens = constant_generators(base());
    const TimeDomain w{0.0, 0.5};
    const AlgebraTable table = algebra_table(gens, w);
    for (int i = 2; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            for (double t : {0.0, 0.25, 0.5})
                CHECK(std::abs(entry(table, i, j).bracket.gamma.eval(t)) <=
                      1e-12);
}

TEST_CASE("push_forward with eps = 0 returns the trajectory unchanged") {
    const Grid2D grid =
        make_grid2d(make_grid1d(-4, 4, 33), make_grid1d(-4, 4, 33));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.0));
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.1));

    const auto gens = constant_generators(base());
    const Trajectory2D out = push_forward(gens[2], 0.0, traj);
    REQUIRE(out.snapshots.size() == 2);
    for (size_t k = 0; k < 2; ++k) {
        CHECK(out.snapshots[k].t == traj.snapshots[k].t);
        for (size_t idx = 0; idx < traj.snapshots[k].values.size(); ++idx)
            CHECK(out.snapshots[k].values[idx] ==
                  traj.snapshots[k].values[idx]);
    }
}

TEST_CASE("the YZ flow is exact global rescaling by e^eps") {
    const Grid2D grid =
        make_grid2d(make_grid1d(-4, 4, 33), make_grid1d(-4, 4, 33));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.3));

    const auto gens = constant_generators(base());
    const double eps = 0.35;
    const Trajectory2D out = push_forward(gens[1], eps, traj);
    const double factor = std::exp(eps);
    for (size_t idx = 0; idx < traj.snapshots[0].values.size(); ++idx)
        CHECK(out.snapshots[0].values[idx] ==
              doctest::Approx(traj.snapshots[0].values[idx] * factor)
                  .epsilon(1e-15));
}

TEST_CASE("the time-translation flow restamps snapshots for constant sets") {
    const Grid2D grid =
        make_grid2d(make_grid1d(-4, 4, 33), make_grid1d(-4, 4, 33));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.0));
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.1));

    const auto gens = constant_generators(base());
    const double eps = 0.07;
    const Trajectory2D out = push_forward(gens[0], eps, traj);
    CHECK(out.snapshots[0].t == doctest::Approx(0.07).epsilon(1e-15));
    CHECK(out.snapshots[1].t == doctest::Approx(0.17).epsilon(1e-15));
    for (size_t idx = 0; idx < traj.snapshots[1].values.size(); ++idx)
        CHECK(out.snapshots[1].values[idx] == traj.snapshots[1].values[idx]);

    // Time translation only maps solutions to solutions when the
    // coefficients cannot drift: tabulated profiles never count as constant.
    Trajectory2D drift = traj;
    drift.cs = make_coefficients(
        1.0, 1.0, Profile::tabulated({-1.0, 5.0}, {1.0, 1.0}, Interp::Linear),
        c(0.0), c(0.05), c(0.02));
    CHECK_THROWS_AS((void)push_forward(gens[0], eps, drift),
                    NotConstantError);
}

TEST_CASE("spatial flows compose additively in eps") {
    const Grid2D grid =
        make_grid2d(make_grid1d(-6, 6, 161), make_grid1d(-6, 6, 161));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.3));

    const auto gens = constant_generators(base());
    const Trajectory2D two_step =
        push_forward(gens[2], 0.02, push_forward(gens[2], 0.03, traj));
    const Trajectory2D one_step = push_forward(gens[2], 0.05, traj);
    double worst = 0.0;
    for (size_t idx = 0; idx < one_step.snapshots[0].values.size(); ++idx)
        worst = std::max(worst,
                         std::abs(one_step.snapshots[0].values[idx] -
                                  two_step.snapshots[0].values[idx]));
    CHECK(worst < 1e-4);
}

TEST_CASE("flows refuse displacements beyond a tenth of the grid extent") {
    const Grid2D grid =
        make_grid2d(make_grid1d(-6, 6, 41), make_grid1d(-6, 6, 41));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.0));
    const auto gens = constant_generators(base());
    // xi_x(0) = 2, extent 12, cap 1.2: eps = 0.7 shifts by 1.4.
    CHECK_THROWS_AS((void)push_forward(gens[2], 0.7, traj), CoverageError);
}

TEST_CASE("generators mixing time translation with space are rejected") {
    const Grid2D grid =
        make_grid2d(make_grid1d(-4, 4, 33), make_grid1d(-4, 4, 33));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.0));
    PointGenerator mixed;
    mixed.name = "mixed";
    mixed.xi_t = 1.0;
    mixed.xi_x = c(1.0);
    CHECK_THROWS_AS((void)push_forward(mixed, 0.01, traj),
                    InvalidParameterError);
}

TEST_CASE("scale multiplies every component and reparametrizes the flow") {
    const auto gens = constant_generators(damped());
    const PointGenerator g2 = scale(2.5, gens[4]);
    for (double t : {0.0, 0.6}) {
        CHECK(g2.xi_x.eval(t) ==
              doctest::Approx(2.5 * gens[4].xi_x.eval(t)).epsilon(1e-15));
        CHECK(g2.alpha.eval(t) ==
              doctest::Approx(2.5 * gens[4].alpha.eval(t)).epsilon(1e-15));
        CHECK(g2.beta.eval(t) ==
              doctest::Approx(2.5 * gens[4].beta.eval(t)).epsilon(1e-15));
    }
    CHECK(scale(2.5, gens[0]).xi_t == 2.5);

    const Grid2D grid =
        make_grid2d(make_grid1d(-6, 6, 81), make_grid1d(-6, 6, 81));
    GaussianSpec spec;
    Trajectory2D traj;
    traj.cs = base();
    traj.snapshots.push_back(gaussian2d(grid, spec, 0.0));
    const Trajectory2D a = push_forward(scale(2.0, gens[2]), 0.01, traj);
    const Trajectory2D b = push_forward(gens[2], 0.02, traj);
    for (size_t idx = 0; idx < a.snapshots[0].values.size(); ++idx)
        CHECK(a.snapshots[0].values[idx] ==
              doctest::Approx(b.snapshots[0].values[idx]).epsilon(1e-14));
}
