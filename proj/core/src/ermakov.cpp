#include "qbm/ermakov.hpp"

#include <cmath>
#include <cstdio>

namespace qbm {

namespace {

long long step_count(double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw InvalidParameterError("integration needs dt > 0");
    if (!(t1 > t0)) throw InvalidParameterError("integration needs t1 > t0");
    const long long n = std::llround((t1 - t0) / dt);
    if (n < 1 || std::abs(double(n) * dt - (t1 - t0)) >
                     1e-9 * std::max(1.0, std::abs(t1 - t0)))
        throw InvalidParameterError("dt must divide t1 - t0 evenly");
    return n;
}

struct State2 {
    double u, v;
};

// One RK4 step of u' = v, v' = acc(t, u).
template <class Acc>
State2 rk4_second_order(const State2& s, double t, double dt, Acc&& acc) {
    auto f = [&](double tt, const State2& st) {
        return State2{st.v, acc(tt, st.u)};
    };
    const State2 k1 = f(t, s);
    const State2 k2 = f(t + dt / 2, {s.u + dt / 2 * k1.u, s.v + dt / 2 * k1.v});
    const State2 k3 = f(t + dt / 2, {s.u + dt / 2 * k2.u, s.v + dt / 2 * k2.v});
    const State2 k4 = f(t + dt, {s.u + dt * k3.u, s.v + dt * k3.v});
    return {s.u + dt / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
            s.v + dt / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

} // namespace

SampledSolution integrate_ep(const ErmakovProblem& prob, double t0, double t1,
                             double dt) {
    if (!(prob.rho0 > 0.0))
        throw InvalidParameterError("Ermakov data needs rho0 > 0");
    const long long n = step_count(t0, t1, dt);

    auto acc = [&](double t, double rho) {
        if (rho < prob.rho_floor)
            throw SingularityError(
                "rho reached the floor in the 1/rho^3 nonlinearity", t);
        return prob.omega2.eval(t) * rho + prob.K / (rho * rho * rho);
    };

    SampledSolution out;
    out.t.reserve(size_t(n) + 1);
    out.value.reserve(size_t(n) + 1);
    out.deriv.reserve(size_t(n) + 1);

    State2 s{prob.rho0, prob.drho0};
    out.t.push_back(t0);
    out.value.push_back(s.u);
    out.deriv.push_back(s.v);
    for (long long k = 0; k < n; ++k) {
        const double t = t0 + double(k) * dt;
        s = rk4_second_order(s, t, dt, acc);
        if (s.u < prob.rho_floor)
            throw SingularityError(
                "rho reached the floor in the 1/rho^3 nonlinearity",
                t0 + double(k + 1) * dt);
        out.t.push_back(t0 + double(k + 1) * dt);
        out.value.push_back(s.u);
        out.deriv.push_back(s.v);
    }
    return out;
}

LinearBasis linear_basis(const Profile& omega2, double t0, double t1,
                         double dt) {
    const long long n = step_count(t0, t1, dt);
    auto acc = [&](double t, double u) { return omega2.eval(t) * u; };

    LinearBasis out;
    State2 s1{1.0, 0.0}, s2{0.0, 1.0};
    auto store = [](SampledSolution& dst, double t, const State2& s) {
        dst.t.push_back(t);
        dst.value.push_back(s.u);
        dst.deriv.push_back(s.v);
    };
    store(out.sigma1, t0, s1);
    store(out.sigma2, t0, s2);
    for (long long k = 0; k < n; ++k) {
        const double t = t0 + double(k) * dt;
        s1 = rk4_second_order(s1, t, dt, acc);
        s2 = rk4_second_order(s2, t, dt, acc);
        const double tk = t0 + double(k + 1) * dt;
        store(out.sigma1, tk, s1);
        store(out.sigma2, tk, s2);
        const double w = s1.u * s2.v - s2.u * s1.v;
        if (std::abs(w - 1.0) > 1e-6) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "Wronskian drifted to %.12g at t = %.6g; "
                          "reduce the step size",
                          w, tk);
            throw AccuracyError(buf);
        }
    }
    out.wronskian = 1.0;
    return out;
}

PinneySolution pinney_superposition(const LinearBasis& basis, double a,
                                    double b, double c) {
    const auto& s1 = basis.sigma1;
    const auto& s2 = basis.sigma2;
    if (s1.t.size() != s2.t.size() || s1.t.empty())
        throw InvalidParameterError("basis solutions must share their samples");

    PinneySolution out;
    out.K = (a * c - b * b) * basis.wronskian * basis.wronskian;
    const size_t n = s1.t.size();
    out.rho.t = s1.t;
    out.rho.value.resize(n);
    out.rho.deriv.resize(n);
    for (size_t k = 0; k < n; ++k) {
        const double u1 = s1.value[k], u2 = s2.value[k];
        const double form = a * u1 * u1 + 2.0 * b * u1 * u2 + c * u2 * u2;
        if (!(form > 0.0)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "superposition form became nonpositive (%.12g) "
                          "at t = %.6g",
                          form, s1.t[k]);
            throw DomainError(buf);
        }
        const double rho = std::sqrt(form);
        out.rho.value[k] = rho;
        out.rho.deriv[k] = (a * u1 * s1.deriv[k] +
                            b * (s1.deriv[k] * u2 + u1 * s2.deriv[k]) +
                            c * u2 * s2.deriv[k]) /
                           rho;
    }
    return out;
}

PinneyCoefficients pinney_match(double rho0, double drho0, double K) {
    if (!(rho0 > 0.0))
        throw InvalidParameterError("matching needs rho0 > 0");
    PinneyCoefficients pc;
    pc.a = rho0 * rho0;
    pc.b = rho0 * drho0;
    pc.c = (K + pc.b * pc.b) / pc.a;
    return pc;
}

SampledSolution alpha_from_rho(const SampledSolution& rho) {
    SampledSolution out;
    out.t = rho.t;
    out.value.resize(rho.value.size());
    out.deriv.resize(rho.value.size());
    for (size_t k = 0; k < rho.value.size(); ++k) {
        if (!(rho.value[k] > 0.0))
            throw InvalidParameterError("alpha lift needs rho > 0 throughout");
        out.value[k] = rho.value[k] * rho.value[k];
        out.deriv[k] = 2.0 * rho.value[k] * rho.deriv[k];
    }
    return out;
}

double ermakov_invariant(const SampledSolution& rho,
                         const SampledSolution& sigma, double K, size_t idx) {
    const double cross =
        rho.value[idx] * sigma.deriv[idx] - sigma.value[idx] * rho.deriv[idx];
    const double ratio = sigma.value[idx] / rho.value[idx];
    return cross * cross + K * ratio * ratio;
}

Profile omega2_from_R(const Profile& R) { return R.derivative() + R * R; }

} // namespace qbm
