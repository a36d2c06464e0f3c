#pragma once

// The Ermakov-Pinney equation
//
//   rho'' = omega2(T) rho + K / rho^3
//
// and its companion linear equation sigma'' = omega2(T) sigma, plus the
// nonlinear-superposition construction: for independent linear solutions
// sigma1, sigma2 with Wronskian W, the quadratic form
//
//   rho = sqrt(a sigma1^2 + 2 b sigma1 sigma2 + c sigma2^2)
//
// solves the nonlinear equation with K = (a c - b^2) W^2.  The well-known
// first integral ties this module to the third-order symmetry condition of
// the reduced equation: alpha = rho^2 satisfies
//   alpha alpha'' - alpha'^2 / 2 - 2 alpha^2 omega2 = 2 K
// for every solution, which is exactly the integrated form that condition
// takes (see reduction).

#include <vector>

#include "qbm/profile.hpp"

namespace qbm {

struct ErmakovProblem {
    Profile omega2;          ///< frequency-squared profile
    double K = 0.0;          ///< nonlinearity constant
    double rho0 = 1.0;       ///< rho(T0), must be > 0
    double drho0 = 0.0;      ///< rho'(T0)
    double rho_floor = 1e-8; ///< abort threshold before the 1/rho^3 pole
};

/// A sampled scalar ODE solution: uniform abscissae with values and first
/// derivatives per node.
struct SampledSolution {
    std::vector<double> t, value, deriv;
};

/// RK4 integration of the nonlinear equation on [t0, t1] with step dt
/// (which must divide the span).  Throws SingularityError with the failure
/// time if rho falls to rho_floor.
SampledSolution integrate_ep(const ErmakovProblem& prob, double t0, double t1,
                             double dt);

/// The companion linear equation solved for the canonical basis
/// sigma1(t0) = 1, sigma1'(t0) = 0 and sigma2(t0) = 0, sigma2'(t0) = 1,
/// so the Wronskian is exactly 1 at t0.  The Wronskian is monitored along
/// the way; drift beyond 1e-6 throws AccuracyError (step too large).
struct LinearBasis {
    SampledSolution sigma1, sigma2;
    double wronskian = 1.0;
};
LinearBasis linear_basis(const Profile& omega2, double t0, double t1,
                         double dt);

/// Quadratic-form superposition rho = sqrt(a s1^2 + 2b s1 s2 + c s2^2) with
/// its K = (ac - b^2) W^2.  Throws DomainError (with the location) if the
/// form stops being positive on the span.
struct PinneySolution {
    SampledSolution rho;
    double K = 0.0;
};
PinneySolution pinney_superposition(const LinearBasis& basis, double a,
                                    double b, double c);

/// Quadratic-form parameters reproducing given initial data: a = rho0^2,
/// b = rho0 drho0, c = (K + b^2) / a, so that K = ac - b^2 (unit Wronskian).
struct PinneyCoefficients {
    double a, b, c;
};
PinneyCoefficients pinney_match(double rho0, double drho0, double K);

/// alpha = rho^2 lifted sample-wise (alpha' = 2 rho rho').
SampledSolution alpha_from_rho(const SampledSolution& rho);

/// The first integral (rho sigma' - sigma rho')^2 + K (sigma/rho)^2 at one
/// sample index of two co-sampled solutions.
double ermakov_invariant(const SampledSolution& rho,
                         const SampledSolution& sigma, double K, size_t idx);

/// omega2 = R' + R^2, exact on the profile tree.
Profile omega2_from_R(const Profile& R);

} // namespace qbm
