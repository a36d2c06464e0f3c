#pragma once

// Lie point symmetries of the master equation, restricted to the closed class
//
//   X = xi_t * d/dt + xi_x(t) d/dx + xi_y(t) d/dy
//       + (alpha(t) x + beta(t) y + gamma(t)) Z d/dZ
//
// with constant xi_t.  The class contains every generator this library works
// with, it is closed under the Lie bracket, and brackets evaluate exactly on
// the profile expression trees (no finite differencing of fields).
//
// A generator of this class is an exact symmetry of the equation
//   Z_t = -(x/m) Z_y + p y Z_x + q (x Z)_x + r Z_xx + s Z_xy
// if and only if the five determining conditions hold:
//
//   alpha' = q alpha - beta / m
//   beta'  = p alpha
//   gamma' = 0
//   xi_x'  = -q xi_x - p xi_y - 2 r alpha - s beta
//   xi_y'  =  xi_x / m - s alpha
//
// (derived by requiring the first variation -xi_x Z_x - xi_y Z_y
//  + (alpha x + beta y + gamma) Z to solve the equation whenever Z
//  solves it).  condition_defects() evaluates the five left-minus-
//  right profiles so callers can measure exactly how far any generator —
//  including the tabulated constant-coefficient family — is from being a
//  symmetry.

#include <array>
#include <string>
#include <vector>

#include "qbm/coefficients.hpp"
#include "qbm/master_solver.hpp"
#include "qbm/profile.hpp"

namespace qbm {

struct PointGenerator {
    std::string name;   ///< label used by tables and reports
    double xi_t = 0.0;  ///< constant time-translation component
    Profile xi_x, xi_y; ///< momentum / position translation profiles
    Profile alpha, beta, gamma; ///< Z d/dZ part: (alpha x + beta y + gamma) Z
};

/// Scale every component by c (flows of c*X at eps equal flows of X at c*eps).
PointGenerator scale(double c, const PointGenerator& g);

/// The six closed-form generators attached to a constant-coefficient set,
/// in the order {Y1, YZ, X1, X2, X3, X4}:
///
///   Y1 = d/dt
///   YZ = Z d/dZ
///   X1 = e^((L-q)t/2) [ m(L-q) d/dx + 2 d/dy ]
///   X2 = e^(-(L+q)t/2)[ m(L+q) d/dx - 2 d/dy ]
///   X3 = e^(-(L-q)t/2)[ 2rm(q-L) d/dx + 4(r+sqm) d/dy
///                       + (2mq(L-q) x + m^2 q(L^2-q^2) y) Z d/dZ ]
///   X4 = e^((L+q)t/2) [ 2rm(L+q) d/dx + (r+sqm) d/dy
///                       + (-2mq(L+q) x + m^2 q(L^2-q^2) y) Z d/dZ ]
///
/// where L = lambda_const(cs) = sqrt(4p - m q^2).  The components are
/// transcribed literally; whether each generator actually satisfies the
/// determining conditions is a separate, measurable question — see
/// condition_defects() and the flow-residual checks.
std::vector<PointGenerator> constant_generators(const CoefficientSet& cs);

/// Left-minus-right profiles of the five determining conditions for g
/// against cs.  All identically zero iff g is an exact symmetry.
struct ConditionDefects {
    Profile alpha_cond;  ///< alpha' - q alpha + beta/m
    Profile beta_cond;   ///< beta' - p alpha
    Profile gamma_cond;  ///< gamma'
    Profile xi_x_cond;   ///< xi_x' + q xi_x + p xi_y + 2 r alpha + s beta
    Profile xi_y_cond;   ///< xi_y' - xi_x/m + s alpha

    /// Largest |defect| over `nsamples` equispaced times in `window`.
    double sup(const TimeDomain& window, int nsamples = 65) const;
};
ConditionDefects condition_defects(const PointGenerator& g,
                                   const CoefficientSet& cs);

/// Commutator [g1, g2], exact on the class:
///   xi_t  -> 0
///   xi_x  -> xi_t1 xi_x2' - xi_t2 xi_x1'
///   xi_y  -> xi_t1 xi_y2' - xi_t2 xi_y1'
///   alpha -> xi_t1 alpha2' - xi_t2 alpha1'
///   beta  -> xi_t1 beta2'  - xi_t2 beta1'
///   gamma -> xi_t1 gamma2' - xi_t2 gamma1'
///            + xi_x1 alpha2 - xi_x2 alpha1 + xi_y1 beta2 - xi_y2 beta1
PointGenerator lie_bracket(const PointGenerator& g1, const PointGenerator& g2);

/// One-parameter flow of g applied to every snapshot of a trajectory.
///
/// Pure time translation (xi_t != 0, everything else zero): snapshots are
/// re-stamped t -> t + eps*xi_t, which maps solutions to solutions only for
/// constant coefficients (NotConstantError otherwise).
///
/// Spatial/scaling generators (xi_t == 0): at each time
///   Z~(t, x, y) = Z(t, x', y') * exp( eps*(alpha x' + beta y' + gamma)
///                                   + eps^2*(alpha xi_x + beta xi_y)/2 )
/// with the pulled-back point x' = x - eps*xi_x(t), y' = y - eps*xi_y(t)
/// evaluated by cubic interpolation; pull-backs outside the grid read the
/// far-field value 0.  The displacement is capped at 10% of each grid extent;
/// beyond the cap a CoverageError names the extent the grid would need.
///
/// Generators mixing xi_t with other components are rejected
/// (InvalidParameterError): no printed generator needs them.
Trajectory2D push_forward(const PointGenerator& g, double eps,
                          const Trajectory2D& traj);

/// How one bracket decomposes over the input set.
struct BracketEntry {
    int i = 0, j = 0;            ///< [gens[i], gens[j]], i < j
    PointGenerator bracket;      ///< the commutator itself
    bool is_zero = false;        ///< every component vanishes identically
    bool in_span = false;        ///< bracket = sum coeff[k] * gens[k]
    bool is_central = false;     ///< xi/alpha/beta parts vanish; only a
                                 ///< gamma(t) Z d/dZ remainder survives
    std::vector<double> coeff;   ///< span coefficients (one per input)
    std::string central_profile; ///< rendering of the gamma remainder
};

struct AlgebraTable {
    std::vector<std::string> names;
    std::vector<BracketEntry> entries; ///< all pairs i < j
};

/// Decompose every pairwise bracket over the input generators plus the
/// central directions gamma(t) Z d/dZ.  Span coefficients come from a
/// least-squares match of the non-central components (xi_t, xi_x, xi_y,
/// alpha, beta) at `nsamples` times in `window`; pure-central inputs (YZ)
/// join through the gamma component.  Brackets outside both are reported
/// with all flags false (unresolved), never as an error.
AlgebraTable algebra_table(const std::vector<PointGenerator>& gens,
                           const TimeDomain& window, int nsamples = 21);

/// Aligned text rendering of an algebra table.
std::string format_algebra_table(const AlgebraTable& table);

} // namespace qbm
