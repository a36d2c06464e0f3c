#pragma once

// Coefficient handling for the phase-space master equation
//
//   Z_t = -(x/m) Z_y + p(t) y Z_x + q(t) (x Z)_x + r(t) Z_xx + s(t) Z_xy
//
// with x the momentum-like and y the position-like coordinate.  The four
// time profiles may be given directly or derived from physical inputs
// (frequency^2, damping rate, two bath kernels).

#include <string>

#include "qbm/profile.hpp"

namespace qbm {

struct CoefficientSet {
    double m = 1.0;     ///< mass, > 0
    double hbar = 1.0;  ///< action scale, > 0
    Profile p, q, r, s; ///< equation coefficients as functions of t

    /// Time interval on which all four profiles are defined.
    TimeDomain domain() const;

    /// Pointwise values (p, q, r, s) at time t.
    struct Values {
        double p, q, r, s;
    };
    Values eval(double t) const;

    /// True when all four profiles are structurally constant.
    bool is_constant() const;
};

/// Validated construction from direct profiles.
CoefficientSet make_coefficients(double m, double hbar, Profile p, Profile q,
                                 Profile r, Profile s);

/// Physical route: p = m*omega2, q = 2*gamma, r = hbar*m*gamma*h,
/// s = hbar*gamma*f.  Products of constant profiles fold to constants.
CoefficientSet from_physical(double m, double hbar, Profile omega2,
                             Profile gamma, Profile h, Profile f);

/// Discriminant root lambda = sqrt(4 p - m q^2) for constant coefficient
/// sets.  Throws NotConstantError for time-dependent profiles and
/// OverdampedError when 4 p - m q^2 <= 0.
double lambda_const(const CoefficientSet& cs);

/// Parse a profile declaration: "const:<value>", "exp:<rate>" (meaning
/// e^(rate*t)) or "table:<path>" (two-column text file).  `interp` applies
/// to the table form.  Relative table paths resolve against `base_dir`.
Profile parse_profile_spec(const std::string& spec, const std::string& base_dir,
                           Interp interp = Interp::Cubic);

} // namespace qbm
