#pragma once

// Time profiles: scalar functions of t used for equation coefficients and
// for the time-dependent parts of point generators.
//
// A Profile is an immutable expression tree over a small closed set of node
// kinds: constants, exponentials amp*e^(rate*t), piecewise polynomials
// (tabulated data after spline/linear fitting), sums and products.  The set
// is closed under differentiation and pointwise algebra, which is what the
// structural Lie-bracket computation needs: derivatives of analytic nodes
// are exact, derivatives of tabulated nodes are the exact derivatives of the
// fitted piecewise polynomial.

#include <memory>
#include <string>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

/// Closed time interval.  Analytic profiles report the widest representable
/// interval; tabulated ones report their sample range.
struct TimeDomain {
    double t_min;
    double t_max;

    static TimeDomain all();
    bool contains(double t) const;
    TimeDomain intersect(const TimeDomain& other) const;
    bool empty() const { return !(t_min <= t_max); }
};

/// Interpolation rule for tabulated profiles.
enum class Interp { Cubic, Linear };

class Profile {
public:
    /// Default-constructed profile is the constant 0.
    Profile();

    static Profile constant(double v);
    /// amp * e^(rate * t)
    static Profile exponential(double amp, double rate);
    /// Fit tabulated samples; Cubic uses a natural cubic spline, Linear a
    /// polyline.  Needs >= 2 strictly increasing abscissae.
    static Profile tabulated(const std::vector<double>& t,
                             const std::vector<double>& v,
                             Interp interp = Interp::Cubic);

    double eval(double t) const;
    double operator()(double t) const { return eval(t); }

    /// Exact derivative of this expression (spline pieces differentiate to
    /// lower-degree pieces; analytic nodes differentiate analytically).
    Profile derivative() const;

    TimeDomain domain() const;

    /// Structurally constant (after the constant folding the factories do).
    bool is_constant() const;
    /// Value of a structurally constant profile; throws NotConstantError.
    double constant_value() const;

    /// Human-readable rendering for reports and tables.
    std::string to_string() const;

    friend Profile operator+(const Profile& a, const Profile& b);
    friend Profile operator-(const Profile& a, const Profile& b);
    friend Profile operator*(const Profile& a, const Profile& b);
    friend Profile operator*(double c, const Profile& p);

    struct Node; // implementation detail, defined in profile.cpp

private:
    explicit Profile(std::shared_ptr<const Node> n);
    std::shared_ptr<const Node> node_;
};

} // namespace qbm
