#pragma once

// Error taxonomy for the library.  Every contract violation throws a subclass
// of Error so callers (and the CLI exit-code mapping) can distinguish
// "you held the API wrong" from runtime failures of the mathematics.

#include <stdexcept>
#include <string>

namespace qbm {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A scalar or structured argument violates a precondition.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside a profile's declared time domain, or a
/// sample point outside a grid.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operation that requires constant coefficient profiles was given a
/// time-dependent one.
class NotConstantError : public Error {
public:
    using Error::Error;
};

/// 4p - m q^2 <= 0: the constant-coefficient generator family needs a real,
/// strictly positive discriminant.
class OverdampedError : public Error {
public:
    using Error::Error;
};

/// Grid construction/consistency violations (too few nodes, reversed bounds,
/// mismatched grids between fields).
class InvalidGridError : public Error {
public:
    using Error::Error;
};

/// Requested time step exceeds the admissible explicit-stability step.
class StepSizeError : public Error {
public:
    StepSizeError(const std::string& msg, double admissible)
        : Error(msg), admissible_dt(admissible) {}
    double admissible_dt;
};

/// A field stopped being finite during evolution.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& msg, double when) : Error(msg), t(when) {}
    double t;
};

/// Trajectory-level contract violations (ordering, shared grid, uniform
/// snapshot spacing where required).
class InvalidTrajectoryError : public Error {
public:
    using Error::Error;
};

/// Text input (config file, profile table, CSV field file) failed to parse;
/// carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line_no = -1)
        : Error(msg), line(line_no) {}
    long line;
};

/// Interpolation/pull-back would leave the stored data region.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// lambda == q (or another degeneracy) makes the group-invariant reduction
/// undefined.
class DegenerateReductionError : public Error {
public:
    using Error::Error;
};

/// Negative diffusion coefficient: the reduced equation would be solved in
/// its ill-posed direction.
class IllPosedError : public Error {
public:
    using Error::Error;
};

/// A quantity that must be strictly monotone (rescaled time) is not.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

/// An ODE solution reached a singular point (rho hit the floor, focal point
/// of a wave family); carries the failure time.
class SingularityError : public Error {
public:
    SingularityError(const std::string& msg, double when) : Error(msg), t(when) {}
    double t;
};

/// Numerical self-check failed (e.g. Wronskian drift in the linear basis).
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// The map to the free Schroedinger picture is not defined for these inputs.
class InvalidMapError : public Error {
public:
    using Error::Error;
};

/// lambda + q == 0: the time reparametrization of the map degenerates.
class DegenerateMapError : public Error {
public:
    using Error::Error;
};

} // namespace qbm
