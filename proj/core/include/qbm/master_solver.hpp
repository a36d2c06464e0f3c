#pragma once

// Explicit finite-difference evolution of the 2-D master equation
//
//   Z_t = -(x/m) Z_y + p(t) y Z_x + q(t) (x Z)_x + r(t) Z_xx + s(t) Z_xy
//
// Method of lines: second-order centered stencils in space ((x Z)_x expanded
// as Z + x Z_x, Z_xy by the 4-point cross stencil), classical RK4 in time,
// homogeneous Dirichlet values held on the boundary ring.

#include <vector>

#include "qbm/coefficients.hpp"
#include "qbm/fields.hpp"

namespace qbm {

struct SolverConfig {
    double dt = 0.0;        ///< time step, > 0 (0 allowed only for step())
    double t_end = 0.0;     ///< final time for evolve()
    int snapshot_stride = 10; ///< store every this many steps
    double cfl_safety = 0.4;  ///< fraction of the stability limit allowed
};

/// Snapshot sequence on a shared grid with strictly increasing times.
struct Trajectory2D {
    std::vector<Field2D> snapshots;
    CoefficientSet cs;
};

/// Right-hand side of the method-of-lines system at time t.  Boundary ring
/// entries are zero (Dirichlet data never moves).
Field2D spatial_rhs(const Field2D& f, const CoefficientSet& cs, double t);

/// Largest stable explicit step at time t: cfl_safety times the minimum of
/// the standard per-term limits (advection h/|c|, diffusion h^2/(2|c|),
/// cross-diffusion hx*hy/(2|c|), reaction 1/|c|) with coefficient magnitudes
/// bounded over the grid.
double admissible_dt(const Grid2D& grid, const CoefficientSet& cs, double t,
                     double cfl_safety);

/// One RK4 step.  dt = 0 returns the field unchanged.  Throws StepSizeError
/// when dt exceeds the admissible step.
Field2D step(const Field2D& f, const CoefficientSet& cs, double dt,
             double cfl_safety = 0.4);

/// March from f0.t to cfg.t_end in steps of cfg.dt (which must divide the
/// span), storing every cfg.snapshot_stride-th field plus the final one.
/// Throws BlowUpError (with the offending time) if values stop being finite.
Trajectory2D evolve(const Field2D& f0, const CoefficientSet& cs,
                    const SolverConfig& cfg);

/// Max |Z_t - rhs| over interior nodes and interior snapshot times, with Z_t
/// from centered differences across snapshots.  Requires >= 3 uniformly
/// spaced snapshots.
double residual2d(const Trajectory2D& traj);

/// Longest prefix of the trajectory with uniform snapshot spacing (evolve
/// appends the final field even when the step count is not a multiple of the
/// stride; residual checks use this view).
Trajectory2D uniform_prefix(const Trajectory2D& traj);

/// The first and second moments <x^a y^b Z> close under the equation.
/// Obtained by multiplying by 1, x, y, x^2, xy, y^2 and integrating by parts
/// under decay:
///   m0'  = 0
///   mx'  = -p my - q mx
///   my'  = mx / m
///   mxx' = -2p mxy - 2q mxx + 2r m0
///   mxy' = mxx/m - p myy - q mxy + s m0
///   myy' = 2 mxy / m
struct Moments {
    double m0 = 0, mx = 0, my = 0, mxx = 0, mxy = 0, myy = 0;
};

/// Grid moments of a field by trapezoidal quadrature.
Moments field_moments(const Field2D& f);

/// RK4 integration of the moment system from `init` at t0 to t1.
Moments moment_oracle(const Moments& init, const CoefficientSet& cs, double t0,
                      double t1, double dt);

} // namespace qbm
