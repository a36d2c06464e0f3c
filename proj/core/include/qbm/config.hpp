#pragma once

// INI-style run configuration: [section] headers with key = value lines,
// full-line comments starting with '#' or ';'.  Parsing collects every
// violation (unknown keys, bad numbers, duplicates with both line numbers,
// missing required keys) and reports them all in one ConfigError instead of
// stopping at the first.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qbm/coefficients.hpp"
#include "qbm/fields.hpp"
#include "qbm/master_solver.hpp"
#include "qbm/reduction.hpp"

namespace qbm {

struct Violation {
    long line = 0; ///< 0 when no single line is at fault
    std::string key;
    std::string message;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

  private:
    std::vector<Violation> violations_;
};

/// Everything a CLI run needs.  Sections and defaults:
///   [coefficients] m=1 hbar=1 and either p,q,r,s or omega2,gamma,h,f
///                  (profile specs: const:<v>, exp:<rate>, table:<path>)
///   [grid]         x_min,x_max,x_n,y_min,y_max,y_n (required);
///                  w_min=-8 w_max=8 w_n=161
///   [solver]       dt,t_end (required); snapshot_stride=10 cfl_safety=0.4
///   [initial]      x0=0 y0=0 sx=1 sy=1 rho=0 amp=1
///   [output]       directory=out write_snapshots=true
///   [map]          mass=1 tau0_re=0 tau0_im=0 kind=plane-wave k=1 sigma0=1
///                  wave_amp=1
///   [reduced]      S,R,qt (optional; all three or none) u_sigma=1 u_amp=1
struct RunConfig {
    CoefficientSet cs;
    Grid2D grid{};
    Grid1D wgrid{-8.0, 8.0, 161};
    SolverConfig solver;
    GaussianSpec initial;
    std::string out_dir = "out";
    bool write_snapshots = true;

    double map_mass = 1.0;
    std::complex<double> tau0{0.0, 0.0};
    WaveParams wave;

    std::optional<ReducedCoefficients> user_reduced;
    double u_sigma = 1.0, u_amp = 1.0;
};

/// Parse and validate a configuration file.  Throws ConfigError carrying the
/// full violation list.  Relative table paths resolve against the config
/// file's directory.  When a key is duplicated the first occurrence wins and
/// the duplicate is reported.
RunConfig parse_config(const std::string& path);

} // namespace qbm
