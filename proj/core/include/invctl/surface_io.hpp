#pragma once

#include <iosfwd>
#include <string>

#include "invctl/solver.hpp"

namespace invctl {

// Binary surface file: ASCII tag "IVSURF01", header int64s
// (m, R, Pbar, k, n_T) and float64 dt, followed by the stand-alone scalars
// (T, h, zeta, rho, salvage_fraction, censored, allow_sellback, residual) and
// the row-major [slice][node][inventory] float64 arrays U, MU, U0, act, d.
// Everything little-endian.
void save_surface(const ValueSurface& surface, const std::string& path);
ValueSurface load_surface(const std::string& path);

// CSV dump with columns (T_rem, pi_1..pi_m, a, U, MU, act, d).
void write_surface_csv(std::ostream& out, const ValueSurface& surface, const BeliefGrid& grid);
void export_surface_csv(const ValueSurface& surface, const BeliefGrid& grid,
                        const std::string& path);

}  // namespace invctl
