#pragma once

#include <string>
#include <vector>

#include "ptone/geometry.hpp"

namespace ptone {

// Cell-centered finite-volume grid on [lo, hi] with uniform spacing.
// Cell centers sit at lo + (i+1/2)h; interfaces at lo + j h. Weights are
// sphere areas evaluated at those radii (or 1 on flat interval grids).
//
// Boundary convention, pinned by the discrete energy: Dirichlet ends take a
// ghost cell value 0 one spacing outside; the pole end of a ball carries no
// flux term at all (its interface weight is S(0) = 0 on pole models).
struct RadialGrid {
  double lo = 0.0;
  double hi = 0.0;
  double spacing = 0.0;
  int cells = 0;
  bool inner_dirichlet = true;  // false: no-flux pole end (ball grids)

  std::vector<double> centers;           // size cells
  std::vector<double> interfaces;        // size cells + 1
  std::vector<double> center_weight;     // S at centers
  std::vector<double> interface_weight;  // S at interfaces

  std::string tag;  // human-readable domain descriptor
};

// Grid over a model domain. Ball grids get a no-flux inner end; annulus
// grids are Dirichlet at both ends. Throws std::invalid_argument for
// domains that do not fit the model or cells < 2.
RadialGrid build_grid(const WarpedModel& model, const RadialDomain& domain,
                      int cells);

// Unit-weight grid on (lo, hi) with Dirichlet ghosts at both ends; the
// 1D interval problem used by the flat benchmarks.
RadialGrid flat_interval_grid(double lo, double hi, int cells);

// Cell values over a grid. The grid must outlive the function.
struct RadialFunction {
  const RadialGrid* grid = nullptr;
  std::vector<double> values;

  RadialFunction() = default;
  explicit RadialFunction(const RadialGrid& g, double fill = 0.0)
      : grid(&g), values(static_cast<size_t>(g.cells), fill) {}
};

}  // namespace ptone
