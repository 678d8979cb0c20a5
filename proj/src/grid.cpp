#include "ptone/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptone {

namespace {

void fill_partition(RadialGrid* g) {
  const int n = g->cells;
  g->spacing = (g->hi - g->lo) / n;
  g->centers.resize(n);
  g->interfaces.resize(n + 1);
  for (int i = 0; i < n; ++i)
    g->centers[i] = g->lo + (i + 0.5) * g->spacing;
  for (int j = 0; j <= n; ++j) g->interfaces[j] = g->lo + j * g->spacing;
  g->interfaces[n] = g->hi;  // exact outer radius, no rounding drift
}

}  // namespace

RadialGrid build_grid(const WarpedModel& model, const RadialDomain& domain,
                      int cells) {
  if (cells < 2)
    throw std::invalid_argument("build_grid: need at least 2 cells, got " +
                                std::to_string(cells));
  model.check_domain(domain);
  RadialGrid g;
  g.lo = domain.inner();
  g.hi = domain.outer();
  g.cells = cells;
  g.inner_dirichlet = domain.kind == RadialDomain::Kind::annulus;
  g.tag = domain.describe();
  fill_partition(&g);
  g.center_weight.resize(cells);
  g.interface_weight.resize(cells + 1);
  for (int i = 0; i < cells; ++i) {
    g.center_weight[i] = sphere_area(model, g.centers[i]);
    if (!(g.center_weight[i] > 0.0))
      throw std::invalid_argument(
          "build_grid: nonpositive cell weight inside the domain (warp "
          "degenerate?)");
  }
  for (int j = 0; j <= cells; ++j)
    g.interface_weight[j] = sphere_area(model, g.interfaces[j]);
  for (int j = 1; j < cells; ++j) {
    if (!(g.interface_weight[j] > 0.0))
      throw std::invalid_argument(
          "build_grid: interior interface weight must be positive");
  }
  return g;
}

RadialGrid flat_interval_grid(double lo, double hi, int cells) {
  if (cells < 2)
    throw std::invalid_argument(
        "flat_interval_grid: need at least 2 cells, got " +
        std::to_string(cells));
  if (!(hi > lo))
    throw std::invalid_argument("flat_interval_grid: empty interval");
  RadialGrid g;
  g.lo = lo;
  g.hi = hi;
  g.cells = cells;
  g.inner_dirichlet = true;
  std::ostringstream os;
  os.precision(17);
  os << "interval(" << lo << "," << hi << ")";
  g.tag = os.str();
  fill_partition(&g);
  g.center_weight.assign(cells, 1.0);
  g.interface_weight.assign(cells + 1, 1.0);
  return g;
}

}  // namespace ptone
