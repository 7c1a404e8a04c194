#ifndef PDTN_GENERATORS_HPP
#define PDTN_GENERATORS_HPP

#include <cstdint>
#include <string>

#include "pdtn/graph.hpp"

namespace pdtn {

/// Default exponents baked into generated graphs (callers may override
/// at load/run time).
struct GeneratorParams {
    double p = 2.0;
    double Theta = 1.0;
};

/// Path on n >= 3 vertices: endpoints boundary, unit lengths and
/// measures, letter ids ("a", "b", ..., "aa", ...).
MetricMeasureGraph make_path(int n);

/// n x n unit square lattice, perimeter vertices boundary, unit measures,
/// ids "r<i>c<j>", positions included. Requires n >= 3 so that the
/// interior is nonempty.
MetricMeasureGraph make_grid(int n);

/// n x n lattice with the closed upper-right quadrant removed (an L).
/// Boundary = vertices with fewer than four surviving lattice neighbors.
/// Requires n >= 3 and odd so the notch is symmetric.
MetricMeasureGraph make_lshape(int n);

/// Koch-snowflake domain at refinement `level` >= 0: the polygonal
/// boundary (3 * 4^level vertices, segment length 3^{-level}) coupled to
/// a triangular interior lattice of spacing 3^{-level}. Interior measures
/// scale like the mesh area h^2, boundary measure like the segment count
/// 4^{-level}; the natural codimension is Theta = 2 - log 4 / log 3.
MetricMeasureGraph make_snowflake(int level);

/// Connected random graph: n vertices, a spanning tree plus extra edges
/// at density `extra_edge_fraction`, boundary_fraction of vertices marked
/// boundary (at least one boundary and, when n > 1, at least one
/// interior), lengths in [0.5, 1.5], measures in [0.5, 2]. Deterministic
/// in `seed`.
MetricMeasureGraph make_random_graph(int n, uint64_t seed, double boundary_fraction = 0.3,
                                     double extra_edge_fraction = 0.15);

/// Star with a planted codimension: an interior hub, `arms` interior
/// spokes, boundary leaves; hub mass chosen so the measured-ball fit over
/// radii {1, 2} returns exactly `Theta`.
MetricMeasureGraph make_codimension_star(double Theta, int arms = 3);

/// Dispatch by name: "path", "grid", "lshape", "snowflake". `size` is n
/// for the lattices and the refinement level for the snowflake.
MetricMeasureGraph make_named(const std::string& family, int size);

}  // namespace pdtn

#endif
