#pragma once

// Piecewise-linear conforming elements on triangulations: tensor meshes on
// rectangles (graded lines welcome), mapped strips over a collar chart, and
// uniform midpoint refinement.  The trace edge list marks the boundary piece
// carrying a line integral; every other boundary node is clamped.

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "calibra/common.hpp"
#include "calibra/curve_geometry.hpp"

namespace calibra {

struct TriMesh {
    std::vector<Vec2> node;
    std::vector<std::array<int, 3>> tri;
    std::vector<std::array<int, 2>> trace;  // edges carrying the boundary term
    std::vector<std::uint8_t> fixed;        // essential condition per node
    double h = 0.0;                         // longest edge
};

// Rectangle spanned by the given coordinate lines; trace on the part of the
// bottom edge between trace_lo and trace_hi, clamped elsewhere on the
// boundary.  Grading happens through the spacing of xs and ys.
TriMesh tensor_mesh(const std::vector<double>& xs, const std::vector<double>& ys,
                    double trace_lo, double trace_hi);

// Uniform a x b rectangle, trace on the whole bottom edge.
TriMesh rect_mesh(double a, double b, int nx, int ny);

// One side of the collar: image of [xi_lo - pad, xi_hi + pad] x [0, height]
// under the chart map (side -1 mirrors to eta < 0).  The trace covers the
// curve itself; padded bottom pieces are clamped like the rest.
TriMesh strip_mesh(const CurveChart& chart, int side, double height, int nx,
                   int ny, double pad = 0.0);

// Midpoint split of every triangle.  Clamping propagates to the midpoint of
// a boundary edge with both ends clamped; trace edges split in place.
TriMesh refined(const TriMesh& mesh);

// Stiffness over the elements and mass over the trace edges, all nodes
// (essential conditions are applied by whoever solves).  The element loop
// runs in fixed per-thread index ranges merged in thread order, so parallel
// assembly reproduces the serial reference exactly.
enum class Assembly { Serial, Parallel };

struct FemSystem {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> trace_mass;
};

FemSystem assemble(const TriMesh& mesh, Assembly mode = Assembly::Parallel);
// Explicit split count; the determinism test compares different counts.
FemSystem assemble(const TriMesh& mesh, int threads);

// Rows and columns of m at indices with free_id >= 0, in that numbering.
Eigen::SparseMatrix<double> restricted(const Eigen::SparseMatrix<double>& m,
                                       const std::vector<int>& free_id,
                                       int n_free);

// Harmonic extension of the pinned values: boundary[i] is imposed wherever
// fixed[i] is set, every free node gets the discrete Laplace equation (so
// free boundary pieces carry the natural condition).
std::vector<double> harmonic_fill(const TriMesh& mesh,
                                  const std::vector<double>& boundary,
                                  Assembly mode = Assembly::Parallel);

// Dirichlet energy of a nodal field, accumulated element by element without
// the assembled matrix; cross-checks eigenvalue and solver output.
double element_energy(const TriMesh& mesh, const std::vector<double>& v);

// Trace line integral of v^2.
double trace_mass_norm(const TriMesh& mesh, const std::vector<double>& v);

}  // namespace calibra
