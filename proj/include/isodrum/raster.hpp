#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "isodrum/error.hpp"
#include "isodrum/geometry.hpp"

namespace isodrum {

// Uniform-lattice interior mask of an assembly at mesh size h.  Nodes sit at
// origin + (ix, iy, iz) * h; a node is interior when it lies inside the
// closed union of tiles and off every boundary or slit face.  Equation
// indices enumerate interior nodes in lexicographic (x, y, z) order.
struct RasterDomain {
  int dimension = 0;
  double h = 0.0;
  Point3 origin = Point3::Zero();
  std::array<int, 3> extents = {0, 0, 0};  // node counts per axis; nz = 1 in 2D
  std::vector<char> interior_mask;         // size nx*ny*nz
  std::vector<int> index_map;              // node -> equation index, -1 outside
  std::vector<std::array<int, 3>> nodes;   // equation index -> lattice coords
  int n_interior = 0;
  bool off_lattice = false;  // vertices did not align with the h-lattice

  int node_id(int ix, int iy, int iz) const {
    return (ix * extents[1] + iy) * extents[2] + iz;
  }
  bool in_bounds(int ix, int iy, int iz) const {
    return ix >= 0 && ix < extents[0] && iy >= 0 && iy < extents[1] && iz >= 0 &&
           iz < extents[2];
  }
  bool is_interior(int ix, int iy, int iz) const {
    return in_bounds(ix, iy, iz) && interior_mask[node_id(ix, iy, iz)] != 0;
  }
  Point3 node_point(const std::array<int, 3>& n) const {
    return origin + h * Point3(n[0], n[1], n[2]);
  }
};

// Symmetric sparse Dirichlet Laplacian: 5-point (2D) or 7-point (3D) stencil,
// diagonal 2d/h^2, off-diagonal -1/h^2 per lattice-adjacent interior pair.
struct DiscreteLaplacian {
  Eigen::SparseMatrix<double> op;
  int dimension = 0;
  double h = 0.0;
};

namespace detail {

// Convex-cell membership tests.  Each tile is stored as its face list plus a
// reference orientation sign per face; integral inputs use exact long long
// predicates, everything else falls back to kGeomEps comparisons.
struct RasterFace {
  std::vector<Point3> pts;                     // transformed face vertices
  std::vector<std::array<long long, 3>> ipts;  // lattice-scaled, integer mode
  int ref_sign = 0;  // orientation of the tile interior w.r.t. this face
};

struct RasterCell {
  std::vector<RasterFace> faces;
  Point3 lo = Point3::Zero(), hi = Point3::Zero();
};

inline long long iorient3(const std::array<long long, 3>& a,
                          const std::array<long long, 3>& b,
                          const std::array<long long, 3>& c,
                          const std::array<long long, 3>& p) {
  long long u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  long long v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  long long w[3] = {p[0] - a[0], p[1] - a[1], p[2] - a[2]};
  long long det = u[0] * (v[1] * w[2] - v[2] * w[1]) -
                  u[1] * (v[0] * w[2] - v[2] * w[0]) +
                  u[2] * (v[0] * w[1] - v[1] * w[0]);
  return det;
}

inline long long icross2(const std::array<long long, 3>& a,
                         const std::array<long long, 3>& b,
                         const std::array<long long, 3>& p) {
  return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
}

inline double forient3(const Point3& a, const Point3& b, const Point3& c,
                       const Point3& p) {
  return (b - a).cross(c - a).dot(p - a);
}

// Signed side of p relative to the face plane (3D) or edge line (2D):
// +1 / -1 / 0, exact in integer mode.
inline int face_side_int(const RasterFace& f, const std::array<long long, 3>& p,
                         int dim) {
  long long s = dim == 3 ? iorient3(f.ipts[0], f.ipts[1], f.ipts[2], p)
                         : icross2(f.ipts[0], f.ipts[1], p);
  return (s > 0) - (s < 0);
}

inline int face_side_float(const RasterFace& f, const Point3& p, int dim) {
  if (dim == 3) {
    Point3 n = (f.pts[1] - f.pts[0]).cross(f.pts[2] - f.pts[0]);
    double s = n.normalized().dot(p - f.pts[0]);
    return (s > kGeomEps) - (s < -kGeomEps);
  }
  Point3 d = f.pts[1] - f.pts[0];
  double s = (d.x() * (p.y() - f.pts[0].y()) - d.y() * (p.x() - f.pts[0].x())) /
             d.norm();
  return (s > kGeomEps) - (s < -kGeomEps);
}

// Whether p, already known to lie on the face's plane (side 0), falls within
// the closed face polygon (3D) or segment (2D).
inline bool within_face_int(const RasterFace& f, const std::array<long long, 3>& p,
                            int dim) {
  if (dim == 2) {
    const auto& a = f.ipts[0];
    const auto& b = f.ipts[1];
    long long d[3] = {b[0] - a[0], b[1] - a[1], 0};
    long long t = d[0] * (p[0] - a[0]) + d[1] * (p[1] - a[1]);
    return t >= 0 && t <= d[0] * d[0] + d[1] * d[1];
  }
  // Fan triangulation; p is inside iff it is on the inner side of every
  // directed edge of some triangle (vector-area dot the face normal).
  const auto& f0 = f.ipts[0];
  std::array<long long, 3> n = {0, 0, 0};
  {
    long long u[3] = {f.ipts[1][0] - f0[0], f.ipts[1][1] - f0[1],
                      f.ipts[1][2] - f0[2]};
    long long v[3] = {f.ipts[2][0] - f0[0], f.ipts[2][1] - f0[1],
                      f.ipts[2][2] - f0[2]};
    n = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
         u[0] * v[1] - u[1] * v[0]};
  }
  auto edge_ok = [&](const std::array<long long, 3>& a,
                     const std::array<long long, 3>& b) {
    long long e[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    long long w[3] = {p[0] - a[0], p[1] - a[1], p[2] - a[2]};
    long long c[3] = {e[1] * w[2] - e[2] * w[1], e[2] * w[0] - e[0] * w[2],
                      e[0] * w[1] - e[1] * w[0]};
    return c[0] * n[0] + c[1] * n[1] + c[2] * n[2] >= 0;
  };
  for (size_t k = 1; k + 1 < f.ipts.size(); ++k) {
    if (edge_ok(f0, f.ipts[k]) && edge_ok(f.ipts[k], f.ipts[k + 1]) &&
        edge_ok(f.ipts[k + 1], f0))
      return true;
  }
  return false;
}

inline bool within_face_float(const RasterFace& f, const Point3& p, int dim) {
  if (dim == 2) {
    Point3 d = f.pts[1] - f.pts[0];
    double t = d.dot(p - f.pts[0]) / d.squaredNorm();
    return t >= -kGeomEps && t <= 1.0 + kGeomEps;
  }
  Point3 n = (f.pts[1] - f.pts[0]).cross(f.pts[2] - f.pts[0]).normalized();
  const Point3& f0 = f.pts[0];
  auto edge_ok = [&](const Point3& a, const Point3& b) {
    return (b - a).cross(p - a).dot(n) >= -kGeomEps;
  };
  for (size_t k = 1; k + 1 < f.pts.size(); ++k) {
    if (edge_ok(f0, f.pts[k]) && edge_ok(f.pts[k], f.pts[k + 1]) &&
        edge_ok(f.pts[k + 1], f0))
      return true;
  }
  return false;
}

}  // namespace detail

// Builds the interior mask of the assembly at mesh size h.  The lattice is
// anchored at the bounding-box corner snapped to multiples of h.  Nodes on
// internal glued faces are interior; nodes on outer boundary faces and on
// slit (coincident) faces are not.  Overlapping assemblies are refused.
inline RasterDomain rasterize(const Assembly& a, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    fail(ErrorCode::Range, "mesh size must be a positive finite number");
  if (a.has_overlap())
    fail(ErrorCode::Overlap, "assembly has overlapping tiles ",
         a.overlap_pair->first, " and ", a.overlap_pair->second,
         "; spectra are undefined on overlapping unions");
  if (a.tiles.empty()) fail(ErrorCode::EmptyDomain, "assembly has no tiles");

  RasterDomain r;
  r.dimension = a.dimension;
  r.h = h;

  // Integer mode: every vertex coordinate must be an integer multiple of h.
  const double h_inv_f = 1.0 / h;
  const long long h_inv = std::llround(h_inv_f);
  bool integral = std::abs(h_inv_f - double(h_inv)) <= 1e-9 * double(h_inv);
  auto to_int = [&](double x, bool& ok) {
    double s = x * h_inv_f;
    long long q = std::llround(s);
    if (std::abs(s - double(q)) > 1e-7) ok = false;
    return q;
  };

  Point3 lo = a.tiles[0].vertices[0], hi = lo;
  for (const Tile& t : a.tiles)
    for (const Point3& v : t.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }

  // Cache each tile as a convex cell with oriented faces.
  std::vector<detail::RasterCell> cells(a.tiles.size());
  std::vector<detail::RasterFace*> outer;  // boundary + slit faces
  bool int_ok = integral;
  for (size_t ti = 0; ti < a.tiles.size(); ++ti) {
    const Tile& t = a.tiles[ti];
    detail::RasterCell& cell = cells[ti];
    cell.lo = t.vertices[0];
    cell.hi = t.vertices[0];
    for (const Point3& v : t.vertices) {
      cell.lo = cell.lo.cwiseMin(v);
      cell.hi = cell.hi.cwiseMax(v);
    }
    cell.faces.resize(a.base.faces.size());
    for (size_t fi = 0; fi < a.base.faces.size(); ++fi) {
      detail::RasterFace& f = cell.faces[fi];
      for (int vi : a.base.faces[fi]) f.pts.push_back(t.vertices[vi]);
      if (int_ok)
        for (const Point3& p : f.pts)
          f.ipts.push_back({to_int(p.x(), int_ok), to_int(p.y(), int_ok),
                            to_int(p.z(), int_ok)});
    }
  }
  if (!int_ok) {
    r.off_lattice = true;
    for (auto& cell : cells)
      for (auto& f : cell.faces) f.ipts.clear();
  }
  const bool exact = int_ok;

  // Reference orientation: a tile vertex off the face plane fixes the sign
  // of the interior side.
  for (size_t ti = 0; ti < a.tiles.size(); ++ti) {
    const Tile& t = a.tiles[ti];
    for (auto& f : cells[ti].faces) {
      for (const Point3& v : t.vertices) {
        int s;
        if (exact) {
          bool ok = true;
          std::array<long long, 3> iv = {to_int(v.x(), ok), to_int(v.y(), ok),
                                         to_int(v.z(), ok)};
          s = detail::face_side_int(f, iv, a.dimension);
        } else {
          s = detail::face_side_float(f, v, a.dimension);
        }
        if (s != 0) {
          f.ref_sign = s;
          break;
        }
      }
      if (f.ref_sign == 0)
        fail(ErrorCode::Geometry, "degenerate tile ", ti,
             " has no vertex off one of its face planes");
    }
  }
  for (const FaceRef& bf : a.boundary_faces)
    outer.push_back(&cells[bf.tile].faces[bf.face]);

  // Lattice bounds.
  std::array<long long, 3> o{}, n{};
  for (int k = 0; k < 3; ++k) {
    o[k] = (long long)std::floor(lo[k] * h_inv_f + 1e-9);
    long long top = (long long)std::ceil(hi[k] * h_inv_f - 1e-9);
    n[k] = top - o[k] + 1;
  }
  if (a.dimension == 2) {
    o[2] = 0;
    n[2] = 1;
  }
  r.origin = Point3(double(o[0]) * h, double(o[1]) * h, double(o[2]) * h);
  r.extents = {int(n[0]), int(n[1]), int(n[2])};
  r.interior_mask.assign(size_t(n[0] * n[1] * n[2]), 0);
  r.index_map.assign(r.interior_mask.size(), -1);

  auto interior = [&](long long gx, long long gy, long long gz) {
    Point3 p(double(gx) * h, double(gy) * h, double(gz) * h);
    std::array<long long, 3> ip = {gx, gy, gz};
    bool inside = false;
    for (const auto& cell : cells) {
      if ((p.array() < cell.lo.array() - kGeomEps).any() ||
          (p.array() > cell.hi.array() + kGeomEps).any())
        continue;
      bool in = true;
      for (const auto& f : cell.faces) {
        int s = exact ? detail::face_side_int(f, ip, a.dimension)
                      : detail::face_side_float(f, p, a.dimension);
        if (s != 0 && s != f.ref_sign) {
          in = false;
          break;
        }
      }
      if (in) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
    for (const detail::RasterFace* f : outer) {
      int s = exact ? detail::face_side_int(*f, ip, a.dimension)
                    : detail::face_side_float(*f, p, a.dimension);
      if (s == 0 && (exact ? detail::within_face_int(*f, ip, a.dimension)
                           : detail::within_face_float(*f, p, a.dimension)))
        return false;
    }
    return true;
  };

  for (long long ix = 0; ix < n[0]; ++ix)
    for (long long iy = 0; iy < n[1]; ++iy)
      for (long long iz = 0; iz < n[2]; ++iz) {
        if (interior(o[0] + ix, o[1] + iy, o[2] + iz)) {
          size_t id = size_t((ix * n[1] + iy) * n[2] + iz);
          r.interior_mask[id] = 1;
          r.index_map[id] = r.n_interior++;
          r.nodes.push_back({int(ix), int(iy), int(iz)});
        }
      }
  return r;
}

// Assembles the finite-difference Dirichlet Laplacian over the interior
// nodes: diagonal 2d/h^2, off-diagonal -1/h^2 toward each interior lattice
// neighbor; exterior neighbors contribute nothing.
inline DiscreteLaplacian assemble_laplacian(const RasterDomain& r) {
  if (r.n_interior < 1)
    fail(ErrorCode::EmptyDomain, "raster has no interior nodes");
  const double ih2 = 1.0 / (r.h * r.h);
  const int d = r.dimension;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(r.n_interior) * (2 * d + 1));
  const int offs[3][2] = {{-1, 1}, {-1, 1}, {-1, 1}};
  for (int row = 0; row < r.n_interior; ++row) {
    const auto& nd = r.nodes[row];
    trips.emplace_back(row, row, 2.0 * d * ih2);
    for (int axis = 0; axis < d; ++axis)
      for (int s = 0; s < 2; ++s) {
        std::array<int, 3> nb = nd;
        nb[axis] += offs[axis][s];
        if (r.is_interior(nb[0], nb[1], nb[2]))
          trips.emplace_back(row, r.index_map[r.node_id(nb[0], nb[1], nb[2])],
                             -ih2);
      }
  }
  DiscreteLaplacian L;
  L.dimension = d;
  L.h = r.h;
  L.op.resize(r.n_interior, r.n_interior);
  L.op.setFromTriplets(trips.begin(), trips.end());
  return L;
}

}  // namespace isodrum
