#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "isodrum/eigensolve.hpp"
#include "isodrum/error.hpp"
#include "isodrum/raster.hpp"
#include "isodrum/signed_matrices.hpp"

namespace isodrum {

// Per-mode absolute differences between two ascending spectra.
struct ComparisonReport {
  std::vector<double> abs_diffs;
  double max_abs_diff = 0.0;
  double l2_diff = 0.0;
};

inline ComparisonReport compare_spectra(const Spectrum& s1, const Spectrum& s2,
                                        int m) {
  if (m < 1 || size_t(m) > s1.eigenvalues.size() ||
      size_t(m) > s2.eigenvalues.size())
    fail(ErrorCode::Shape, "cannot compare ", m, " modes of spectra with ",
         s1.eigenvalues.size(), " and ", s2.eigenvalues.size(), " values");
  ComparisonReport r;
  double sq = 0.0;
  for (int k = 0; k < m; ++k) {
    double d = std::abs(s1.eigenvalues[size_t(k)] - s2.eigenvalues[size_t(k)]);
    r.abs_diffs.push_back(d);
    r.max_abs_diff = std::max(r.max_abs_diff, d);
    sq += d * d;
  }
  r.l2_diff = std::sqrt(sq);
  return r;
}

// Multilinear interpolation of a grid function (zero outside the interior).
inline double interpolate_grid_function(const RasterDomain& r,
                                        const Eigen::VectorXd& values,
                                        const Point3& p) {
  Point3 s = (p - r.origin) / r.h;
  int c[3] = {0, 0, 0};
  double f[3] = {0.0, 0.0, 0.0};
  const int d = r.dimension;
  for (int k = 0; k < d; ++k) {
    c[k] = int(std::floor(s[k]));
    f[k] = s[k] - double(c[k]);
  }
  auto at = [&](int dx, int dy, int dz) -> double {
    int ix = c[0] + dx, iy = c[1] + dy, iz = d == 3 ? c[2] + dz : 0;
    if (!r.is_interior(ix, iy, iz)) return 0.0;
    return values[r.index_map[size_t(r.node_id(ix, iy, iz))]];
  };
  double acc = 0.0;
  const int zmax = d == 3 ? 1 : 0;
  for (int dx = 0; dx <= 1; ++dx)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dz = 0; dz <= zmax; ++dz) {
        double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) *
                   (d == 3 ? (dz ? f[2] : 1 - f[2]) : 1.0);
        if (w != 0.0) acc += w * at(dx, dy, dz);
      }
  return acc;
}

struct TransplantReport {
  Eigen::VectorXd values;   // grid function on the destination raster
  double rayleigh = 0.0;    // v^T L v / v^T v under the destination operator
  int unmapped_nodes = 0;   // destination nodes outside every destination tile
};

namespace detail {

inline bool tile_contains_point(const Assembly& a, int ti, const Point3& p,
                                double eps) {
  for (size_t fi = 0; fi < a.base.faces.size(); ++fi) {
    std::vector<Point3> pts = a.face_vertices({ti, int(fi)});
    double s, sref = 0.0;
    if (a.dimension == 3) {
      Point3 n = (pts[1] - pts[0]).cross(pts[2] - pts[0]).normalized();
      s = n.dot(p - pts[0]);
      for (const Point3& v : a.tiles[size_t(ti)].vertices) {
        double t = n.dot(v - pts[0]);
        if (std::abs(t) > std::abs(sref)) sref = t;
      }
    } else {
      Point3 dvec = pts[1] - pts[0];
      Point3 n(-dvec.y(), dvec.x(), 0.0);
      n.normalize();
      s = n.dot(p - pts[0]);
      for (const Point3& v : a.tiles[size_t(ti)].vertices) {
        double t = n.dot(v - pts[0]);
        if (std::abs(t) > std::abs(sref)) sref = t;
      }
    }
    if (sref > 0 ? s < -eps : s > eps) return false;
  }
  return true;
}

}  // namespace detail

// Transplants a grid function from one assembly to its partner: each
// destination node in tile i receives C * sum_j T(i, j) * (value of the
// source function at the j-th tile's copy of the same base point).
inline TransplantReport transplant_grid_function(
    const Assembly& src_a, const RasterDomain& src_r,
    const Eigen::VectorXd& src_values, const Assembly& dst_a,
    const RasterDomain& dst_r, const IntMatrix& T, double C) {
  const int n_src = int(src_a.tiles.size());
  const int n_dst = int(dst_a.tiles.size());
  if (T.rows() != n_dst || T.cols() != n_src)
    fail(ErrorCode::Shape, "transplantation matrix is ", T.rows(), "x",
         T.cols(), " but the assemblies have ", n_dst, " and ", n_src,
         " tiles");
  if (src_values.size() != src_r.n_interior)
    fail(ErrorCode::Shape, "source vector length ", src_values.size(),
         " does not match the raster's ", src_r.n_interior, " interior nodes");

  TransplantReport rep;
  rep.values = Eigen::VectorXd::Zero(dst_r.n_interior);
  for (int q = 0; q < dst_r.n_interior; ++q) {
    Point3 p = dst_r.node_point(dst_r.nodes[size_t(q)]);
    int tile = -1;
    for (int ti = 0; ti < n_dst; ++ti)
      if (detail::tile_contains_point(dst_a, ti, p, kGeomEps)) {
        tile = ti;
        break;
      }
    if (tile < 0) {
      ++rep.unmapped_nodes;
      continue;
    }
    Point3 base_pt = dst_a.tiles[size_t(tile)].apply_inverse(p);
    double acc = 0.0;
    for (int j = 0; j < n_src; ++j) {
      if (T(tile, j) == 0) continue;
      Point3 y = src_a.tiles[size_t(j)].apply(base_pt);
      acc += double(T(tile, j)) * interpolate_grid_function(src_r, src_values, y);
    }
    rep.values[q] = C * acc;
  }
  double nrm2 = rep.values.squaredNorm();
  if (nrm2 > 0.0) {
    DiscreteLaplacian L = assemble_laplacian(dst_r);
    rep.rayleigh = rep.values.dot(L.op * rep.values) / nrm2;
  }
  return rep;
}

// CSV emission: `k,lambda_A[,lambda_B,abs_diff]`, eigenvalues with 10
// significant digits, differences in scientific notation.
inline std::string spectrum_csv(const Spectrum& a, const Spectrum* b, int m) {
  if (size_t(m) > a.eigenvalues.size() ||
      (b && size_t(m) > b->eigenvalues.size()))
    fail(ErrorCode::Shape, "spectrum has fewer than ", m, " modes");
  std::string out = b ? "k,lambda_A,lambda_B,abs_diff\n" : "k,lambda_A\n";
  char buf[128];
  for (int k = 0; k < m; ++k) {
    if (b) {
      double d = std::abs(a.eigenvalues[size_t(k)] - b->eigenvalues[size_t(k)]);
      std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.4e\n", k + 1,
                    a.eigenvalues[size_t(k)], b->eigenvalues[size_t(k)], d);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.10g\n", k + 1,
                    a.eigenvalues[size_t(k)]);
    }
    out += buf;
  }
  return out;
}

}  // namespace isodrum
