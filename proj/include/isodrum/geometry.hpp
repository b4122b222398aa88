#pragma once

#include "isodrum/error.hpp"
#include "isodrum/gluing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace isodrum {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

// Comparison tolerance for all face-coincidence and alignment checks, in
// model units. Shipped bases use small-integer coordinates, so this sits far
// below any geometric feature size.
inline constexpr double kGeomEps = 1e-9;

// Reflection of p across the plane through a triangle, via the barycentric
// projection constraints: proj = a1 f0 + a2 f1 + a3 f2 with a1 + a2 + a3 = 1
// and (proj - p) orthogonal to two independent in-plane directions. Templated
// so rational inputs reflect bit-exactly.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> mirror_point(
    const Eigen::Matrix<Scalar, 3, 1>& p,
    const std::array<Eigen::Matrix<Scalar, 3, 1>, 3>& face) {
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  const Vec d1 = face[1] - face[0];
  const Vec d2 = face[1] - face[2];
  // Rows of the 3x3 system for the barycentric weights.
  Eigen::Matrix<Scalar, 3, 3> m;
  Eigen::Matrix<Scalar, 3, 1> rhs;
  for (int k = 0; k < 3; ++k) {
    m(0, k) = face[k].dot(d1);
    m(1, k) = face[k].dot(d2);
    m(2, k) = Scalar(1);
  }
  rhs(0) = p.dot(d1);
  rhs(1) = p.dot(d2);
  rhs(2) = Scalar(1);
  // Cramer's rule keeps the computation exact for rational scalars.
  auto det3 = [](const Eigen::Matrix<Scalar, 3, 3>& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  };
  const Scalar det = det3(m);
  if (det == Scalar(0))
    fail(ErrorCode::Geometry, "degenerate face: vertices are collinear");
  Vec proj = Vec::Zero();
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix<Scalar, 3, 3> mk = m;
    mk.col(k) = rhs;
    proj += (det3(mk) / det) * face[k];
  }
  return Scalar(2) * proj - p;
}

// Reflection of p across the line through two distinct points.
inline Point2 reflect_point_2d(const Point2& p, const std::array<Point2, 2>& edge) {
  const Point2 d = edge[1] - edge[0];
  const double len2 = d.squaredNorm();
  if (len2 <= kGeomEps * kGeomEps)
    fail(ErrorCode::Geometry, "degenerate edge: endpoints coincide");
  const Point2 proj = edge[0] + (d.dot(p - edge[0]) / len2) * d;
  return 2.0 * proj - p;
}

// A reflective tile shape: vertices, the full face table (faces are vertex
// index tuples; edges in 2D), and which face carries each color. Uncolored
// faces stay fixed (never reflected through). 2D shapes live in the z = 0
// plane of the same machinery.
struct BaseTile {
  int dimension = 3;
  std::vector<Point3> vertices;
  std::vector<std::vector<int>> faces;
  std::array<int, 3> color_face = {-1, -1, -1};

  const std::vector<int>& face_of(Color c) const {
    return faces[color_face[color_index(c)]];
  }
  int n_faces() const { return static_cast<int>(faces.size()); }
};

namespace detail {

inline void validate_base_tile(const BaseTile& b) {
  const int nv = static_cast<int>(b.vertices.size());
  if (b.dimension != 2 && b.dimension != 3)
    fail(ErrorCode::Shape, "base tile dimension must be 2 or 3");
  if (b.dimension == 2 && nv != 3)
    fail(ErrorCode::Shape, "2D base tile must be a triangle");
  if (b.dimension == 3 && nv < 4)
    fail(ErrorCode::Shape, "3D base tile needs at least four vertices");
  for (const Point3& v : b.vertices)
    if (!v.allFinite()) fail(ErrorCode::Geometry, "non-finite vertex coordinate");
  for (int k = 0; k < 3; ++k)
    if (b.color_face[k] < 0 || b.color_face[k] >= b.n_faces())
      fail(ErrorCode::Missing,
           std::string("no face carries color ") + color_name(kColors[k]));
  for (const auto& f : b.faces) {
    const size_t need = b.dimension == 2 ? 2 : 3;
    if (f.size() < need) fail(ErrorCode::Shape, "face with too few vertices");
    for (int idx : f)
      if (idx < 0 || idx >= nv)
        fail(ErrorCode::Range, "face vertex index out of range");
  }
  if (b.dimension == 2) {
    const Point3 a = b.vertices[1] - b.vertices[0];
    const Point3 c = b.vertices[2] - b.vertices[0];
    if (std::abs(a.x() * c.y() - a.y() * c.x()) <= kGeomEps)
      fail(ErrorCode::Geometry, "degenerate base triangle");
  } else {
    // Mirror planes must be well-defined and every face planar.
    for (const auto& f : b.faces) {
      const Point3 n = (b.vertices[f[1]] - b.vertices[f[0]])
                           .cross(b.vertices[f[2]] - b.vertices[f[0]]);
      if (n.norm() <= kGeomEps)
        fail(ErrorCode::Geometry, "degenerate face: vertices are collinear");
      for (size_t k = 3; k < f.size(); ++k)
        if (std::abs(n.normalized().dot(b.vertices[f[k]] - b.vertices[f[0]])) >
            kGeomEps)
          fail(ErrorCode::Geometry, "non-planar face in base tile");
    }
  }
}

}  // namespace detail

// The corner tetrahedron 0 <= y <= x <= z <= 1 used by the shipped 3D
// assemblies: P0 = origin, P1/P2/P3 march up the main diagonal.
inline BaseTile basic_simplex() {
  BaseTile b;
  b.dimension = 3;
  b.vertices = {Point3(0, 0, 0), Point3(0, 0, 1), Point3(1, 0, 1), Point3(1, 1, 1)};
  b.faces = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  b.color_face = {0, 1, 2};  // red, blue, black; face (P0,P1,P2) stays fixed
  detail::validate_base_tile(b);
  return b;
}

// The corner tetrahedron of the unit cube, with the oblique face red and the
// y = 0 face fixed.
inline BaseTile wall_tetrahedron() {
  BaseTile b;
  b.dimension = 3;
  b.vertices = {Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)};
  b.faces = {{1, 2, 3}, {0, 2, 3}, {0, 1, 2}, {0, 1, 3}};
  b.color_face = {0, 1, 2};  // red oblique, blue x = 0, black z = 0
  detail::validate_base_tile(b);
  return b;
}

// Unit cube with the three far faces colored (red x = 1, blue y = 1,
// black z = 1); reflections through them generate the integer lattice.
inline BaseTile unit_cube() {
  BaseTile b;
  b.dimension = 3;
  b.vertices = {Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1),
                Point3(1, 1, 0), Point3(1, 0, 1), Point3(0, 1, 1), Point3(1, 1, 1)};
  b.faces = {{1, 4, 7, 5}, {2, 6, 7, 4}, {3, 5, 7, 6},
             {0, 2, 6, 3}, {0, 3, 5, 1}, {0, 1, 4, 2}};
  b.color_face = {0, 1, 2};
  detail::validate_base_tile(b);
  return b;
}

namespace detail {

inline BaseTile triangle_tile(const std::array<Point2, 3>& v,
                              const std::array<std::pair<int, int>, 3>& color_edges) {
  BaseTile b;
  b.dimension = 2;
  for (const Point2& p : v) b.vertices.emplace_back(p.x(), p.y(), 0.0);
  b.faces = {{0, 1}, {1, 2}, {2, 0}};
  auto edge_index = [&](std::pair<int, int> e) {
    for (int k = 0; k < 3; ++k) {
      auto [a, c] = std::minmax(b.faces[k][0], b.faces[k][1]);
      auto [x, y] = std::minmax(e.first, e.second);
      if (a == x && c == y) return k;
    }
    fail(ErrorCode::Range, "edge is not part of the triangle");
  };
  for (int k = 0; k < 3; ++k) b.color_face[k] = edge_index(color_edges[k]);
  validate_base_tile(b);
  return b;
}

}  // namespace detail

// Right isosceles half-square, positional color map (red opposite vertex 0,
// blue opposite vertex 1, black opposite vertex 2).
inline BaseTile half_square_triangle() {
  return detail::triangle_tile(
      {Point2(1, 0), Point2(0, 0), Point2(0, 1)},
      {{{1, 2}, {0, 2}, {0, 1}}});
}

// Right isosceles half-square with the classic drum color map:
// red = x = 0 leg, blue = y = 0 leg, black = hypotenuse.
inline BaseTile gww_triangle() {
  return detail::triangle_tile(
      {Point2(1, 0), Point2(0, 0), Point2(0, 1)},
      {{{1, 2}, {0, 1}, {0, 2}}});
}

// Unit-edge equilateral triangle, positional color map (red opposite the
// apex, blue and black on the remaining edges).
inline BaseTile equilateral_triangle() {
  return detail::triangle_tile(
      {Point2(1, 0), Point2(0, 0), Point2(0.5, std::sqrt(3.0) / 2.0)},
      {{{1, 2}, {0, 2}, {0, 1}}});
}

// 30-60-90 right triangle (legs 1 and sqrt(3)); red = middle edge,
// blue = long edge, black = short edge.
inline BaseTile t306090_triangle() {
  return detail::triangle_tile(
      {Point2(1, 0), Point2(0, 0), Point2(0, std::sqrt(3.0))},
      {{{1, 2}, {0, 2}, {0, 1}}});
}

// Parses the plain-text base-tile format: "dim <2|3>", one "v x y [z]" line
// per vertex, one line per colored face ("red i j [k...]"), and "fixed ..."
// lines for the remaining faces.
inline BaseTile parse_base_tile(const std::string& text) {
  BaseTile b;
  b.dimension = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = isodrum::detail::strip(line);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string key;
    ls >> key;
    if (key == "dim") {
      if (!(ls >> b.dimension) || (b.dimension != 2 && b.dimension != 3))
        isodrum::detail::syntax(line_no, "dim must be 2 or 3");
    } else if (key == "v") {
      if (b.dimension == 0)
        isodrum::detail::syntax(line_no, "dim must precede vertices");
      double x = 0, y = 0, z = 0;
      if (!(ls >> x >> y) || (b.dimension == 3 && !(ls >> z)))
        isodrum::detail::syntax(line_no, "bad vertex coordinates");
      b.vertices.emplace_back(x, y, z);
    } else if (key == "red" || key == "blue" || key == "black" || key == "fixed") {
      std::vector<int> idx;
      int v = 0;
      while (ls >> v) idx.push_back(v);
      const size_t need = b.dimension == 2 ? 2 : 3;
      if (b.dimension == 0 || idx.size() < need)
        isodrum::detail::syntax(line_no, "face needs enough vertex indices");
      b.faces.push_back(idx);
      if (key != "fixed") {
        Color c = *color_from_name(key);
        if (b.color_face[color_index(c)] != -1)
          fail(ErrorCode::Duplicate, "line " + std::to_string(line_no) +
                                         ": color " + key + " listed twice");
        b.color_face[color_index(c)] = static_cast<int>(b.faces.size()) - 1;
      }
    } else {
      isodrum::detail::syntax(line_no, "unknown directive '" + key + "'");
    }
  }
  if (b.dimension == 2 && b.faces.empty())
    b.faces = {{0, 1}, {1, 2}, {2, 0}};
  detail::validate_base_tile(b);
  return b;
}

// One placed tile: a rigid copy of the base (x -> rot x + trans) together
// with its reflection parity; det(rot) == (-1)^parity.
struct Tile {
  int index = 0;
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Point3 trans = Point3::Zero();
  int parity = 0;
  std::vector<Point3> vertices;

  Point3 apply(const Point3& p) const { return rot * p + trans; }
  Point3 apply_inverse(const Point3& p) const { return rot.transpose() * (p - trans); }
};

// Reference to one face of one placed tile.
struct FaceRef {
  int tile = 0;
  int face = 0;
  bool operator==(const FaceRef& o) const { return tile == o.tile && face == o.face; }
};

struct GluedFace {
  int tile_i = 0;
  int tile_j = 0;
  Color color = Color::Red;
};

// A reflection-rule unfolding: placed tiles plus the glued / boundary /
// coincident face bookkeeping. Overlapping interiors are flagged, not
// rejected; downstream rasterization refuses them.
struct Assembly {
  int dimension = 3;
  BaseTile base;
  GluingGraph graph;
  double height = 0.0;  // nonzero only for extruded prisms
  std::vector<Tile> tiles;
  std::vector<GluedFace> glued_faces;
  std::vector<FaceRef> boundary_faces;
  std::vector<std::pair<FaceRef, FaceRef>> coincident_faces;
  std::optional<std::pair<int, int>> overlap_pair;

  bool has_overlap() const { return overlap_pair.has_value(); }

  std::vector<Point3> face_vertices(const FaceRef& f) const {
    std::vector<Point3> out;
    for (int idx : base.faces[f.face]) out.push_back(tiles[f.tile].vertices[idx]);
    return out;
  }
};

namespace detail {

// Unordered vertex-set equality within kGeomEps.
inline bool same_point_set(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Point3& p : a) {
    bool hit = false;
    for (size_t k = 0; k < b.size(); ++k) {
      if (!used[k] && (p - b[k]).norm() <= kGeomEps) {
        used[k] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

// Reflection across the plane through three points (3D) or the vertical
// plane through an edge (2D, z = 0 geometry): x -> R x + t.
inline std::pair<Eigen::Matrix3d, Point3> reflection_across(
    const std::vector<Point3>& face_pts, int dimension) {
  Point3 n;
  if (dimension == 2)
    n = (face_pts[1] - face_pts[0]).cross(Point3(0, 0, 1));
  else
    n = (face_pts[1] - face_pts[0]).cross(face_pts[2] - face_pts[0]);
  const double len = n.norm();
  if (len <= kGeomEps) fail(ErrorCode::Geometry, "degenerate reflection face");
  n /= len;
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity() - 2.0 * (n * n.transpose());
  Point3 t = 2.0 * n.dot(face_pts[0]) * n;
  return {r, t};
}

// Strict-interior overlap test for two convex tiles by separating axes:
// candidate axes are all face normals plus (in 3D) edge-direction cross
// products. Touching within kGeomEps does not count as overlap.
inline bool tiles_overlap(const Assembly& a, int t1, int t2) {
  const auto& va = a.tiles[t1].vertices;
  const auto& vb = a.tiles[t2].vertices;
  std::vector<Point3> axes;
  auto add_axis = [&](Point3 n) {
    const double len = n.norm();
    if (len <= kGeomEps) return;
    n /= len;
    for (const Point3& e : axes)
      if ((e - n).norm() <= 1e-12 || (e + n).norm() <= 1e-12) return;
    axes.push_back(n);
  };
  auto face_normals = [&](int t) {
    for (const auto& f : a.base.faces) {
      const auto& v = a.tiles[t].vertices;
      if (a.dimension == 2)
        add_axis((v[f[1]] - v[f[0]]).cross(Point3(0, 0, 1)));
      else
        add_axis((v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]));
    }
  };
  face_normals(t1);
  face_normals(t2);
  if (a.dimension == 3) {
    auto edge_dirs = [&](int t) {
      std::vector<Point3> dirs;
      const auto& v = a.tiles[t].vertices;
      for (const auto& f : a.base.faces)
        for (size_t k = 0; k < f.size(); ++k) {
          Point3 d = v[f[(k + 1) % f.size()]] - v[f[k]];
          const double len = d.norm();
          if (len <= kGeomEps) continue;
          d /= len;
          bool dup = false;
          for (const Point3& e : dirs)
            if ((e - d).norm() <= 1e-12 || (e + d).norm() <= 1e-12) dup = true;
          if (!dup) dirs.push_back(d);
        }
      return dirs;
    };
    for (const Point3& d1 : edge_dirs(t1))
      for (const Point3& d2 : edge_dirs(t2)) add_axis(d1.cross(d2));
  }
  for (const Point3& axis : axes) {
    double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
    for (const Point3& p : va) {
      const double d = axis.dot(p);
      lo1 = std::min(lo1, d);
      hi1 = std::max(hi1, d);
    }
    for (const Point3& p : vb) {
      const double d = axis.dot(p);
      lo2 = std::min(lo2, d);
      hi2 = std::max(hi2, d);
    }
    if (std::max(lo2 - hi1, lo1 - hi2) >= -kGeomEps) return false;  // separated
  }
  return true;
}

}  // namespace detail

// Unfolds a gluing graph into placed tiles, breadth-first from root_tile:
// each neighbor is the mirror image of its parent across the shared colored
// face. Cross edges (tiles reachable two ways) are verified to land on the
// same shared face within kGeomEps rather than assumed.
inline Assembly build_assembly(const GluingGraph& graph, const BaseTile& base,
                               int root_tile = 0) {
  validate_graph(graph);
  detail::validate_base_tile(base);
  if (root_tile < 0 || root_tile >= graph.n_tiles)
    fail(ErrorCode::Range, "root tile index out of range");
  Assembly a;
  a.dimension = base.dimension;
  a.base = base;
  a.graph = graph;
  a.tiles.resize(graph.n_tiles);
  std::vector<bool> placed(graph.n_tiles, false);

  auto realize = [&](Tile& t) {
    t.vertices.clear();
    for (const Point3& v : base.vertices) t.vertices.push_back(t.apply(v));
  };

  Tile root;
  root.index = root_tile;
  realize(root);
  a.tiles[root_tile] = std::move(root);
  placed[root_tile] = true;

  std::deque<int> queue = {root_tile};
  auto face_points = [&](int tile, Color c) {
    std::vector<Point3> pts;
    for (int idx : base.face_of(c)) pts.push_back(a.tiles[tile].vertices[idx]);
    return pts;
  };
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    for (Color c : kColors) {
      const GlueTarget tgt = graph.of(c)[i];
      if (!tgt) continue;
      const int j = *tgt;
      const std::vector<Point3> shared = face_points(i, c);
      if (placed[j]) {
        if (!detail::same_point_set(shared, face_points(j, c)))
          fail(ErrorCode::Geometry,
               "tiles " + std::to_string(i) + " and " + std::to_string(j) +
                   " disagree on their shared " + color_name(c) + " face");
        continue;
      }
      auto [r, t] = detail::reflection_across(shared, base.dimension);
      Tile child;
      child.index = j;
      child.rot = r * a.tiles[i].rot;
      child.trans = r * a.tiles[i].trans + t;
      child.parity = (a.tiles[i].parity + 1) % 2;
      realize(child);
      a.tiles[j] = std::move(child);
      placed[j] = true;
      queue.push_back(j);
    }
  }

  // Glued faces (one entry per glued pair), then everything else is boundary.
  for (int i = 0; i < graph.n_tiles; ++i)
    for (Color c : kColors) {
      const GlueTarget tgt = graph.of(c)[i];
      if (tgt && *tgt > i) a.glued_faces.push_back({i, *tgt, c});
    }
  std::vector<std::vector<bool>> glued(graph.n_tiles,
                                       std::vector<bool>(base.n_faces(), false));
  for (const GluedFace& g : a.glued_faces) {
    glued[g.tile_i][base.color_face[color_index(g.color)]] = true;
    glued[g.tile_j][base.color_face[color_index(g.color)]] = true;
  }
  for (int i = 0; i < graph.n_tiles; ++i)
    for (int f = 0; f < base.n_faces(); ++f)
      if (!glued[i][f]) a.boundary_faces.push_back({i, f});

  // Coincident faces: non-glued pairs occupying the same region.
  for (size_t x = 0; x < a.boundary_faces.size(); ++x)
    for (size_t y = x + 1; y < a.boundary_faces.size(); ++y) {
      if (a.boundary_faces[x].tile == a.boundary_faces[y].tile) continue;
      if (detail::same_point_set(a.face_vertices(a.boundary_faces[x]),
                                 a.face_vertices(a.boundary_faces[y])))
        a.coincident_faces.emplace_back(a.boundary_faces[x], a.boundary_faces[y]);
    }

  // Overlap flag: first strictly-overlapping tile pair, if any.
  for (int i = 0; i < graph.n_tiles && !a.overlap_pair; ++i)
    for (int j = i + 1; j < graph.n_tiles; ++j)
      if (detail::tiles_overlap(a, i, j)) {
        a.overlap_pair = std::make_pair(i, j);
        break;
      }
  return a;
}

// Sweeps a flat assembly into triangular prisms of the given height. Tile
// adjacency, boundary, and coincidence lists lift edge-wise; every tile adds
// its bottom and top triangles as boundary faces.
inline Assembly extrude_prism(const Assembly& flat, double height) {
  if (flat.dimension != 2)
    fail(ErrorCode::Shape, "only 2D assemblies can be extruded");
  if (!(height > 0)) fail(ErrorCode::Range, "extrusion height must be positive");

  // Wedge base: bottom triangle 0,1,2 and top triangle 3,4,5; side quads
  // follow the flat tile's edge table so color indices carry over.
  BaseTile wedge;
  wedge.dimension = 3;
  for (const Point3& v : flat.base.vertices) wedge.vertices.push_back(v);
  for (const Point3& v : flat.base.vertices)
    wedge.vertices.push_back(v + Point3(0, 0, height));
  for (const auto& e : flat.base.faces)
    wedge.faces.push_back({e[0], e[1], e[1] + 3, e[0] + 3});
  wedge.color_face = flat.base.color_face;
  const int bottom = wedge.n_faces();
  wedge.faces.push_back({0, 1, 2});
  wedge.faces.push_back({3, 4, 5});
  detail::validate_base_tile(wedge);

  Assembly out;
  out.dimension = 3;
  out.base = wedge;
  out.graph = flat.graph;
  out.height = height;
  out.glued_faces = flat.glued_faces;
  out.overlap_pair = flat.overlap_pair;
  for (const Tile& t : flat.tiles) {
    Tile lifted = t;  // 2D transforms already act on z = 0 space; z is fixed
    lifted.vertices.clear();
    for (const Point3& v : wedge.vertices) lifted.vertices.push_back(lifted.apply(v));
    out.tiles.push_back(std::move(lifted));
  }
  for (const FaceRef& f : flat.boundary_faces) out.boundary_faces.push_back(f);
  for (const Tile& t : out.tiles) {
    out.boundary_faces.push_back({t.index, bottom});
    out.boundary_faces.push_back({t.index, bottom + 1});
  }
  for (const auto& [x, y] : flat.coincident_faces) out.coincident_faces.emplace_back(x, y);
  return out;
}

// Isometry decision between two assemblies: distance multisets first (a
// necessary condition), then a distance-profile-pruned search for a vertex
// correspondence validated by a best-fit orthogonal alignment.
struct IsometryWitness {
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Point3 trans = Point3::Zero();
  std::vector<int> vertex_map;  // index into b's vertex list per a-vertex
};

struct IsometryReport {
  bool isometric = false;
  bool distance_multisets_equal = false;
  std::optional<IsometryWitness> witness;
};

namespace detail {

inline std::vector<Point3> unique_vertices(const Assembly& a) {
  std::vector<Point3> out;
  for (const Tile& t : a.tiles)
    for (const Point3& v : t.vertices) {
      bool dup = false;
      for (const Point3& u : out)
        if ((u - v).norm() <= kGeomEps) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(v);
    }
  return out;
}

inline bool tiles_map_onto_tiles(const Assembly& a, const Assembly& b,
                                 const Eigen::Matrix3d& rot, const Point3& trans) {
  std::vector<bool> used(b.tiles.size(), false);
  for (const Tile& ta : a.tiles) {
    std::vector<Point3> img;
    for (const Point3& v : ta.vertices) img.push_back(rot * v + trans);
    bool hit = false;
    for (size_t k = 0; k < b.tiles.size(); ++k) {
      if (!used[k]) {
        if (same_point_set(img, b.tiles[k].vertices)) {
          used[k] = true;
          hit = true;
          break;
        }
      }
    }
    if (!hit) return false;
  }
  return true;
}

// Best-fit orthogonal alignment (reflections allowed) of matched points.
inline std::pair<Eigen::Matrix3d, Point3> fit_alignment(
    const std::vector<Point3>& from, const std::vector<Point3>& to) {
  Point3 cf = Point3::Zero(), ct = Point3::Zero();
  for (const Point3& p : from) cf += p;
  for (const Point3& p : to) ct += p;
  cf /= static_cast<double>(from.size());
  ct /= static_cast<double>(to.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (size_t k = 0; k < from.size(); ++k)
    h += (to[k] - ct) * (from[k] - cf).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d rot = svd.matrixU() * svd.matrixV().transpose();
  return {rot, ct - rot * cf};
}

inline bool try_correspondence(const std::vector<Point3>& va,
                               const std::vector<Point3>& vb,
                               const std::vector<int>& map, const Assembly& a,
                               const Assembly& b, IsometryReport& rep) {
  std::vector<Point3> from, to;
  for (size_t k = 0; k < va.size(); ++k) {
    from.push_back(va[k]);
    to.push_back(vb[map[k]]);
  }
  auto [rot, trans] = fit_alignment(from, to);
  for (size_t k = 0; k < from.size(); ++k)
    if ((rot * from[k] + trans - to[k]).norm() > kGeomEps) return false;
  if (!tiles_map_onto_tiles(a, b, rot, trans)) return false;
  rep.isometric = true;
  rep.witness = IsometryWitness{rot, trans, map};
  return true;
}

}  // namespace detail

inline IsometryReport is_isometric(const Assembly& a, const Assembly& b) {
  IsometryReport rep;
  if (a.dimension != b.dimension || a.tiles.size() != b.tiles.size()) return rep;
  const std::vector<Point3> va = detail::unique_vertices(a);
  const std::vector<Point3> vb = detail::unique_vertices(b);
  if (va.size() != vb.size()) return rep;
  const size_t n = va.size();

  auto all_dists = [](const std::vector<Point3>& v) {
    std::vector<double> d;
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j) d.push_back((v[i] - v[j]).norm());
    std::sort(d.begin(), d.end());
    return d;
  };
  const std::vector<double> da = all_dists(va), db = all_dists(vb);
  for (size_t k = 0; k < da.size(); ++k)
    if (std::abs(da[k] - db[k]) > kGeomEps) return rep;
  rep.distance_multisets_equal = true;

  // Identity-first shortcut for self comparison.
  {
    std::vector<int> ident(n);
    bool same = true;
    for (size_t k = 0; k < n; ++k) {
      ident[k] = static_cast<int>(k);
      if ((va[k] - vb[k]).norm() > kGeomEps) same = false;
    }
    if (same && detail::try_correspondence(va, vb, ident, a, b, rep)) return rep;
  }

  // Per-vertex distance profiles prune the candidate lists.
  auto profile = [](const std::vector<Point3>& v, size_t i) {
    std::vector<double> d;
    for (size_t j = 0; j < v.size(); ++j)
      if (j != i) d.push_back((v[i] - v[j]).norm());
    std::sort(d.begin(), d.end());
    return d;
  };
  std::vector<std::vector<double>> pa, pb;
  for (size_t k = 0; k < n; ++k) pa.push_back(profile(va, k));
  for (size_t k = 0; k < n; ++k) pb.push_back(profile(vb, k));
  auto profiles_match = [&](size_t i, size_t j) {
    for (size_t k = 0; k < pa[i].size(); ++k)
      if (std::abs(pa[i][k] - pb[j][k]) > kGeomEps) return false;
    return true;
  };

  std::vector<int> map(n, -1);
  std::vector<bool> used(n, false);
  // Backtracking over a-vertices in order; consistency against all matched
  // pairs keeps the search shallow for rigid point sets.
  auto search = [&](auto&& self, size_t i) -> bool {
    if (i == n) return detail::try_correspondence(va, vb, map, a, b, rep);
    for (size_t j = 0; j < n; ++j) {
      if (used[j] || !profiles_match(i, j)) continue;
      bool ok = true;
      for (size_t k = 0; k < i && ok; ++k)
        if (std::abs((va[i] - va[k]).norm() - (vb[j] - vb[map[k]]).norm()) > kGeomEps)
          ok = false;
      if (!ok) continue;
      map[i] = static_cast<int>(j);
      used[j] = true;
      if (self(self, i + 1)) return true;
      used[j] = false;
      map[i] = -1;
    }
    return false;
  };
  search(search, 0);
  return rep;
}

// Mesh export of the outward boundary: glued faces are dropped, coincident
// (slit) faces are emitted once per side, every face is triangulated and
// oriented away from its own tile.
enum class MeshFormat { Obj, Stl };

inline std::string export_mesh(const Assembly& a, MeshFormat format) {
  if (a.dimension != 3)
    fail(ErrorCode::Shape, "mesh export needs a 3D assembly");
  // Gather oriented triangles from all boundary faces.
  std::vector<std::array<Point3, 3>> tris;
  for (const FaceRef& f : a.boundary_faces) {
    std::vector<Point3> pts = a.face_vertices(f);
    Point3 centroid = Point3::Zero();
    for (const Point3& v : a.tiles[f.tile].vertices) centroid += v;
    centroid /= static_cast<double>(a.tiles[f.tile].vertices.size());
    Point3 n = (pts[1] - pts[0]).cross(pts[2] - pts[0]);
    Point3 face_mid = Point3::Zero();
    for (const Point3& p : pts) face_mid += p;
    face_mid /= static_cast<double>(pts.size());
    if (n.dot(face_mid - centroid) < 0) std::reverse(pts.begin(), pts.end());
    for (size_t k = 2; k < pts.size(); ++k)
      tris.push_back({pts[0], pts[k - 1], pts[k]});
  }

  if (format == MeshFormat::Obj) {
    std::vector<Point3> verts;
    auto vertex_id = [&](const Point3& p) {
      for (size_t k = 0; k < verts.size(); ++k)
        if ((verts[k] - p).norm() <= kGeomEps) return static_cast<int>(k) + 1;
      verts.push_back(p);
      return static_cast<int>(verts.size());
    };
    std::vector<std::array<int, 3>> faces;
    for (const auto& t : tris)
      faces.push_back({vertex_id(t[0]), vertex_id(t[1]), vertex_id(t[2])});
    std::ostringstream out;
    out.precision(17);
    for (const Point3& v : verts)
      out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
    for (const auto& f : faces)
      out << "f " << f[0] << " " << f[1] << " " << f[2] << "\n";
    return out.str();
  }

  // Binary STL, little-endian.
  std::string out(80, '\0');
  auto push_u32 = [&](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  auto push_f32 = [&](float f) {
    std::uint32_t v;
    static_assert(sizeof(f) == sizeof(v));
    std::memcpy(&v, &f, sizeof(v));
    push_u32(v);
  };
  push_u32(static_cast<std::uint32_t>(tris.size()));
  for (const auto& t : tris) {
    Point3 n = (t[1] - t[0]).cross(t[2] - t[0]);
    const double len = n.norm();
    if (len > 0) n /= len;
    for (int k = 0; k < 3; ++k) push_f32(static_cast<float>(n(k)));
    for (const auto& p : t)
      for (int k = 0; k < 3; ++k) push_f32(static_cast<float>(p(k)));
    out.push_back('\0');
    out.push_back('\0');
  }
  return out;
}

}  // namespace isodrum
