#include "isodrum/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "isodrum/catalog.hpp"
#include "isodrum/transplant.hpp"

using namespace isodrum;

namespace {

GluingGraph single_tile_graph() {
  GluingGraph g;
  g.n_tiles = 1;
  for (auto& v : g.glue) v.assign(1, GlueTarget());
  return g;
}

Assembly unit_cube_assembly() {
  return build_assembly(single_tile_graph(), unit_cube());
}

Assembly unit_square_assembly() {
  GluingGraph g;
  g.n_tiles = 2;
  for (auto& v : g.glue) v.assign(2, GlueTarget());
  g.of(Color::Black)[0] = 1;
  g.of(Color::Black)[1] = 0;
  return build_assembly(g, gww_triangle());
}

// Closed-form finite-difference Dirichlet eigenvalues of an axis-aligned box,
// computed without any matrix machinery: lambda = (4/h^2) sum_i
// sin^2(p_i pi h / (2 L_i)) over all interior mode tuples.
std::vector<double> box_fd_oracle(const std::vector<double>& len, double h) {
  std::vector<std::vector<double>> axis;
  for (double L : len) {
    int n = int(std::lround(L / h)) - 1;
    std::vector<double> lam;
    for (int p = 1; p <= n; ++p) {
      double s = std::sin(double(p) * std::numbers::pi * h / (2.0 * L));
      lam.push_back(4.0 / (h * h) * s * s);
    }
    axis.push_back(lam);
  }
  std::vector<double> out = {0.0};
  for (const auto& ax : axis) {
    std::vector<double> next;
    for (double base : out)
      for (double l : ax) next.push_back(base + l);
    out = next;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("unit cube at h=1/2 has the single central node and operator [24]") {
  RasterDomain r = rasterize(unit_cube_assembly(), 0.5);
  CHECK(r.n_interior == 1);
  CHECK_FALSE(r.off_lattice);
  REQUIRE(r.nodes.size() == 1);
  Point3 p = r.node_point(r.nodes[0]);
  CHECK((p - Point3(0.5, 0.5, 0.5)).norm() <= 1e-12);
  DiscreteLaplacian L = assemble_laplacian(r);
  REQUIRE(L.op.rows() == 1);
  CHECK(L.op.coeff(0, 0) == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("unit square at h=1/2 gives the 2D operator [16]") {
  Assembly sq = unit_square_assembly();
  RasterDomain r = rasterize(sq, 0.5);
  CHECK(r.n_interior == 1);
  DiscreteLaplacian L = assemble_laplacian(r);
  REQUIRE(L.op.rows() == 1);
  CHECK(L.op.coeff(0, 0) == doctest::Approx(16.0).epsilon(1e-14));
  // The central node sits on the glued hypotenuse and must count as interior.
  Point3 p = r.node_point(r.nodes[0]);
  CHECK((p - Point3(0.5, 0.5, 0.0)).norm() <= 1e-12);
}

TEST_CASE("box spectra match the closed-form grid eigenvalues") {
  SUBCASE("cube h=1/4, full dense spectrum") {
    RasterDomain r = rasterize(unit_cube_assembly(), 0.25);
    CHECK(r.n_interior == 27);
    Spectrum s = lowest_eigenvalues(assemble_laplacian(r), 27);
    auto oracle = box_fd_oracle({1, 1, 1}, 0.25);
    REQUIRE(oracle.size() == 27);
    for (int k = 0; k < 27; ++k)
      CHECK(std::abs(s.eigenvalues[size_t(k)] - oracle[size_t(k)]) <=
            1e-10 * oracle[size_t(k)]);
  }
  SUBCASE("square h=1/8, 2D dense path") {
    RasterDomain r = rasterize(unit_square_assembly(), 0.125);
    CHECK(r.n_interior == 49);
    Spectrum s = lowest_eigenvalues(assemble_laplacian(r), 49);
    auto oracle = box_fd_oracle({1, 1}, 0.125);
    for (int k = 0; k < 49; ++k)
      CHECK(std::abs(s.eigenvalues[size_t(k)] - oracle[size_t(k)]) <=
            1e-10 * oracle[size_t(k)]);
  }
  SUBCASE("cube h=1/16 exercises the sparse shift-invert path") {
    RasterDomain r = rasterize(unit_cube_assembly(), 1.0 / 16);
    CHECK(r.n_interior == 15 * 15 * 15);
    Spectrum s = lowest_eigenvalues(assemble_laplacian(r), 25);
    CHECK(s.iterations > 0);  // iterative path, not dense
    auto oracle = box_fd_oracle({1, 1, 1}, 1.0 / 16);
    for (int k = 0; k < 25; ++k) {
      CHECK(std::abs(s.eigenvalues[size_t(k)] - oracle[size_t(k)]) <=
            1e-10 * oracle[size_t(k)]);
      CHECK(s.residuals[size_t(k)] <= s.tol * s.eigenvalues[size_t(k)]);
    }
  }
}

TEST_CASE("seven-tile rasters: equal node counts, slits excluded") {
  FamilyPair fam = catalog_family("7_1");
  Assembly a = build_assembly(fam.left, basic_simplex());
  Assembly b = build_assembly(fam.right, basic_simplex());
  RasterDomain ra = rasterize(a, 0.05);
  RasterDomain rb = rasterize(b, 0.05);
  CHECK(ra.n_interior == rb.n_interior);
  CHECK(ra.n_interior > 5000);
  CHECK_FALSE(ra.off_lattice);

  // (0.25, 0.25, 1.25) lies strictly inside the slit triangle
  // {(0,0,1), (1,1,1), (0,0,2)} shared by tiles 1 and 6: excluded.
  auto grid = [&](double x, double y, double z) {
    Point3 g = (Point3(x, y, z) - ra.origin) / ra.h;
    return std::array<int, 3>{int(std::lround(g.x())), int(std::lround(g.y())),
                              int(std::lround(g.z()))};
  };
  auto slit = grid(0.25, 0.25, 1.25);
  CHECK_FALSE(ra.is_interior(slit[0], slit[1], slit[2]));
  // A node on the glued face z=1 between tiles 0 and 1 is interior.
  auto glued = grid(0.5, 0.25, 1.0);
  CHECK(ra.is_interior(glued[0], glued[1], glued[2]));
  // A node on the outer fixed face y=0 is boundary.
  auto outer = grid(0.5, 0.0, 0.5);
  CHECK_FALSE(ra.is_interior(outer[0], outer[1], outer[2]));

  SUBCASE("operator is exactly symmetric with the documented stencil") {
    DiscreteLaplacian L = assemble_laplacian(ra);
    Eigen::SparseMatrix<double> diff = L.op - Eigen::SparseMatrix<double>(L.op.transpose());
    CHECK(diff.norm() == 0.0);
    double ih2 = 1.0 / (0.05 * 0.05);
    for (int k = 0; k < L.op.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(L.op, k); it; ++it)
        CHECK((it.row() == it.col() ? it.value() == 6.0 * ih2
                                    : it.value() == -ih2));
  }
  SUBCASE("the pair's coarse spectra agree to solver precision") {
    RasterDomain ca = rasterize(a, 0.1);
    RasterDomain cb = rasterize(b, 0.1);
    CHECK(ca.n_interior == cb.n_interior);
    Spectrum sa = lowest_eigenvalues(assemble_laplacian(ca), 15);
    Spectrum sb = lowest_eigenvalues(assemble_laplacian(cb), 15);
    ComparisonReport rep = compare_spectra(sa, sb, 15);
    CHECK(rep.max_abs_diff <= 1e-8);
    CHECK(sa.eigenvalues[0] > 0.0);
    CHECK(std::is_sorted(sa.eigenvalues.begin(), sa.eigenvalues.end()));
  }
}

TEST_CASE("rasterize rejects overlap; empty interiors are reported") {
  GluingGraph wind;
  wind.n_tiles = 5;
  for (auto& v : wind.glue) v.assign(5, GlueTarget());
  const Color seq[4] = {Color::Red, Color::Blue, Color::Red, Color::Blue};
  for (int i = 0; i < 4; ++i) {
    wind.of(seq[i])[i] = i + 1;
    wind.of(seq[i])[i + 1] = i;
  }
  Assembly overlapping = build_assembly(wind, gww_triangle());
  CHECK_THROWS_AS(rasterize(overlapping, 0.25), Error);

  Assembly one_triangle = build_assembly(single_tile_graph(), gww_triangle());
  RasterDomain r = rasterize(one_triangle, 0.5);
  CHECK(r.n_interior == 0);
  CHECK_THROWS_AS(assemble_laplacian(r), Error);

  CHECK_THROWS_AS(rasterize(one_triangle, 0.0), Error);
  CHECK_THROWS_AS(rasterize(one_triangle, -0.1), Error);
}

TEST_CASE("off-lattice vertices raise the warning flag but still rasterize") {
  Assembly tri = build_assembly(single_tile_graph(), equilateral_triangle());
  RasterDomain r = rasterize(tri, 0.25);
  CHECK(r.off_lattice);
  CHECK(r.n_interior >= 3);
}

TEST_CASE("eigensolver reproducibility and input validation") {
  RasterDomain r = rasterize(unit_cube_assembly(), 1.0 / 16);
  DiscreteLaplacian L = assemble_laplacian(r);
  Spectrum s1 = lowest_eigenvalues(L, 10, 1e-10, 1234);
  Spectrum s2 = lowest_eigenvalues(L, 10, 1e-10, 1234);
  CHECK(s1.eigenvalues == s2.eigenvalues);  // bitwise deterministic
  CHECK_THROWS_AS(lowest_eigenvalues(L, 0), Error);
  CHECK_THROWS_AS(lowest_eigenvalues(L, r.n_interior + 1), Error);
}

TEST_CASE("compare_spectra aggregates") {
  Spectrum a, b;
  a.eigenvalues = {1.0, 2.0, 3.0};
  b.eigenvalues = {1.0, 2.5, 3.0};
  ComparisonReport self = compare_spectra(a, a, 3);
  CHECK(self.max_abs_diff == 0.0);
  CHECK(self.l2_diff == 0.0);
  ComparisonReport rep = compare_spectra(a, b, 3);
  CHECK(rep.max_abs_diff == doctest::Approx(0.5));
  CHECK(rep.l2_diff == doctest::Approx(0.5));
  CHECK(rep.abs_diffs.size() == 3);
  CHECK_THROWS_AS(compare_spectra(a, b, 4), Error);
}

TEST_CASE("spectrum CSV layout") {
  Spectrum a, b;
  a.eigenvalues = {44.47181234567, 62.8210};
  b.eigenvalues = {44.47181234567, 62.8211};
  std::string two = spectrum_csv(a, &b, 2);
  CHECK(two ==
        "k,lambda_A,lambda_B,abs_diff\n"
        "1,44.47181235,44.47181235,0.0000e+00\n"
        "2,62.821,62.8211,1.0000e-04\n");
  std::string one = spectrum_csv(a, nullptr, 1);
  CHECK(one == "k,lambda_A\n1,44.47181235\n");
  CHECK_THROWS_AS(spectrum_csv(a, &b, 3), Error);
}

TEST_CASE("transplanting with the identity reproduces the source") {
  Assembly a = build_assembly(catalog_family("7_1").left, basic_simplex());
  RasterDomain r = rasterize(a, 0.1);
  Spectrum s = lowest_eigenvalues(assemble_laplacian(r), 1, 1e-10, kDefaultSeed,
                                  true);
  IntMatrix eye = IntMatrix::Identity(7, 7);
  TransplantReport rep = transplant_grid_function(a, r, s.eigenvectors.col(0),
                                                  a, r, eye, 1.0);
  CHECK(rep.unmapped_nodes == 0);
  CHECK((rep.values - s.eigenvectors.col(0)).norm() <= 1e-9);
  CHECK(std::abs(rep.rayleigh - s.eigenvalues[0]) <= 1e-8);
}

TEST_CASE("ground state transplants across the first seven-tile pair") {
  FamilyPair fam = catalog_family("7_1");
  Assembly a = build_assembly(fam.left, basic_simplex());
  Assembly b = build_assembly(fam.right, basic_simplex());
  RasterDomain ra = rasterize(a, 0.1);
  RasterDomain rb = rasterize(b, 0.1);
  Spectrum sa = lowest_eigenvalues(assemble_laplacian(ra), 1, 1e-10,
                                   kDefaultSeed, true);
  Spectrum sb = lowest_eigenvalues(assemble_laplacian(rb), 1);

  auto basis = solve_transplantation(
      to_signed_matrices(fam.left, SignConvention::Dirichlet),
      to_signed_matrices(fam.right, SignConvention::Dirichlet));
  REQUIRE(basis.dimension() == 2);
  // Any nonsingular combination works; use the first basis element alone if
  // nonsingular, else the sum.
  IntMatrix T = basis.basis[0] + basis.basis[1];
  TransplantReport rep = transplant_grid_function(
      a, ra, sa.eigenvectors.col(0), b, rb, T, 1.0);
  CHECK(rep.unmapped_nodes == 0);
  CHECK(rep.values.norm() > 0.0);
  CHECK(std::abs(rep.rayleigh - sb.eigenvalues[0]) <=
        0.02 * sb.eigenvalues[0]);

  SUBCASE("shape validation") {
    IntMatrix bad = IntMatrix::Identity(6, 7);
    CHECK_THROWS_AS(transplant_grid_function(a, ra, sa.eigenvectors.col(0), b,
                                             rb, bad, 1.0),
                    Error);
    Eigen::VectorXd short_vec(3);
    short_vec.setZero();
    CHECK_THROWS_AS(
        transplant_grid_function(a, ra, short_vec, b, rb, T, 1.0), Error);
  }
}

TEST_CASE("the singular basis combination annihilates the ground state") {
  // The two-dimensional solution space contains singular combinations; the
  // grid ground state lies in the kernel of their transplant action, while a
  // generic higher mode does not.
  FamilyPair fam = catalog_family("7_1");
  Assembly a = build_assembly(fam.left, basic_simplex());
  Assembly b = build_assembly(fam.right, basic_simplex());
  RasterDomain ra = rasterize(a, 0.1);
  RasterDomain rb = rasterize(b, 0.1);
  Spectrum sa = lowest_eigenvalues(assemble_laplacian(ra), 12, 1e-10,
                                   kDefaultSeed, true);

  auto basis = solve_transplantation(
      to_signed_matrices(fam.left, SignConvention::Dirichlet),
      to_signed_matrices(fam.right, SignConvention::Dirichlet));
  REQUIRE(basis.dimension() == 2);
  IntMatrix singular;
  bool found = false;
  for (int p = -3; p <= 3 && !found; ++p)
    for (int q = -3; q <= 3 && !found; ++q) {
      if (p == 0 && q == 0) continue;
      IntMatrix cand = p * basis.basis[0] + q * basis.basis[1];
      if (std::abs(cand.cast<double>().determinant()) < 1e-9) {
        singular = cand;
        found = true;
      }
    }
  REQUIRE(found);

  TransplantReport ground = transplant_grid_function(
      a, ra, sa.eigenvectors.col(0), b, rb, singular, 1.0);
  TransplantReport high = transplant_grid_function(
      a, ra, sa.eigenvectors.col(11), b, rb, singular, 1.0);
  double u_norm = sa.eigenvectors.col(0).norm();
  CHECK(ground.values.norm() <= 1e-9 * u_norm);
  CHECK(high.values.norm() >= 0.1 * u_norm);
}

TEST_CASE("prism spectra separate into 2D modes plus axial terms") {
  // Extruded unit square of height 1 = unit cube; its FD spectrum must be
  // the Kronecker sum of the square's and the interval's grid eigenvalues.
  Assembly flat = unit_square_assembly();
  Assembly prism = extrude_prism(flat, 1.0);
  RasterDomain r = rasterize(prism, 0.25);
  CHECK(r.n_interior == 27);
  Spectrum s = lowest_eigenvalues(assemble_laplacian(r), 27);
  auto oracle = box_fd_oracle({1, 1, 1}, 0.25);
  for (int k = 0; k < 27; ++k)
    CHECK(std::abs(s.eigenvalues[size_t(k)] - oracle[size_t(k)]) <=
          1e-10 * oracle[size_t(k)]);
}
