#include "isodrum/signed_matrices.hpp"

#include <doctest.h>

#include "isodrum/catalog.hpp"

using namespace isodrum;

namespace {

IntMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (long long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// The three left-graph matrices of the 7-tile rule with glued pairs
// red (0,1)(3,6), blue (0,2)(1,4), black (0,3)(2,5), under the reflecting
// (+1 diagonal) convention.
const IntMatrix kA1 = from_rows({{0, 1, 0, 0, 0, 0, 0},
                                 {1, 0, 0, 0, 0, 0, 0},
                                 {0, 0, 1, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 0, 1},
                                 {0, 0, 0, 0, 1, 0, 0},
                                 {0, 0, 0, 0, 0, 1, 0},
                                 {0, 0, 0, 1, 0, 0, 0}});
const IntMatrix kA2 = from_rows({{0, 0, 1, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 1, 0, 0},
                                 {1, 0, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 1, 0, 0, 0},
                                 {0, 1, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 1, 0},
                                 {0, 0, 0, 0, 0, 0, 1}});
const IntMatrix kA3 = from_rows({{0, 0, 0, 1, 0, 0, 0},
                                 {0, 1, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 1, 0},
                                 {1, 0, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 1, 0, 0},
                                 {0, 0, 1, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 0, 1}});
const IntMatrix kB1 = from_rows({{0, 1, 0, 0, 0, 0, 0},
                                 {1, 0, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 1, 0},
                                 {0, 0, 0, 1, 0, 0, 0},
                                 {0, 0, 0, 0, 1, 0, 0},
                                 {0, 0, 1, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 0, 1}});
const IntMatrix kB2 = from_rows({{0, 0, 1, 0, 0, 0, 0},
                                 {0, 1, 0, 0, 0, 0, 0},
                                 {1, 0, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 0, 1},
                                 {0, 0, 0, 0, 1, 0, 0},
                                 {0, 0, 0, 0, 0, 1, 0},
                                 {0, 0, 0, 1, 0, 0, 0}});
const IntMatrix kB3 = from_rows({{0, 0, 0, 1, 0, 0, 0},
                                 {0, 0, 0, 0, 1, 0, 0},
                                 {0, 0, 1, 0, 0, 0, 0},
                                 {1, 0, 0, 0, 0, 0, 0},
                                 {0, 1, 0, 0, 0, 0, 0},
                                 {0, 0, 0, 0, 0, 1, 0},
                                 {0, 0, 0, 0, 0, 0, 1}});

}  // namespace

TEST_CASE("7_1 with the +1 convention reproduces the reference matrices") {
  FamilyPair p = catalog_family("7_1");
  MatrixTriple A = to_signed_matrices(p.left, SignConvention::Neumann);
  MatrixTriple B = to_signed_matrices(p.right, SignConvention::Neumann);
  CHECK(A[0] == kA1);
  CHECK(A[1] == kA2);
  CHECK(A[2] == kA3);
  CHECK(B[0] == kB1);
  CHECK(B[1] == kB2);
  CHECK(B[2] == kB3);
}

TEST_CASE("Dirichlet flips exactly the diagonal marks") {
  FamilyPair p = catalog_family("7_1");
  MatrixTriple n = to_signed_matrices(p.left, SignConvention::Neumann);
  MatrixTriple d = to_signed_matrices(p.left, SignConvention::Dirichlet);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        if (i == j)
          CHECK(d[k](i, i) == -n[k](i, i));
        else
          CHECK(d[k](i, j) == n[k](i, j));
      }
  }
}

TEST_CASE("single all-boundary tile gives three 1x1 matrices (-1)") {
  GluingGraph g;
  g.n_tiles = 1;
  for (auto& v : g.glue) v.assign(1, GlueTarget());
  MatrixTriple t = to_signed_matrices(g, SignConvention::Dirichlet);
  for (int k = 0; k < 3; ++k) {
    CHECK(t[k].rows() == 1);
    CHECK(t[k](0, 0) == -1);
  }
}

TEST_CASE("signed matrices are symmetric involutions up to diagonal sign") {
  for (const auto& id : catalog_family_ids()) {
    FamilyPair p = catalog_family(id);
    for (SignConvention conv : {SignConvention::Dirichlet, SignConvention::Neumann}) {
      for (const GluingGraph* g : {&p.left, &p.right}) {
        MatrixTriple t = to_signed_matrices(*g, conv);
        for (int k = 0; k < 3; ++k) {
          CHECK(t[k] == IntMatrix(t[k].transpose()));
          CHECK(is_signed_one_per_line(t[k]));
          // Squaring under absolute values gives the identity.
          IntMatrix sq = t[k].cwiseAbs() * t[k].cwiseAbs();
          CHECK(sq == IntMatrix(IntMatrix::Identity(g->n_tiles, g->n_tiles)));
          if (conv == SignConvention::Neumann)
            CHECK(t[k] * t[k] ==
                  IntMatrix(IntMatrix::Identity(g->n_tiles, g->n_tiles)));
        }
      }
    }
  }
}

TEST_CASE("permuting colors commutes with building matrices") {
  FamilyPair p = catalog_family("7_2");
  std::array<Color, 3> perm = {Color::Black, Color::Red, Color::Blue};
  FamilyPair q = permute_colors(p, perm);
  MatrixTriple direct = to_signed_matrices(q.left, SignConvention::Dirichlet);
  MatrixTriple moved =
      permute_matrix_triple(to_signed_matrices(p.left, SignConvention::Dirichlet), perm);
  for (int k = 0; k < 3; ++k) CHECK(direct[k] == moved[k]);
}
