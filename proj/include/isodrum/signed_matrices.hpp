#pragma once

#include "isodrum/gluing.hpp"

#include <Eigen/Core>

#include <array>

namespace isodrum {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixTriple = std::array<IntMatrix, 3>;

// Signed adjacency matrices of a gluing graph, one per color: entry (i, j) is
// 1 when the color glues i to j, the diagonal carries the convention's
// boundary mark, everything else is 0. Each matrix is symmetric with exactly
// one nonzero per row and column.
inline MatrixTriple to_signed_matrices(const GluingGraph& g, SignConvention conv) {
  validate_graph(g);
  MatrixTriple out;
  const int n = g.n_tiles;
  const int diag = boundary_sign(conv);
  for (Color c : kColors) {
    IntMatrix m = IntMatrix::Zero(n, n);
    const auto& glue = g.of(c);
    for (int i = 0; i < n; ++i) {
      if (glue[i])
        m(i, *glue[i]) = 1;
      else
        m(i, i) = diag;
    }
    out[color_index(c)] = std::move(m);
  }
  return out;
}

// Applies a color permutation to a matrix triple: the matrix built for color
// c moves to slot perm(c). permute_colors on the graph commutes with
// to_signed_matrices through this.
inline MatrixTriple permute_matrix_triple(const MatrixTriple& t,
                                          const std::array<Color, 3>& perm) {
  MatrixTriple out;
  for (int k = 0; k < 3; ++k) out[color_index(perm[k])] = t[k];
  return out;
}

// Checks the solve_transplantation precondition: three N x N matrices with
// exactly one entry of magnitude 1 per row and per column.
inline bool is_signed_one_per_line(const IntMatrix& m) {
  const long long n = m.rows();
  if (m.cols() != n) return false;
  for (long long i = 0; i < n; ++i) {
    int row_nz = 0, col_nz = 0;
    for (long long j = 0; j < n; ++j) {
      if (m(i, j) != 0) {
        if (m(i, j) != 1 && m(i, j) != -1) return false;
        ++row_nz;
      }
      if (m(j, i) != 0) ++col_nz;
    }
    if (row_nz != 1 || col_nz != 1) return false;
  }
  return true;
}

}  // namespace isodrum
