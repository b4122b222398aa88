#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "isodrum/error.hpp"
#include "isodrum/raster.hpp"

namespace isodrum {

inline constexpr double kDefaultEigenTol = 1e-10;
inline constexpr std::uint64_t kDefaultSeed = 7132115;

// Ascending lowest eigenvalues of a discrete Dirichlet Laplacian, with the
// solver evidence that produced them.
struct Spectrum {
  std::vector<double> eigenvalues;   // ascending, with multiplicity
  Eigen::MatrixXd eigenvectors;      // one column per mode (may be empty)
  std::vector<double> residuals;     // ||L v - lambda v|| per mode
  double tol = 0.0;                  // requested relative residual bound
  int iterations = 0;                // Krylov blocks consumed (0 = dense path)
  double h = 0.0;                    // mesh size the operator was built at
};

namespace detail {

inline Spectrum dense_spectrum(const DiscreteLaplacian& L, int m, double tol,
                               bool want_vectors) {
  Eigen::MatrixXd dense(L.op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::Solver, "dense eigensolver failed to converge");
  Spectrum s;
  s.tol = tol;
  s.h = L.h;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  if (want_vectors) s.eigenvectors = es.eigenvectors().leftCols(m);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(k);
    s.residuals.push_back((L.op * v - s.eigenvalues[size_t(k)] * v).norm());
  }
  return s;
}

}  // namespace detail

// Computes the m smallest eigenvalues of the operator, each certified by a
// true residual ||L v - lambda v|| <= tol * lambda.  Small problems use a
// dense solver; larger ones run a block Lanczos iteration on L^{-1}
// (shift-invert at zero via a sparse LDLT factorization) with a seeded
// deterministic starting block and full reorthogonalization.
inline Spectrum lowest_eigenvalues(const DiscreteLaplacian& L, int m,
                                   double tol = kDefaultEigenTol,
                                   std::uint64_t seed = kDefaultSeed,
                                   bool want_vectors = false) {
  const int n = int(L.op.rows());
  if (m < 1 || m > n)
    fail(ErrorCode::Shape, "requested ", m, " modes from an operator of size ",
         n);
  if (n <= 2000) return detail::dense_spectrum(L, m, tol, want_vectors);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L.op);
  if (ldlt.info() != Eigen::Success)
    fail(ErrorCode::Solver, "sparse factorization of the operator failed");

  const int b = 2;  // block size
  const int max_cols = std::min(n, std::max(6 * m + 60, 120));
  Eigen::MatrixXd V(n, max_cols);
  std::vector<Eigen::Matrix2d> betas;  // B_j, upper triangular

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd W(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) W(i, j) = gauss(rng);
  {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    V.leftCols(b) =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, b);
  }

  Spectrum s;
  s.tol = tol;
  s.h = L.h;
  int cols = b;
  std::vector<Eigen::Matrix2d> alphas;
  double worst_rel = std::numeric_limits<double>::infinity();

  auto extract = [&](bool final_pass) -> bool {
    // Ritz pairs of the block-tridiagonal projection T (of L^{-1}) over the
    // completed Lanczos blocks.
    const int k = 2 * int(alphas.size());
    if (k < m) return false;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (size_t j = 0; j < alphas.size(); ++j) {
      T.block<2, 2>(2 * int(j), 2 * int(j)) =
          0.5 * (alphas[j] + alphas[j].transpose());
      if (2 * int(j) + 3 < k && j < betas.size()) {
        T.block<2, 2>(2 * int(j) + 2, 2 * int(j)) = betas[j];
        T.block<2, 2>(2 * int(j), 2 * int(j) + 2) = betas[j].transpose();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success) return false;
    // Largest eigenvalues of L^{-1} are the smallest of L.
    Eigen::MatrixXd Y(n, m);
    std::vector<double> lam(static_cast<size_t>(m));
    std::vector<double> res(static_cast<size_t>(m));
    worst_rel = 0.0;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd y = V.leftCols(k) * es.eigenvectors().col(k - 1 - i);
      y.normalize();
      double rayleigh = y.dot(L.op * y);
      double r = (L.op * y - rayleigh * y).norm();
      lam[size_t(i)] = rayleigh;
      res[size_t(i)] = r;
      Y.col(i) = y;
      worst_rel = std::max(worst_rel, r / std::max(rayleigh, 1e-300));
    }
    if (worst_rel <= tol || final_pass) {
      std::vector<int> order(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) order[size_t(i)] = i;
      std::sort(order.begin(), order.end(),
                [&](int x, int y) { return lam[size_t(x)] < lam[size_t(y)]; });
      s.eigenvalues.clear();
      s.residuals.clear();
      if (want_vectors) s.eigenvectors.resize(n, m);
      for (int i = 0; i < m; ++i) {
        s.eigenvalues.push_back(lam[size_t(order[size_t(i)])]);
        s.residuals.push_back(res[size_t(order[size_t(i)])]);
        if (want_vectors) s.eigenvectors.col(i) = Y.col(order[size_t(i)]);
      }
      return worst_rel <= tol;
    }
    return false;
  };

  while (cols + b <= max_cols) {
    const int j = cols / b - 1;
    Eigen::MatrixXd Vj = V.middleCols(b * j, b);
    W = ldlt.solve(Vj);
    if (j > 0) W.noalias() -= V.middleCols(b * (j - 1), b) * betas[size_t(j - 1)].transpose();
    Eigen::Matrix2d alpha = Vj.transpose() * W;
    alphas.push_back(alpha);
    W.noalias() -= Vj * alpha;
    // Full reorthogonalization, twice for stability.
    for (int pass = 0; pass < 2; ++pass)
      W.noalias() -= V.leftCols(cols) * (V.leftCols(cols).transpose() * W);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    Eigen::Matrix2d beta =
        qr.matrixQR().topLeftCorner(b, b).triangularView<Eigen::Upper>();
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);
    // A tiny beta signals an invariant subspace; replace the block with
    // fresh randomness orthogonal to everything found so far.
    if (beta.norm() <= 1e-13) {
      for (int jj = 0; jj < b; ++jj)
        for (int i = 0; i < n; ++i) Q(i, jj) = gauss(rng);
      for (int pass = 0; pass < 2; ++pass)
        Q.noalias() -= V.leftCols(cols) * (V.leftCols(cols).transpose() * Q);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr2(Q);
      Q = qr2.householderQ() * Eigen::MatrixXd::Identity(n, b);
      beta.setZero();
    }
    V.middleCols(cols, b) = Q;
    betas.push_back(beta);
    cols += b;
    s.iterations = cols / b;
    if (cols >= std::min(2 * m + 8, max_cols) && extract(false)) return s;
  }
  extract(true);
  fail(ErrorCode::Solver, "eigensolver did not reach tol=", tol, " within ",
       max_cols, " Krylov columns; worst relative residual ", worst_rel);
}

}  // namespace isodrum
