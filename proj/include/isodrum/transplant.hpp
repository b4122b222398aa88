#pragma once

#include "isodrum/error.hpp"
#include "isodrum/rational.hpp"
#include "isodrum/signed_matrices.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace isodrum {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

inline RationalMatrix to_rational(const IntMatrix& m) {
  RationalMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

// Exact rational basis of {T : T A^nu = B^nu T for all three colors},
// normalized to integer matrices with content 1 and positive leading entry.
struct TransplantationBasis {
  int n_tiles = 0;
  std::vector<IntMatrix> basis;

  int dimension() const { return static_cast<int>(basis.size()); }
};

namespace detail {

// One row of the exact sparse RREF: sorted (column, coefficient) pairs.
using SparseRow = std::vector<std::pair<int, Rational>>;

inline void add_scaled(SparseRow& dst, const SparseRow& src, const Rational& s) {
  SparseRow out;
  out.reserve(dst.size() + src.size());
  size_t a = 0, b = 0;
  while (a < dst.size() || b < src.size()) {
    if (b == src.size() || (a < dst.size() && dst[a].first < src[b].first)) {
      out.push_back(dst[a++]);
    } else if (a == dst.size() || src[b].first < dst[a].first) {
      Rational v = s * src[b].second;
      if (!v.is_zero()) out.emplace_back(src[b].first, v);
      ++b;
    } else {
      Rational v = dst[a].second + s * src[b].second;
      if (!v.is_zero()) out.emplace_back(dst[a].first, v);
      ++a;
      ++b;
    }
  }
  dst = std::move(out);
}

// Incremental exact reduced row echelon form keyed by pivot column. The
// transplantation constraints have at most two nonzeros each, so rows stay
// short and the elimination is effectively linear time.
class ExactRref {
 public:
  // Returns false when the row reduced to zero (no new pivot).
  bool insert(SparseRow row) {
    reduce(row);
    if (row.empty()) return false;
    // Clear pivot columns from the tail as well, so stored rows are in fully
    // reduced form (pivot column + free columns only).
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t k = 1; k < row.size(); ++k) {
        auto it = pivots_.find(row[k].first);
        if (it != pivots_.end()) {
          add_scaled(row, it->second, -row[k].second);
          changed = true;
          break;
        }
      }
    }
    Rational lead = row.front().second;
    for (auto& e : row) e.second /= lead;
    int pc = row.front().first;
    for (auto& [col, prow] : pivots_) {
      auto it = std::lower_bound(prow.begin(), prow.end(), pc,
                                 [](const auto& e, int c) { return e.first < c; });
      if (it != prow.end() && it->first == pc) {
        Rational coeff = it->second;
        add_scaled(prow, row, -coeff);
      }
    }
    pivots_.emplace(pc, std::move(row));
    return true;
  }

  int rank() const { return static_cast<int>(pivots_.size()); }

  // Nullspace basis over n_cols unknowns: one vector per free column, with a
  // 1 in the free position; deterministic (free columns ascending).
  std::vector<std::vector<Rational>> nullspace(int n_cols) const {
    std::vector<std::vector<Rational>> out;
    for (int f = 0; f < n_cols; ++f) {
      if (pivots_.count(f)) continue;
      std::vector<Rational> x(n_cols, Rational(0));
      x[f] = Rational(1);
      for (const auto& [pc, prow] : pivots_) {
        auto it = std::lower_bound(prow.begin(), prow.end(), f,
                                   [](const auto& e, int c) { return e.first < c; });
        if (it != prow.end() && it->first == f) x[pc] = -it->second;
      }
      out.push_back(std::move(x));
    }
    return out;
  }

 private:
  void reduce(SparseRow& row) const {
    while (!row.empty()) {
      auto it = pivots_.find(row.front().first);
      if (it == pivots_.end()) return;
      add_scaled(row, it->second, -row.front().second);
    }
  }

  std::map<int, SparseRow> pivots_;
};

inline long long llgcd(long long a, long long b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

// Scales a rational vector to integers with content 1 and positive leading
// entry, reshaped as an n x n matrix (row-major cells).
inline IntMatrix normalize_to_int_matrix(const std::vector<Rational>& x, int n) {
  long long lcm = 1;
  for (const Rational& v : x)
    if (!v.is_zero()) lcm = lcm / llgcd(lcm, v.den()) * v.den();
  long long content = 0;
  std::vector<long long> scaled(x.size(), 0);
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].is_zero()) continue;
    Rational s = x[k] * Rational(lcm);
    scaled[k] = s.num();  // integral by construction
    content = llgcd(content, scaled[k]);
  }
  if (content == 0) content = 1;
  long long lead = 0;
  for (long long v : scaled)
    if (v != 0) { lead = v; break; }
  long long sign = lead < 0 ? -1 : 1;
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scaled[i * n + j] / content * sign;
  return m;
}

}  // namespace detail

// Solves T A^nu = B^nu T exactly. The 3 N^2 linear constraints on the N^2
// entries of T (each with at most two nonzero coefficients, because every
// A^nu/B^nu has exactly one signed entry per row and column) are stacked and
// reduced by exact fraction-free elimination; the nullspace is returned as a
// canonically normalized integer basis sorted by leading cell.
inline TransplantationBasis solve_transplantation(const MatrixTriple& A,
                                                  const MatrixTriple& B) {
  const Eigen::Index n = A[0].rows();
  for (int k = 0; k < 3; ++k) {
    if (A[k].rows() != n || A[k].cols() != n || B[k].rows() != n || B[k].cols() != n)
      fail(ErrorCode::Shape, "A and B triples must share one square size");
    if (!is_signed_one_per_line(A[k]) || !is_signed_one_per_line(B[k]))
      fail(ErrorCode::Shape,
           "each color matrix needs exactly one +-1 per row and column");
  }
  const int N = static_cast<int>(n);
  detail::ExactRref rref;
  for (int k = 0; k < 3; ++k) {
    // alpha(j): the row holding column j's nonzero of A^k; beta(i): the
    // column holding row i's nonzero of B^k.
    std::vector<int> alpha(N), beta(N);
    std::vector<long long> sa(N), sb(N);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i)
        if (A[k](i, j) != 0) { alpha[j] = i; sa[j] = A[k](i, j); }
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (B[k](i, j) != 0) { beta[i] = j; sb[i] = B[k](i, j); }
    // (T A)_{ij} = sa(j) T_{i, alpha(j)}; (B T)_{ij} = sb(i) T_{beta(i), j}.
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        int cell_a = i * N + alpha[j];
        int cell_b = beta[i] * N + j;
        detail::SparseRow row;
        if (cell_a == cell_b) {
          long long c = sa[j] - sb[i];
          if (c != 0) row.emplace_back(cell_a, Rational(c));
        } else {
          int c0 = std::min(cell_a, cell_b);
          int c1 = std::max(cell_a, cell_b);
          row.emplace_back(c0, Rational(c0 == cell_a ? sa[j] : -sb[i]));
          row.emplace_back(c1, Rational(c1 == cell_a ? sa[j] : -sb[i]));
        }
        if (!row.empty()) rref.insert(std::move(row));
      }
    }
  }
  TransplantationBasis out;
  out.n_tiles = N;
  for (const auto& x : rref.nullspace(N * N))
    out.basis.push_back(detail::normalize_to_int_matrix(x, N));
  std::sort(out.basis.begin(), out.basis.end(),
            [N](const IntMatrix& a, const IntMatrix& b) {
              for (int c = 0; c < N * N; ++c) {
                long long av = a(c / N, c % N), bv = b(c / N, c % N);
                if ((av != 0) != (bv != 0)) return av != 0;
                if (av != bv) return av < bv;
              }
              return false;
            });
  return out;
}

// Exact residuals T A^nu - B^nu T, one matrix per color.
struct VerificationReport {
  std::array<RationalMatrix, 3> residuals;
  bool all_zero = false;

  // Largest absolute residual entry, as a double (0 means bit-exact zero).
  double max_abs() const {
    Rational m(0);
    for (const auto& r : residuals)
      for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
          Rational a = abs(r(i, j));
          if (m < a) m = a;
        }
    return m.to_double();
  }
};

inline VerificationReport verify_transplantation(const RationalMatrix& T,
                                                 const MatrixTriple& A,
                                                 const MatrixTriple& B) {
  const Eigen::Index n = T.rows();
  if (T.cols() != n) fail(ErrorCode::Shape, "T must be square");
  VerificationReport rep;
  rep.all_zero = true;
  for (int k = 0; k < 3; ++k) {
    if (A[k].rows() != n || B[k].rows() != n)
      fail(ErrorCode::Shape, "matrix triple size does not match T");
    RationalMatrix r = T * to_rational(A[k]) - to_rational(B[k]) * T;
    for (Eigen::Index i = 0; i < n && rep.all_zero; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (!r(i, j).is_zero()) { rep.all_zero = false; break; }
    rep.residuals[k] = std::move(r);
  }
  return rep;
}

inline VerificationReport verify_transplantation(const IntMatrix& T,
                                                 const MatrixTriple& A,
                                                 const MatrixTriple& B) {
  return verify_transplantation(to_rational(T), A, B);
}

// The two constant-support representatives of a two-dimensional solution
// space, with their shared row/column counts (k, m); counts are empty when no
// constant-support pair exists (signature Unknown — reported, not fatal).
struct DecompositionSignature {
  std::optional<std::pair<int, int>> counts;
  std::vector<IntMatrix> representatives;
};

namespace detail {

// Projective direction of (a, b), normalized to coprime integers with
// positive leading entry, as a comparable key.
inline std::pair<long long, long long> ratio_key(long long a, long long b) {
  long long g = llgcd(a, b);
  if (g == 0) return {0, 0};
  a /= g;
  b /= g;
  if (a < 0 || (a == 0 && b < 0)) { a = -a; b = -b; }
  return {a, b};
}

inline bool constant_support_counts(const IntMatrix& m, int& count) {
  const int n = static_cast<int>(m.rows());
  int row0 = 0, col0 = 0;
  for (int j = 0; j < n; ++j) {
    if (m(0, j) != 0) ++row0;
    if (m(j, 0) != 0) ++col0;
  }
  if (row0 == 0 || row0 != col0) return false;
  for (int i = 1; i < n; ++i) {
    int r = 0, c = 0;
    for (int j = 0; j < n; ++j) {
      if (m(i, j) != 0) ++r;
      if (m(j, i) != 0) ++c;
    }
    if (r != row0 || c != row0) return false;
  }
  count = row0;
  return true;
}

}  // namespace detail

// Splits a dimension-2 basis into its two canonical representatives: cells
// are clustered by the projective ratio of their two basis values, and each
// cluster's annihilating combination yields one representative. Returns the
// sorted (k, m) support counts when both representatives have constant
// row/column support.
inline DecompositionSignature decomposition_signature(const TransplantationBasis& b) {
  if (b.dimension() != 2)
    fail(ErrorCode::Shape, "decomposition signature requires a dimension-2 basis");
  const int n = b.n_tiles;
  const IntMatrix& m1 = b.basis[0];
  const IntMatrix& m2 = b.basis[1];
  std::map<std::pair<long long, long long>, int> clusters;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (m1(i, j) == 0 && m2(i, j) == 0) continue;
      clusters[detail::ratio_key(m1(i, j), m2(i, j))]++;
    }
  DecompositionSignature sig;
  if (clusters.size() != 2) return sig;
  std::vector<std::pair<long long, long long>> dirs;
  for (const auto& [k, cnt] : clusters) dirs.push_back(k);
  std::vector<IntMatrix> reps;
  std::vector<int> counts;
  for (int r = 0; r < 2; ++r) {
    // Annihilate the *other* cluster: q_other * M1 - p_other * M2.
    auto [p, q] = dirs[1 - r];
    IntMatrix rep = q * m1 - p * m2;
    long long content = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) content = detail::llgcd(content, rep(i, j));
    if (content > 1) rep /= content;
    long long lead = 0;
    for (int c = 0; c < n * n && lead == 0; ++c) lead = rep(c / n, c % n);
    if (lead < 0) rep = -rep;
    int cnt = 0;
    if (!detail::constant_support_counts(rep, cnt)) return sig;
    reps.push_back(std::move(rep));
    counts.push_back(cnt);
  }
  if (counts[0] > counts[1]) {
    std::swap(counts[0], counts[1]);
    std::swap(reps[0], reps[1]);
  }
  sig.counts = std::make_pair(counts[0], counts[1]);
  sig.representatives = std::move(reps);
  return sig;
}

namespace detail {

// Determinant of an integer matrix modulo a prime, by Gaussian elimination
// over the prime field. Used as an exact nonzero witness for the polynomial
// identity test in is_nontrivial.
inline std::uint64_t det_mod_p(std::vector<std::vector<std::uint64_t>> m,
                               std::uint64_t p) {
  const size_t n = m.size();
  auto mulmod = [p](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((__int128)a * b % p);
  };
  auto powmod = [&](std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = p - det;
      if (det == p) det = 0;
    }
    det = mulmod(det, m[c][c]);
    std::uint64_t inv = powmod(m[c][c], p - 2);
    for (size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      std::uint64_t f = mulmod(m[r][c], inv);
      for (size_t k = c; k < n; ++k) {
        std::uint64_t sub = mulmod(f, m[c][k]);
        m[r][k] = m[r][k] >= sub ? m[r][k] - sub : m[r][k] + p - sub;
      }
    }
  }
  return det;
}

inline std::uint64_t to_mod(long long v, std::uint64_t p) {
  long long r = v % static_cast<long long>(p);
  if (r < 0) r += static_cast<long long>(p);
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

// True iff the solution span contains an invertible element and no invertible
// element of the span is a signed permutation matrix times a scalar.
//
// The basis produced by solve_transplantation has pairwise disjoint supports
// (the constraints partition the cells into sign classes), which makes both
// questions decidable exactly:
//   - a signed-permutation multiple exists in the span iff some subset of
//     basis supports covers every row and column exactly once with constant
//     entry magnitude (any signs then work, and such an element is always
//     invertible);
//   - invertibility of some span element is a polynomial identity test on
//     det(sum c_k M_k), decided on an integer grid large enough for its
//     per-variable degree, with modular determinants as nonzero witnesses.
inline bool is_nontrivial(const TransplantationBasis& b) {
  const int dim = b.dimension();
  if (dim == 0) return false;
  const int n = b.n_tiles;

  // Disjoint-support and per-element constant-magnitude bookkeeping.
  std::vector<const IntMatrix*> mats;
  for (const auto& m : b.basis) mats.push_back(&m);
  std::vector<long long> magnitude(dim, 0);  // 0 = mixed magnitudes
  for (int k = 0; k < dim; ++k) {
    long long mag = -1;
    bool constant = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long long v = (*mats[k])(i, j);
        if (v == 0) continue;
        long long a = v < 0 ? -v : v;
        if (mag < 0)
          mag = a;
        else if (mag != a)
          constant = false;
        for (int l = 0; l < k; ++l)
          if ((*mats[l])(i, j) != 0)
            fail(ErrorCode::Shape,
                 "is_nontrivial expects the disjoint-support basis produced by "
                 "solve_transplantation");
      }
    magnitude[k] = constant ? mag : 0;
  }

  // Signed-permutation search over support subsets.
  std::vector<std::vector<int>> row_cnt(dim, std::vector<int>(n, 0));
  std::vector<std::vector<int>> col_cnt(dim, std::vector<int>(n, 0));
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if ((*mats[k])(i, j) != 0) {
          ++row_cnt[k][i];
          ++col_cnt[k][j];
        }
  const std::uint32_t subsets = 1u << dim;
  for (std::uint32_t s = 1; s < subsets; ++s) {
    bool magnitudes_ok = true;
    for (int k = 0; k < dim && magnitudes_ok; ++k)
      if ((s >> k & 1u) && magnitude[k] == 0) magnitudes_ok = false;
    if (!magnitudes_ok) continue;
    bool unit = true;
    for (int i = 0; i < n && unit; ++i) {
      int r = 0, c = 0;
      for (int k = 0; k < dim; ++k)
        if (s >> k & 1u) {
          r += row_cnt[k][i];
          c += col_cnt[k][i];
        }
      unit = (r == 1 && c == 1);
    }
    if (unit) return false;  // a signed permutation (times a scalar) is in the span
  }

  // Invertible-element existence via det(sum c_k M_k) as a polynomial in the
  // c_k (per-variable degree <= n): nonzero iff it is nonzero somewhere on a
  // (n+1)-point-per-variable grid. A nonzero modular determinant certifies
  // invertibility; grid sizes beyond the cap fall back to scattered points,
  // which can only under-report invertibility (never claim it falsely).
  constexpr std::uint64_t kPrimes[2] = {2305843009213693951ull,  // 2^61 - 1
                                        1152921504606846883ull};
  const long long grid = n + 1;
  double total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<double>(grid);
  const long long cap = 200000;
  std::vector<long long> coef(dim, 0);
  auto det_nonzero = [&](const std::vector<long long>& c) {
    for (std::uint64_t p : kPrimes) {
      std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n, 0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          long long v = 0;
          for (int k = 0; k < dim; ++k) v += c[k] * (*mats[k])(i, j);
          m[i][j] = detail::to_mod(v, p);
        }
      if (detail::det_mod_p(std::move(m), p) != 0) return true;
    }
    return false;
  };
  if (total <= static_cast<double>(cap)) {
    std::vector<int> idx(dim, 0);
    while (true) {
      for (int k = 0; k < dim; ++k) coef[k] = idx[k];
      bool all_zero_point = std::all_of(coef.begin(), coef.end(),
                                        [](long long v) { return v == 0; });
      if (!all_zero_point && det_nonzero(coef)) return true;
      int k = 0;
      while (k < dim && ++idx[k] == grid) idx[k++] = 0;
      if (k == dim) break;
    }
    return false;  // det vanishes identically on the span
  }
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (int trial = 0; trial < 64; ++trial) {
    for (int k = 0; k < dim; ++k) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      coef[k] = static_cast<long long>(state >> 40);
    }
    if (det_nonzero(coef)) return true;
  }
  return false;
}

// phi_i = C * sum_j T_ij phi_j on per-tile coefficient vectors.
inline Eigen::VectorXd transplant_coefficients(const IntMatrix& T,
                                               const Eigen::VectorXd& v, double C) {
  if (T.cols() != v.size())
    fail(ErrorCode::Shape, "coefficient vector length does not match T");
  return C * (T.cast<double>() * v);
}

// Plain-text matrix serialization: "matrix <rows> <cols>" then one row per
// line with integer or p/q entries.
inline std::string serialize_matrix(const RationalMatrix& m) {
  std::ostringstream out;
  out << "matrix " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << " ";
      out << m(i, j);
    }
    out << "\n";
  }
  return out.str();
}

inline std::string serialize_matrix(const IntMatrix& m) {
  return serialize_matrix(to_rational(m));
}

inline RationalMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> head >> rows >> cols) || head != "matrix" || rows <= 0 || cols <= 0)
    fail(ErrorCode::Syntax, "expected 'matrix <rows> <cols>' header");
  RationalMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) fail(ErrorCode::Syntax, "matrix body ended early");
      size_t slash = tok.find('/');
      try {
        if (slash == std::string::npos)
          m(i, j) = Rational(std::stoll(tok));
        else
          m(i, j) = Rational(std::stoll(tok.substr(0, slash)),
                             std::stoll(tok.substr(slash + 1)));
      } catch (const std::exception&) {
        fail(ErrorCode::Syntax, "bad matrix entry '" + tok + "'");
      }
    }
  return m;
}

}  // namespace isodrum
