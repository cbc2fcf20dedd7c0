// src/manifold.cc

// Copyright 2026  The grasslid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "grasslid/manifold.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "grasslid/error.h"

namespace grasslid {

namespace {

constexpr int kMaxJacobiSweeps = 80;

void CheckFinite(const Matrix &x, const char *what) {
  if (!x.allFinite()) GRASSLID_THROW(InputError, what, ": non-finite entries");
}

// Orthonormalizes column j of q against columns [0, j) with two passes of
// modified Gram-Schmidt.  Returns the norm left before normalization.
double Reorthogonalize(Matrix *q, int j) {
  Eigen::Ref<Vector> col = q->col(j);
  double before = col.norm();
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < j; ++k) col -= q->col(k).dot(col) * q->col(k);
  }
  double after = col.norm();
  if (after > 0.0) col /= after;
  return before > 0.0 ? after / before : 0.0;
}

// Replaces column j of q by the first standard basis vector that is not
// (numerically) in the span of columns [0, j).
void CompleteColumn(Matrix *q, int j) {
  for (Eigen::Index i = 0; i < q->rows(); ++i) {
    q->col(j).setZero();
    (*q)(i, j) = 1.0;
    if (Reorthogonalize(q, j) > 0.5) return;
  }
  GRASSLID_THROW(NumericalError, "cannot complete orthonormal basis");
}

// One-sided Jacobi on a (m x n, m >= n).  On exit the columns of a are
// mutually orthogonal and a_in * v = a_out, with v orthogonal.
void HestenesJacobi(Matrix *a, Matrix *v) {
  const Eigen::Index m = a->rows(), n = a->cols();
  const double tol =
      std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(m));
  v->setIdentity(n, n);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        double alpha = a->col(p).squaredNorm();
        double beta = a->col(q).squaredNorm();
        double gamma = a->col(p).dot(a->col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(zeta) + std::hypot(1.0, zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (Eigen::Index i = 0; i < m; ++i) {
          double ap = (*a)(i, p), aq = (*a)(i, q);
          (*a)(i, p) = c * ap - s * aq;
          (*a)(i, q) = s * ap + c * aq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          double vp = (*v)(i, p), vq = (*v)(i, q);
          (*v)(i, p) = c * vp - s * vq;
          (*v)(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
}

}  // namespace

double OrthonormalityError(const Matrix &basis) {
  Matrix gram = basis.transpose() * basis;
  gram.diagonal().array() -= 1.0;
  return gram.norm();
}

Subspace::Subspace(Matrix basis, std::string source_tag)
    : basis_(std::move(basis)), source_tag_(std::move(source_tag)) {
  if (basis_.cols() < 1 || basis_.rows() < basis_.cols())
    GRASSLID_THROW(InputError, "subspace basis must be D x d with 1 <= d <= D, "
                   "got ", basis_.rows(), "x", basis_.cols());
  CheckFinite(basis_, "subspace basis");
  double err = OrthonormalityError(basis_);
  if (!(err <= kOrthonormalTolerance))
    GRASSLID_THROW(InputError, "subspace basis not orthonormal: ||B^T B - I||_F = ",
                   err);
}

std::vector<double> PrincipalAngleSet::Angles() const {
  std::vector<double> out;
  out.reserve(cosines.size());
  for (double c : cosines) out.push_back(std::acos(c));
  return out;
}

SvdResult TruncatedSvd(const Matrix &x, int r) {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  if (r < 1 || r > std::min(rows, cols))
    GRASSLID_THROW(RankError, "truncated SVD rank ", r, " outside [1, ",
                   std::min(rows, cols), "]");
  CheckFinite(x, "SVD input");

  // Work on the tall orientation so the rotation count scales with the
  // smaller dimension.
  const bool transposed = rows < cols;
  Matrix a = transposed ? Matrix(x.transpose()) : x;
  Matrix v;
  HestenesJacobi(&a, &v);

  const Eigen::Index n = a.cols();
  Vector sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) sigma(j) = a.col(j).norm();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return sigma(i) > sigma(j); });

  // `rotation` is exact to rounding; `normalized` holds a's columns scaled
  // to unit length and needs completion where sigma vanishes.
  Matrix rotation(n, r), normalized(a.rows(), r);
  Vector values(r);
  for (int k = 0; k < r; ++k) {
    int j = order[k];
    values(k) = sigma(j);
    rotation.col(k) = v.col(j);
    if (sigma(j) > 0.0) {
      normalized.col(k) = a.col(j) / sigma(j);
    } else {
      normalized.col(k).setZero();
    }
    if (Reorthogonalize(&normalized, k) < 1e-3) CompleteColumn(&normalized, k);
  }

  SvdResult out;
  out.singular_values = values;
  out.left = transposed ? rotation : normalized;
  out.right = transposed ? normalized : rotation;

  for (int k = 0; k < r; ++k) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < out.left.rows(); ++i) {
      double mag = std::abs(out.left(i, k));
      if (mag > best_abs) {
        best_abs = mag;
        best = i;
      }
    }
    if (out.left(best, k) < 0.0) {
      out.left.col(k) *= -1.0;
      out.right.col(k) *= -1.0;
    }
  }
  return out;
}

PrincipalAngleSet PrincipalAngles(const Subspace &s1, const Subspace &s2) {
  if (s1.AmbientDim() != s2.AmbientDim())
    GRASSLID_THROW(DimensionError, "principal angles: ambient dims ",
                   s1.AmbientDim(), " vs ", s2.AmbientDim());
  Matrix cross = s1.Basis().transpose() * s2.Basis();
  int q = std::min(s1.Rank(), s2.Rank());
  SvdResult svd = TruncatedSvd(cross, q);
  PrincipalAngleSet out;
  out.cosines.resize(q);
  for (int i = 0; i < q; ++i)
    out.cosines[i] = std::clamp(svd.singular_values(i), 0.0, 1.0);
  return out;
}

double SubspaceSimilarity(const Subspace &s1, const Subspace &s2) {
  double sum = 0.0;
  for (double c : PrincipalAngles(s1, s2).cosines) sum += c * c;
  return sum;
}

double ProjectionKernel(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows())
    GRASSLID_THROW(DimensionError, "projection kernel: ambient dims ", a.rows(),
                   " vs ", b.rows());
  return (a.transpose() * b).squaredNorm();
}

double ProjectionKernel(const Subspace &s1, const Subspace &s2) {
  return ProjectionKernel(s1.Basis(), s2.Basis());
}

double SubspaceDistance(const Subspace &s1, const Subspace &s2) {
  if (s1.Rank() != s2.Rank())
    GRASSLID_THROW(RankError, "subspace distance needs equal ranks, got ",
                   s1.Rank(), " and ", s2.Rank());
  double d2 = 2.0 * s1.Rank() - 2.0 * ProjectionKernel(s1, s2);
  return std::sqrt(std::max(d2, 0.0));
}

Matrix OrthogonalProcrustes(const Matrix &from, const Matrix &to) {
  if (from.rows() != to.rows() || from.cols() != to.cols())
    GRASSLID_THROW(DimensionError, "procrustes: shapes ", from.rows(), "x",
                   from.cols(), " vs ", to.rows(), "x", to.cols());
  if (from.rows() < 1 || from.cols() < 1)
    GRASSLID_THROW(DimensionError, "procrustes: empty input");
  Matrix cross = to * from.transpose();
  SvdResult svd = TruncatedSvd(cross, static_cast<int>(cross.rows()));
  return svd.left * svd.right.transpose();
}

Matrix RandomOrthonormalMatrix(int ambient_dim, int rank, std::mt19937_64 &rng) {
  if (rank < 1 || rank > ambient_dim)
    GRASSLID_THROW(RankError, "random orthonormal: rank ", rank,
                   " outside [1, ", ambient_dim, "]");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(ambient_dim, rank);
  for (int i = 0; i < ambient_dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, rank);
  const Matrix &packed = qr.matrixQR();
  for (int j = 0; j < rank; ++j)
    if (packed(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Subspace RandomOrthonormal(int ambient_dim, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Subspace(RandomOrthonormalMatrix(ambient_dim, rank, rng));
}

}  // namespace grasslid
