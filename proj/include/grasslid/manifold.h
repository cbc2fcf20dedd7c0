// grasslid/manifold.h

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

#ifndef GRASSLID_MANIFOLD_H_
#define GRASSLID_MANIFOLD_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "grasslid/matrix-io.h"

namespace grasslid {

/// Tolerance on ||S^T S - I||_F accepted for a Subspace basis.
inline constexpr double kOrthonormalTolerance = 1e-8;

/// Returns ||B^T B - I||_F.
double OrthonormalityError(const Matrix &basis);

/**
   A point on the Grassmann manifold, held as a D x d matrix with orthonormal
   columns.  Two Subspace objects whose bases differ by a right orthogonal
   factor represent the same point; every similarity below is invariant to
   that factor.  Immutable after construction.
*/
class Subspace {
 public:
  /// Throws InputError if `basis` has non-finite entries, no columns, more
  /// columns than rows, or ||B^T B - I||_F > kOrthonormalTolerance.
  explicit Subspace(Matrix basis, std::string source_tag = "");

  const Matrix &Basis() const { return basis_; }
  int AmbientDim() const { return static_cast<int>(basis_.rows()); }
  int Rank() const { return static_cast<int>(basis_.cols()); }
  const std::string &SourceTag() const { return source_tag_; }

 private:
  Matrix basis_;
  std::string source_tag_;
};

/// Cosines of the principal angles, clamped to [0, 1], non-increasing.
struct PrincipalAngleSet {
  std::vector<double> cosines;

  /// Angles in radians, non-decreasing.
  std::vector<double> Angles() const;
};

/// X ~= left * diag(singular_values) * right^T.
struct SvdResult {
  Matrix left;             // D x r, orthonormal columns
  Vector singular_values;  // r values, non-negative, descending
  Matrix right;            // K x r, orthonormal columns
};

/**
   The r leading singular triplets of x, computed with one-sided (Hestenes)
   Jacobi rotations in double precision.  Deterministic: ties in singular
   values keep column order, and each left singular vector is signed so that
   its largest-magnitude entry is non-negative (lowest row index wins ties);
   the matching right vector flips with it.  Columns belonging to zero
   singular values are completed to an orthonormal set.

   Throws RankError unless 1 <= r <= min(rows, cols), InputError on
   non-finite input.
*/
SvdResult TruncatedSvd(const Matrix &x, int r);

/// Principal-angle cosines between two subspaces of the same ambient space:
/// the min(d1, d2) singular values of S1^T S2.  Ranks may differ.
PrincipalAngleSet PrincipalAngles(const Subspace &s1, const Subspace &s2);

/// sum_i cos^2(theta_i), in [0, min(d1, d2)].  Ranks may differ.
double SubspaceSimilarity(const Subspace &s1, const Subspace &s2);

/// sqrt(2d - 2 ||S1^T S2||_F^2), clamped at zero.  Requires equal ranks
/// (RankError otherwise).
double SubspaceDistance(const Subspace &s1, const Subspace &s2);

/// Projection kernel ||S1^T S2||_F^2.
double ProjectionKernel(const Subspace &s1, const Subspace &s2);
/// Same, on raw bases (no orthonormality requirement).  Used by the kernel
/// layer of the subspace network whose weight maps drift during training.
double ProjectionKernel(const Matrix &a, const Matrix &b);

/**
   Orthogonal matrix A minimizing ||to - A * from||_F, where `from` and `to`
   are d x N.  Computed as U V^T from the SVD of to * from^T.  When that
   product is rank deficient the minimizer is not unique and one valid
   minimizer is returned.
*/
Matrix OrthogonalProcrustes(const Matrix &from, const Matrix &to);

/// D x d matrix of Haar-distributed orthonormal columns: QR of a standard
/// Gaussian matrix with Q's columns signed by diag(R).
Matrix RandomOrthonormalMatrix(int ambient_dim, int rank, std::mt19937_64 &rng);
Subspace RandomOrthonormal(int ambient_dim, int rank, std::uint64_t seed);

}  // namespace grasslid

#endif  // GRASSLID_MANIFOLD_H_
