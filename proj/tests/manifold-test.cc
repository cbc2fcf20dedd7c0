// tests/manifold-test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "grasslid/error.h"
#include "grasslid/manifold.h"
#include "test-util.h"

namespace grasslid {
namespace {

using testing::OracleEigenvalues;
using testing::OracleOrthogonal;
using testing::OracleOrthonormal;
using testing::RandomGaussian;

TEST(TruncatedSvd, DiagonalMatrix) {
  Matrix x(2, 2);
  x << 3, 0, 0, 1;
  SvdResult svd = TruncatedSvd(x, 1);
  ASSERT_EQ(svd.singular_values.size(), 1);
  EXPECT_NEAR(svd.singular_values(0), 3.0, 1e-14);
  EXPECT_NEAR(svd.left(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(svd.left(1, 0), 0.0, 1e-14);
  EXPECT_NEAR(svd.right(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(svd.right(1, 0), 0.0, 1e-14);
}

TEST(TruncatedSvd, RankOneSignConvention) {
  Vector u(3), v(4);
  u << 0.48, -0.64, 0.6;  // unit, largest magnitude entry negative
  v << 0.5, 0.5, 0.5, 0.5;
  Matrix x = u * v.transpose();
  SvdResult svd = TruncatedSvd(x, 1);
  EXPECT_NEAR(svd.singular_values(0), 1.0, 1e-14);
  // Sign convention makes the -0.64 entry positive, so left = -u.
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(svd.left(i, 0), -u(i), 1e-14);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(svd.right(i, 0), -v(i), 1e-14);
}

TEST(TruncatedSvd, DiscardedEnergyMatchesEigenOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Matrix x = RandomGaussian(6, 9, seed);
    SvdResult svd = TruncatedSvd(x, 3);
    Matrix recon = svd.left * svd.singular_values.asDiagonal() *
                   svd.right.transpose();
    double err = (x - recon).squaredNorm();
    // Oracle: eigenvalues of X^T X (9x9, ascending) are sigma^2 plus zeros.
    Vector eig = OracleEigenvalues(x.transpose() * x);
    double discarded = 0.0;
    for (int i = 0; i < 9 - 3; ++i) discarded += std::max(eig(i), 0.0);
    EXPECT_NEAR(err, discarded, 1e-10 * x.squaredNorm());
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(svd.singular_values(i), std::sqrt(eig(8 - i)), 1e-10);
    EXPECT_LE(OrthonormalityError(svd.left), 1e-12);
    EXPECT_LE(OrthonormalityError(svd.right), 1e-12);
  }
}

TEST(TruncatedSvd, TallAndWideAgree) {
  Matrix x = RandomGaussian(7, 4, 3);
  SvdResult tall = TruncatedSvd(x, 4);
  SvdResult wide = TruncatedSvd(x.transpose(), 4);
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(tall.singular_values(i), wide.singular_values(i), 1e-12);
}

TEST(TruncatedSvd, ReconstructionErrorNonIncreasingInRank) {
  Matrix x = RandomGaussian(8, 12, 11);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 8; ++r) {
    SvdResult svd = TruncatedSvd(x, r);
    double err = (x - svd.left * svd.singular_values.asDiagonal() *
                          svd.right.transpose()).squaredNorm();
    EXPECT_LE(err, prev + 1e-12);
    prev = err;
  }
  EXPECT_NEAR(prev, 0.0, 1e-20 + 1e-12 * x.squaredNorm());
}

TEST(TruncatedSvd, RankDeficientColumnsAreCompleted) {
  Matrix zero = Matrix::Zero(4, 6);
  SvdResult svd = TruncatedSvd(zero, 3);
  EXPECT_EQ(svd.singular_values.sum(), 0.0);
  EXPECT_LE(OrthonormalityError(svd.left), 1e-14);
  EXPECT_LE(OrthonormalityError(svd.right), 1e-14);

  Matrix tall = Matrix::Zero(6, 3);
  tall(0, 0) = 2.0;
  SvdResult s2 = TruncatedSvd(tall, 3);
  EXPECT_NEAR(s2.singular_values(0), 2.0, 1e-15);
  EXPECT_LE(OrthonormalityError(s2.left), 1e-14);
  EXPECT_LE(OrthonormalityError(s2.right), 1e-14);
}

TEST(TruncatedSvd, Errors) {
  Matrix x = RandomGaussian(3, 5, 1);
  EXPECT_THROW(TruncatedSvd(x, 0), RankError);
  EXPECT_THROW(TruncatedSvd(x, 4), RankError);
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(TruncatedSvd(x, 1), InputError);
}

TEST(TruncatedSvd, Deterministic) {
  Matrix x = RandomGaussian(10, 30, 5);
  SvdResult a = TruncatedSvd(x, 4), b = TruncatedSvd(x, 4);
  EXPECT_TRUE(a.left == b.left);
  EXPECT_TRUE(a.right == b.right);
}

TEST(Subspace, RejectsNonOrthonormal) {
  Matrix b = Matrix::Identity(3, 2);
  b(0, 0) = 1.0 + 1e-6;
  EXPECT_THROW(Subspace{b}, InputError);
  EXPECT_THROW(Subspace(Matrix::Identity(2, 3)), InputError);
  EXPECT_NO_THROW(Subspace(Matrix::Identity(3, 2), "rec0"));
}

TEST(PrincipalAngles, IdenticalSubspaces) {
  Subspace s(OracleOrthonormal(7, 3, 2));
  for (double c : PrincipalAngles(s, s).cosines) EXPECT_NEAR(c, 1.0, 1e-12);
  EXPECT_NEAR(SubspaceSimilarity(s, s), 3.0, 1e-12);
  EXPECT_NEAR(ProjectionKernel(s, s), 3.0, 1e-12);
  EXPECT_NEAR(SubspaceDistance(s, s), 0.0, 1e-6);
}

TEST(PrincipalAngles, PlanarCase) {
  Matrix e1(2, 1), diag(2, 1);
  e1 << 1, 0;
  diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  PrincipalAngleSet pa = PrincipalAngles(Subspace(e1), Subspace(diag));
  ASSERT_EQ(pa.cosines.size(), 1u);
  EXPECT_NEAR(pa.cosines[0], 0.70710678118654752, 1e-15);
  EXPECT_NEAR(pa.Angles()[0], M_PI / 4, 1e-14);
}

TEST(PrincipalAngles, SquaredCosinesMatchEigenOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Matrix a = OracleOrthonormal(5, 2, 2 * seed), b = OracleOrthonormal(5, 2, 2 * seed + 1);
    PrincipalAngleSet pa = PrincipalAngles(Subspace(a), Subspace(b));
    Matrix prod = a.transpose() * b * b.transpose() * a;
    Vector eig = OracleEigenvalues(prod);  // ascending
    EXPECT_NEAR(pa.cosines[0] * pa.cosines[0], eig(1), 1e-12);
    EXPECT_NEAR(pa.cosines[1] * pa.cosines[1], eig(0), 1e-12);
    EXPECT_GE(pa.cosines[0], pa.cosines[1]);
  }
}

TEST(PrincipalAngles, SymmetricAndGrassmannInvariant) {
  Matrix a = OracleOrthonormal(9, 4, 10), b = OracleOrthonormal(9, 4, 11);
  auto ab = PrincipalAngles(Subspace(a), Subspace(b)).cosines;
  auto ba = PrincipalAngles(Subspace(b), Subspace(a)).cosines;
  auto rotated = PrincipalAngles(Subspace(a * OracleOrthogonal(4, 12)),
                                 Subspace(b * OracleOrthogonal(4, 13))).cosines;
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ab[i], ba[i], 1e-12);
    EXPECT_NEAR(ab[i], rotated[i], 1e-12);
  }
}

TEST(PrincipalAngles, UnequalRanks) {
  Matrix a = OracleOrthonormal(8, 5, 20), b = OracleOrthonormal(8, 2, 21);
  PrincipalAngleSet pa = PrincipalAngles(Subspace(a), Subspace(b));
  EXPECT_EQ(pa.cosines.size(), 2u);
  EXPECT_NEAR(SubspaceSimilarity(Subspace(a), Subspace(b)),
              (a.transpose() * b).squaredNorm(), 1e-12);
  EXPECT_THROW(SubspaceDistance(Subspace(a), Subspace(b)), RankError);
}

TEST(PrincipalAngles, DimensionMismatch) {
  Subspace a(OracleOrthonormal(5, 2, 1)), b(OracleOrthonormal(6, 2, 2));
  EXPECT_THROW(PrincipalAngles(a, b), DimensionError);
  EXPECT_THROW(ProjectionKernel(a, b), DimensionError);
}

TEST(Similarity, OrthogonalSpans) {
  Matrix e1 = Matrix::Zero(2, 1), e2 = Matrix::Zero(2, 1);
  e1(0, 0) = 1;
  e2(1, 0) = 1;
  EXPECT_EQ(SubspaceSimilarity(Subspace(e1), Subspace(e2)), 0.0);
  Matrix s1 = Matrix::Identity(6, 3);
  Matrix s2 = Matrix::Zero(6, 3);
  s2.bottomRows(3) = Matrix::Identity(3, 3);
  EXPECT_NEAR(SubspaceDistance(Subspace(s1), Subspace(s2)), std::sqrt(6.0), 1e-14);
}

TEST(Similarity, EqualsFrobeniusAndDistanceIdentity) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Matrix a = OracleOrthonormal(10, 3, 100 + seed), b = OracleOrthonormal(10, 3, 200 + seed);
    Subspace sa(a), sb(b);
    double frob = (a.transpose() * b).squaredNorm();
    EXPECT_NEAR(SubspaceSimilarity(sa, sb), frob, 1e-12);
    double projector_gap = (a * a.transpose() - b * b.transpose()).squaredNorm();
    double dist = SubspaceDistance(sa, sb);
    EXPECT_NEAR(dist * dist, projector_gap, 1e-10);
  }
}

TEST(ProjectionKernel, OrthogonalInvarianceAndPsdGram) {
  std::vector<Subspace> subs;
  for (std::uint64_t i = 0; i < 20; ++i) subs.emplace_back(OracleOrthonormal(12, 4, 300 + i));
  Matrix gram(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) gram(i, j) = ProjectionKernel(subs[i], subs[j]);
  EXPECT_GE(OracleEigenvalues(gram)(0), -1e-8);
  EXPECT_LE((gram - gram.transpose()).cwiseAbs().maxCoeff(), 1e-12);

  Subspace r0(subs[0].Basis() * OracleOrthogonal(4, 7));
  Subspace r1(subs[1].Basis() * OracleOrthogonal(4, 8));
  EXPECT_NEAR(ProjectionKernel(r0, r1), gram(0, 1), 1e-12);
}

TEST(Procrustes, RecoversKnownRotation) {
  Matrix r = OracleOrthogonal(4, 9);
  Matrix from = RandomGaussian(4, 20, 10);
  Matrix a = OrthogonalProcrustes(from, r * from);
  EXPECT_LE((a - r).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(OrthonormalityError(a), 1e-8);
}

TEST(Procrustes, IdentityWhenEqual) {
  Matrix x = RandomGaussian(3, 8, 4);
  Matrix a = OrthogonalProcrustes(x, x);
  EXPECT_LE((a - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Procrustes, NoOrthogonalPerturbationImproves) {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix from = RandomGaussian(3, 15, 400 + seed), to = RandomGaussian(3, 15, 500 + seed);
    Matrix a = OrthogonalProcrustes(from, to);
    double best = (to - a * from).squaredNorm();
    for (int trial = 0; trial < 50; ++trial) {
      // Small rotation exp(eps * skew) via Cayley transform.
      Matrix k = RandomGaussian(3, 3, rng());
      Matrix skew = 0.01 * (k - k.transpose());
      Matrix i3 = Matrix::Identity(3, 3);
      Matrix q = (i3 - skew).inverse() * (i3 + skew);
      EXPECT_GE((to - q * a * from).squaredNorm(), best - 1e-10);
    }
  }
}

TEST(Procrustes, RankDeficientStillOrthogonal) {
  Matrix from = Matrix::Zero(3, 5), to = Matrix::Zero(3, 5);
  from.row(0).setOnes();
  to.row(1).setOnes();
  Matrix a = OrthogonalProcrustes(from, to);
  EXPECT_LE(OrthonormalityError(a), 1e-12);
  EXPECT_LE((to - a * from).norm(), 1e-12);
  EXPECT_THROW(OrthogonalProcrustes(Matrix::Zero(3, 5), Matrix::Zero(2, 5)),
               DimensionError);
}

TEST(RandomOrthonormal, OrthonormalDeterministicHaar) {
  Subspace s = RandomOrthonormal(15, 6, 7);
  EXPECT_LE(OrthonormalityError(s.Basis()), 1e-10);
  Subspace again = RandomOrthonormal(15, 6, 7);
  EXPECT_TRUE(s.Basis() == again.Basis());
  Subspace square = RandomOrthonormal(6, 6, 3);
  EXPECT_NEAR(std::abs(square.Basis().determinant()), 1.0, 1e-8);
  EXPECT_THROW(RandomOrthonormal(3, 4, 1), RankError);
}

TEST(MatrixIo, BinaryRoundTripAndErrors) {
  Matrix m = RandomGaussian(3, 5, 8);
  std::stringstream ss;
  WriteMatrix(ss, m);
  std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 16u + 15u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "GSM1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3);   // rows, LE
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 5);  // cols, LE
  Matrix back = ReadMatrix(ss);
  EXPECT_TRUE(back == m);

  std::stringstream bad("XXXX");
  EXPECT_THROW(ReadMatrix(bad), FormatError);
  std::stringstream truncated(bytes.substr(0, 30));
  EXPECT_THROW(ReadMatrix(truncated), FormatError);
}

TEST(MatrixIo, Csv) {
  auto dir = testing::ScratchDir("csv");
  {
    std::ofstream os(dir / "m.csv");
    os << "1,2.5,-3\n\n4,5,6e-3\n";
  }
  Matrix m = ReadCsvMatrix(dir / "m.csv");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m(0, 1), 2.5);
  EXPECT_EQ(m(1, 2), 6e-3);
  {
    std::ofstream os(dir / "ragged.csv");
    os << "1,2\n3\n";
  }
  EXPECT_THROW(ReadCsvMatrix(dir / "ragged.csv"), FormatError);
}

}  // namespace
}  // namespace grasslid
