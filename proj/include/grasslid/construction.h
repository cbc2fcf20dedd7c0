// grasslid/construction.h

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

#ifndef GRASSLID_CONSTRUCTION_H_
#define GRASSLID_CONSTRUCTION_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "grasslid/manifold.h"
#include "grasslid/phonetics.h"

namespace grasslid {

/// Hard threshold: keeps x_ij when |x_ij| > lambda (strictly), else 0.
Matrix ThresholdOperator(const Matrix &x, double lambda);

/**
   Top-d left singular vectors of Z (D x K), i.e. the orthonormal basis that
   minimizes ||Z - S S^T Z||_F^2.  Throws ShortUtteranceError when K < D and
   RankError unless 1 <= d <= D.
*/
Subspace ConstructOlr(const Matrix &z, int d);

struct OdlConfig {
  double lambda = 1e-4;
  int iterations = 50;

  /// Throws InputError for lambda < 0 or iterations < 1.
  void Check() const;
};

struct OdlResult {
  Matrix basis;  // D x d, orthonormal
  Matrix codes;  // d x K, the W paired with `basis`
  /// objective[0] is f(S0, W1); objective[j] is f(Sj, Wj) for the iterations
  /// actually run.  Non-increasing.
  std::vector<double> objective;
  /// Set when Z W^T vanished and the previous basis was kept.
  bool stopped_early = false;
};

/// ||Z - S W||_F^2 + lambda^2 ||W||_0.  Throws DimensionError on shape
/// mismatch.
double OdlObjective(const Matrix &z, const Matrix &s, const Matrix &w,
                    double lambda);

/**
   Orthogonal dictionary learning.  Starts from d distinct columns of I_D
   chosen with `seed`, then alternates W <- O_lambda(S^T Z) and S <- P Q^T
   where P Sigma Q^T is the rank-d SVD of Z W^T, for cfg.iterations rounds.
   Stops early, keeping S, if Z W^T is exactly zero.
*/
OdlResult RunOdl(const Matrix &z, int d, const OdlConfig &cfg,
                 std::uint64_t seed);
Subspace ConstructOdl(const Matrix &z, int d, const OdlConfig &cfg,
                      std::uint64_t seed);

/// x_{k+1} = A x_k, y_k = C x_k with A orthogonal and C column-orthonormal.
class DlmModel {
 public:
  /// Throws InputError unless both orthonormality invariants hold to 1e-8
  /// and shapes agree.
  DlmModel(Matrix transition, Matrix generator);

  const Matrix &Transition() const { return transition_; }
  const Matrix &Generator() const { return generator_; }
  int StateDim() const { return static_cast<int>(transition_.rows()); }
  int NumUnits() const { return static_cast<int>(generator_.rows()); }

 private:
  Matrix transition_;
  Matrix generator_;
};

struct DlmFit {
  DlmModel model;
  Matrix states;  // d x K, Sigma V^T
};

/**
   Subspace identification on Y (M x K, columns are observations):
   C = U and X = Sigma V^T from the rank-d SVD of Y, then A is the orthogonal
   Procrustes map from X[:, 0:K-1] to X[:, 1:K].  No mean removal.
   Throws ShortUtteranceError when K < 2, RankError unless
   1 <= d <= min(M, K).
*/
DlmFit FitDlm(const Matrix &y, int d);
DlmFit FitDlm(const PhoneticSequence &seq, int d);

/// (1/sqrt(n)) [C; C A; ...; C A^{n-1}], an (n M) x d orthonormal basis.
Subspace DlmObservability(const DlmModel &model, int n);

enum class ConstructionMethod { kOlr, kOdl, kDlm };

std::string_view MethodName(ConstructionMethod method);
/// Accepts "olr", "odl", "dlm" in any case; throws InputError otherwise.
ConstructionMethod ParseMethod(std::string_view name);

struct SubspaceSpec {
  ConstructionMethod method = ConstructionMethod::kOlr;
  int context_order = 1;
  double sample_ratio = 0.6;
  OdlConfig odl;

  /// Throws InputError unless 0 < sample_ratio < 1 and context_order >= 1.
  void Check() const;
};

/// max(floor(ratio * num_units), 2).  A 1e-9 slack absorbs products such as
/// 0.29 * 100 that land just below an integer.
int SampleRank(int num_units, double ratio);

/**
   Builds the utterance subspace.  OLR and ODL factorize the stacked matrix
   of order spec.context_order; DLM fits a model on the raw sequence and
   returns its observability basis of the same order.  The rank is
   SampleRank(M, spec.sample_ratio).  `seed` only matters for ODL.
*/
Subspace Construct(const PhoneticSequence &seq, const SubspaceSpec &spec,
                   std::uint64_t seed);

}  // namespace grasslid

#endif  // GRASSLID_CONSTRUCTION_H_
