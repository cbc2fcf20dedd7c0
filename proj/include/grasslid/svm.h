// grasslid/svm.h

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

#ifndef GRASSLID_SVM_H_
#define GRASSLID_SVM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "grasslid/manifold.h"

namespace grasslid {

inline constexpr double kGramSymmetryTolerance = 1e-10;
inline constexpr double kGramEigenTolerance = -1e-8;
inline constexpr double kGramJitter = 1e-10;

/**
   Projection-kernel Gram matrix of a training set.  The constructor checks
   that the values are finite, symmetric within kGramSymmetryTolerance and
   that the smallest eigenvalue is at least kGramEigenTolerance; otherwise
   it throws NumericalError.
*/
class GramMatrix {
 public:
  GramMatrix(Matrix values, std::vector<std::string> row_ids);

  const Matrix &Values() const { return values_; }
  const std::vector<std::string> &RowIds() const { return row_ids_; }
  int Size() const { return static_cast<int>(values_.rows()); }

 private:
  Matrix values_;
  std::vector<std::string> row_ids_;
};

/// K_ij = ||S_i^T S_j||_F^2, computed in parallel over rows.  Throws
/// DimensionError if the ambient dimensions differ and InputError if
/// `ids` does not match `subspaces` in length.
GramMatrix ComputeGram(const std::vector<Subspace> &subspaces,
                       const std::vector<std::string> &ids);

/// Kernel values between every row subspace and every column subspace.
Matrix CrossKernel(const std::vector<Subspace> &rows,
                   const std::vector<Subspace> &cols);

struct SvmOptions {
  double penalty = 1.0;      // C
  double tolerance = 1e-3;   // on the maximal KKT violation
  /// Update budget in units of N pair updates.
  int max_sweeps = 10000;
};

/// Binary soft-margin SVM on a precomputed kernel:
/// f(x) = sum_i dual_coefs_i k(x_i, x) + bias.
struct SvmModel {
  std::vector<int> support_ids;   // indices into the training set
  std::vector<double> dual_coefs;  // y_i alpha_i, so |coef| <= C
  double bias = 0.0;
  double penalty = 1.0;
};

struct SvmTrainInfo {
  int updates = 0;
  bool converged = false;
  double kkt_violation = 0.0;
  /// Dual objective e^T a - a^T Q a / 2 after every N updates and at exit.
  std::vector<double> dual_objective;
};

/**
   SMO with the maximal violating pair on the jittered kernel.  Labels are
   +1 / -1.  Deterministic.  Throws InputError for a single-class problem,
   C <= 0 or a size mismatch.
*/
SvmModel TrainBinarySvm(const GramMatrix &gram, const std::vector<int> &labels,
                        const SvmOptions &options, SvmTrainInfo *info = nullptr);

/// `kernel_row` holds k(x_i, x) for all N training items.
double SvmDecision(const SvmModel &model, const Vector &kernel_row);

/// Decision values for a block of kernel rows (rows = test items, columns =
/// training items).
Vector SvmDecisions(const SvmModel &model, const Matrix &kernel_rows);

/**
   Multinomial logistic regression over raw detection scores.  `weights`
   is (F + 1) x T; the last row is the bias.  Applying the model returns
   log-posteriors.
*/
struct FusionModel {
  Matrix weights;
  double regularization = 1e-2;
};

struct FusionOptions {
  double regularization = 1e-2;
  double gradient_tolerance = 1e-6;
  int max_iterations = 200000;
};

/**
   Maximizes (1/N) sum_n log p(y_n | x_n) - (reg / 2) ||W_features||_F^2
   (bias row unpenalized) by gradient ascent with a per-row diagonal
   preconditioner and Armijo backtracking, until the gradient norm is at
   most options.gradient_tolerance.  Labels are 0-based class indices in
   [0, num_classes).  Throws InputError if fewer than two classes occur or
   the scores are not finite.
*/
FusionModel TrainFusion(const Matrix &raw_scores, const std::vector<int> &labels,
                        int num_classes, const FusionOptions &options,
                        int *iterations = nullptr);

/// Objective and gradient of TrainFusion, exposed for testing.
double FusionObjective(const Matrix &raw_scores, const std::vector<int> &labels,
                       const Matrix &weights, double regularization,
                       Matrix *gradient);

/// N x T log-posteriors.
Matrix ApplyFusion(const FusionModel &model, const Matrix &raw_scores);

/// One-vs-rest SVMs for every (recognizer, target) pair plus fusion.
struct SvmBackend {
  std::vector<std::string> targets;
  double penalty = 1.0;
  /// models[l * T + t] scores target t on recognizer l.
  std::vector<SvmModel> models;
  int num_recognizers = 0;
  FusionModel fusion;
};

struct SvmBackendOptions {
  std::vector<double> penalty_grid = {0.1, 1.0, 10.0};
  int folds = 5;
  std::uint64_t seed = 0;
  SvmOptions svm;
  FusionOptions fusion;
};

/**
   Trains L * T one-vs-rest models.  The penalty is chosen from the grid by
   pooled EER of out-of-fold scores (mean over recognizers); the fusion
   model is trained on the out-of-fold raw scores of the chosen penalty, and
   the final SVMs on all items.  `grams[l]` is recognizer l's Gram matrix;
   all share row order with `labels`.  Needs at least two targets.
*/
SvmBackend TrainSvmBackend(const std::vector<GramMatrix> &grams,
                           const std::vector<std::string> &labels,
                           const SvmBackendOptions &options);

/// Trains the L * T models for one penalty on the given training items.
std::vector<SvmModel> TrainOneVsRest(const std::vector<GramMatrix> &grams,
                                     const std::vector<std::string> &labels,
                                     const std::vector<std::string> &targets,
                                     const SvmOptions &options);

/// N x (L * T) raw scores; `kernels[l]` is test x train for recognizer l.
Matrix SvmRawScores(const std::vector<SvmModel> &models, int num_recognizers,
                    const std::vector<Matrix> &kernels);

/// N x T fused log-posteriors.
Matrix ScoreSvmBackend(const SvmBackend &backend,
                       const std::vector<Matrix> &kernels);

}  // namespace grasslid

#endif  // GRASSLID_SVM_H_
