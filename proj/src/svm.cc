// src/svm.cc

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

#include "grasslid/svm.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "grasslid/error.h"
#include "grasslid/eval.h"
#include "grasslid/parallel.h"

namespace grasslid {

namespace {

constexpr double kTau = 1e-12;  // curvature floor for degenerate pairs

GramMatrix SubGram(const GramMatrix &gram, const std::vector<int> &idx) {
  const int n = static_cast<int>(idx.size());
  Matrix sub(n, n);
  std::vector<std::string> ids(n);
  for (int a = 0; a < n; ++a) {
    ids[a] = gram.RowIds()[idx[a]];
    for (int b = 0; b < n; ++b) sub(a, b) = gram.Values()(idx[a], idx[b]);
  }
  return GramMatrix(std::move(sub), std::move(ids));
}

Matrix SubBlock(const Matrix &m, const std::vector<int> &rows,
                const std::vector<int> &cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

// Row-wise log-softmax.
Matrix LogSoftmax(const Matrix &logits) {
  Matrix out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double mx = out.row(r).maxCoeff();
    double lse = mx + std::log((out.row(r).array() - mx).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

Matrix Augment(const Matrix &raw) {
  Matrix x(raw.rows(), raw.cols() + 1);
  x.leftCols(raw.cols()) = raw;
  x.col(raw.cols()).setOnes();
  return x;
}

}  // namespace

GramMatrix::GramMatrix(Matrix values, std::vector<std::string> row_ids)
    : values_(std::move(values)), row_ids_(std::move(row_ids)) {
  if (values_.rows() != values_.cols() ||
      static_cast<size_t>(values_.rows()) != row_ids_.size())
    GRASSLID_THROW(InputError, "gram matrix ", values_.rows(), "x",
                   values_.cols(), " with ", row_ids_.size(), " ids");
  if (!values_.allFinite())
    GRASSLID_THROW(NumericalError, "gram matrix has non-finite entries");
  double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kGramSymmetryTolerance)
    GRASSLID_THROW(NumericalError, "gram matrix asymmetric by ", asym);
  if (values_.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(values_,
                                              Eigen::EigenvaluesOnly);
    double lo = eig.eigenvalues().minCoeff();
    if (lo < kGramEigenTolerance)
      GRASSLID_THROW(NumericalError, "gram matrix not PSD: min eigenvalue ",
                     lo);
  }
}

GramMatrix ComputeGram(const std::vector<Subspace> &subspaces,
                       const std::vector<std::string> &ids) {
  if (subspaces.size() != ids.size())
    GRASSLID_THROW(InputError, subspaces.size(), " subspaces but ", ids.size(),
                   " ids");
  const int n = static_cast<int>(subspaces.size());
  for (int i = 1; i < n; ++i)
    if (subspaces[i].AmbientDim() != subspaces[0].AmbientDim())
      GRASSLID_THROW(DimensionError, "gram: ambient dim ",
                     subspaces[i].AmbientDim(), " at ", ids[i], " vs ",
                     subspaces[0].AmbientDim());
  Matrix k(n, n);
  ParallelFor(n, [&](int i) {
    for (int j = i; j < n; ++j)
      k(i, j) = ProjectionKernel(subspaces[i], subspaces[j]);
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) k(i, j) = k(j, i);
  return GramMatrix(std::move(k), ids);
}

Matrix CrossKernel(const std::vector<Subspace> &rows,
                   const std::vector<Subspace> &cols) {
  Matrix k(rows.size(), cols.size());
  ParallelFor(static_cast<int>(rows.size()), [&](int i) {
    for (size_t j = 0; j < cols.size(); ++j)
      k(i, j) = ProjectionKernel(rows[i], cols[j]);
  });
  return k;
}

SvmModel TrainBinarySvm(const GramMatrix &gram, const std::vector<int> &labels,
                        const SvmOptions &options, SvmTrainInfo *info) {
  const int n = gram.Size();
  if (static_cast<int>(labels.size()) != n)
    GRASSLID_THROW(InputError, labels.size(), " labels for gram of size ", n);
  if (!(options.penalty > 0.0))
    GRASSLID_THROW(InputError, "svm penalty must be positive");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y != 1 && y != -1) GRASSLID_THROW(InputError, "svm labels must be +-1");
    (y > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) GRASSLID_THROW(InputError, "svm needs both classes");

  const double c = options.penalty;
  Matrix q = gram.Values();
  q.diagonal().array() += kGramJitter;
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = labels[i];
  q = y.asDiagonal() * q * y.asDiagonal();

  Vector alpha = Vector::Zero(n);
  Vector grad = -Vector::Ones(n);
  auto up = [&](int t) {
    return (y(t) > 0 && alpha(t) < c) || (y(t) < 0 && alpha(t) > 0);
  };
  auto low = [&](int t) {
    return (y(t) < 0 && alpha(t) < c) || (y(t) > 0 && alpha(t) > 0);
  };
  auto dual = [&]() { return 0.5 * (alpha.sum() - alpha.dot(grad)); };

  SvmTrainInfo local;
  SvmTrainInfo &stats = info ? *info : local;
  stats = SvmTrainInfo();
  const long long budget = static_cast<long long>(options.max_sweeps) * n;
  double violation = 0.0;
  for (long long iter = 0;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    int i = -1, j = -1;
    for (int t = 0; t < n; ++t) {
      double v = -y(t) * grad(t);
      if (up(t) && v > gmax) gmax = v, i = t;
      if (low(t) && v < gmin) gmin = v, j = t;
    }
    violation = (i < 0 || j < 0) ? 0.0 : gmax - gmin;
    if (violation < options.tolerance) {
      stats.converged = true;
      break;
    }
    if (iter >= budget) break;

    double ai = alpha(i), aj = alpha(j);
    if (y(i) != y(j)) {
      double quad = std::max(q(i, i) + q(j, j) + 2.0 * q(i, j), kTau);
      double delta = (-grad(i) - grad(j)) / quad;
      double diff = ai - aj;
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) alpha(j) = 0, alpha(i) = diff;
      } else if (alpha(i) < 0) {
        alpha(i) = 0, alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = c - diff;
      } else if (alpha(j) > c) {
        alpha(j) = c, alpha(i) = c + diff;
      }
    } else {
      double quad = std::max(q(i, i) + q(j, j) - 2.0 * q(i, j), kTau);
      double delta = (grad(i) - grad(j)) / quad;
      double sum = ai + aj;
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = sum - c;
      } else if (alpha(j) < 0) {
        alpha(j) = 0, alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = sum - c;
      } else if (alpha(i) < 0) {
        alpha(i) = 0, alpha(j) = sum;
      }
    }
    double dai = alpha(i) - ai, daj = alpha(j) - aj;
    grad += q.col(i) * dai + q.col(j) * daj;
    ++stats.updates;
    if (stats.updates % n == 0) stats.dual_objective.push_back(dual());
  }
  stats.kkt_violation = violation;
  stats.dual_objective.push_back(dual());

  // Offset as in LIBSVM: average over free vectors, else the bracket middle.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub;
  double free_sum = 0.0;
  int free_count = 0;
  for (int t = 0; t < n; ++t) {
    double yg = y(t) * grad(t);
    bool at_upper = alpha(t) >= c, at_lower = alpha(t) <= 0;
    if (at_upper) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  double rho = free_count > 0 ? free_sum / free_count : 0.5 * (ub + lb);

  SvmModel model;
  model.penalty = c;
  model.bias = -rho;
  for (int t = 0; t < n; ++t) {
    if (alpha(t) > 0) {
      model.support_ids.push_back(t);
      model.dual_coefs.push_back(y(t) * alpha(t));
    }
  }
  return model;
}

double SvmDecision(const SvmModel &model, const Vector &kernel_row) {
  double f = model.bias;
  for (size_t s = 0; s < model.support_ids.size(); ++s) {
    int id = model.support_ids[s];
    if (id < 0 || id >= kernel_row.size())
      GRASSLID_THROW(DimensionError, "kernel row of length ", kernel_row.size(),
                     " lacks support vector ", id);
    f += model.dual_coefs[s] * kernel_row(id);
  }
  return f;
}

Vector SvmDecisions(const SvmModel &model, const Matrix &kernel_rows) {
  Vector out(kernel_rows.rows());
  for (Eigen::Index r = 0; r < kernel_rows.rows(); ++r)
    out(r) = SvmDecision(model, kernel_rows.row(r).transpose());
  return out;
}

double FusionObjective(const Matrix &raw_scores, const std::vector<int> &labels,
                       const Matrix &weights, double regularization,
                       Matrix *gradient) {
  const Eigen::Index n = raw_scores.rows(), f = raw_scores.cols();
  if (weights.rows() != f + 1 || static_cast<Eigen::Index>(labels.size()) != n)
    GRASSLID_THROW(DimensionError, "fusion: weights ", weights.rows(), "x",
                   weights.cols(), " for ", f, " features, ", labels.size(),
                   " labels for ", n, " rows");
  Matrix x = Augment(raw_scores);
  Matrix logp = LogSoftmax(x * weights);
  double loglik = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) loglik += logp(r, labels[r]);
  const auto features = weights.topRows(f);
  double value = loglik / n - 0.5 * regularization * features.squaredNorm();
  if (gradient) {
    Matrix resid = -logp.array().exp().matrix();  // -P
    for (Eigen::Index r = 0; r < n; ++r) resid(r, labels[r]) += 1.0;
    *gradient = x.transpose() * resid / static_cast<double>(n);
    gradient->topRows(f) -= regularization * features;
  }
  return value;
}

FusionModel TrainFusion(const Matrix &raw_scores, const std::vector<int> &labels,
                        int num_classes, const FusionOptions &options,
                        int *iterations) {
  if (!raw_scores.allFinite())
    GRASSLID_THROW(InputError, "fusion input scores not finite");
  if (!(options.regularization >= 0.0))
    GRASSLID_THROW(InputError, "fusion regularization must be >= 0");
  std::set<int> seen;
  for (int l : labels) {
    if (l < 0 || l >= num_classes)
      GRASSLID_THROW(InputError, "fusion label ", l, " outside [0, ",
                     num_classes, ")");
    seen.insert(l);
  }
  if (seen.size() < 2)
    GRASSLID_THROW(InputError, "fusion needs at least two classes present");

  Matrix w = Matrix::Zero(raw_scores.cols() + 1, num_classes);
  // Per-row curvature bound of the objective: softmax Hessian <= 1/2 times
  // the second moment of the input, plus the penalty on feature rows.
  const Eigen::Index f = raw_scores.cols();
  Vector precond(f + 1);
  for (Eigen::Index r = 0; r < f; ++r)
    precond(r) = 1.0 / (0.5 * raw_scores.col(r).squaredNorm() /
                            std::max<Eigen::Index>(raw_scores.rows(), 1) +
                        options.regularization + 1e-12);
  precond(f) = 2.0;
  Matrix g;
  double value = FusionObjective(raw_scores, labels, w, options.regularization, &g);
  double step = 1.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.norm() <= options.gradient_tolerance) break;
    Matrix direction = precond.asDiagonal() * g;
    double slope = direction.cwiseProduct(g).sum();
    step = std::min(step * 2.0, 1e6);
    Matrix trial_grad;
    for (;;) {
      Matrix trial = w + step * direction;
      double trial_value = FusionObjective(raw_scores, labels, trial,
                                           options.regularization, &trial_grad);
      if (trial_value >= value + 1e-4 * step * slope) {
        w = std::move(trial);
        value = trial_value;
        g = std::move(trial_grad);
        break;
      }
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (step < 1e-20) break;  // no ascent possible at double precision
  }
  if (iterations) *iterations = it;
  return FusionModel{std::move(w), options.regularization};
}

Matrix ApplyFusion(const FusionModel &model, const Matrix &raw_scores) {
  if (model.weights.rows() != raw_scores.cols() + 1)
    GRASSLID_THROW(DimensionError, "fusion expects ", model.weights.rows() - 1,
                   " raw scores, got ", raw_scores.cols());
  return LogSoftmax(Augment(raw_scores) * model.weights);
}

std::vector<SvmModel> TrainOneVsRest(const std::vector<GramMatrix> &grams,
                                     const std::vector<std::string> &labels,
                                     const std::vector<std::string> &targets,
                                     const SvmOptions &options) {
  if (targets.size() < 2)
    GRASSLID_THROW(InputError, "one-vs-rest needs >= 2 targets");
  if (grams.empty()) GRASSLID_THROW(InputError, "no recognizer channels");
  for (const GramMatrix &g : grams)
    if (g.Size() != static_cast<int>(labels.size()))
      GRASSLID_THROW(InputError, "recognizer channel has ", g.Size(),
                     " items, expected ", labels.size());
  const int num_t = static_cast<int>(targets.size());
  const int total = static_cast<int>(grams.size()) * num_t;
  std::vector<SvmModel> models(total);
  ParallelFor(total, [&](int m) {
    const int l = m / num_t, t = m % num_t;
    std::vector<int> y(labels.size());
    for (size_t i = 0; i < labels.size(); ++i)
      y[i] = labels[i] == targets[t] ? 1 : -1;
    models[m] = TrainBinarySvm(grams[l], y, options);
  });
  return models;
}

Matrix SvmRawScores(const std::vector<SvmModel> &models, int num_recognizers,
                    const std::vector<Matrix> &kernels) {
  if (num_recognizers < 1 || static_cast<int>(kernels.size()) != num_recognizers ||
      models.size() % num_recognizers != 0)
    GRASSLID_THROW(DimensionError, "raw scores: ", kernels.size(),
                   " kernel blocks for ", num_recognizers, " recognizers");
  const int num_t = static_cast<int>(models.size()) / num_recognizers;
  const Eigen::Index n = kernels[0].rows();
  Matrix raw(n, models.size());
  for (int l = 0; l < num_recognizers; ++l) {
    if (kernels[l].rows() != n)
      GRASSLID_THROW(DimensionError, "kernel blocks disagree on test count");
    for (int t = 0; t < num_t; ++t)
      raw.col(l * num_t + t) = SvmDecisions(models[l * num_t + t], kernels[l]);
  }
  return raw;
}

SvmBackend TrainSvmBackend(const std::vector<GramMatrix> &grams,
                           const std::vector<std::string> &labels,
                           const SvmBackendOptions &options) {
  if (options.penalty_grid.empty())
    GRASSLID_THROW(InputError, "empty penalty grid");
  std::set<std::string> distinct(labels.begin(), labels.end());
  SvmBackend backend;
  backend.targets.assign(distinct.begin(), distinct.end());
  backend.num_recognizers = static_cast<int>(grams.size());
  const int num_t = static_cast<int>(backend.targets.size());
  if (num_t < 2) GRASSLID_THROW(InputError, "need at least two languages");
  std::vector<int> label_index(labels.size());
  for (size_t i = 0; i < labels.size(); ++i)
    label_index[i] = static_cast<int>(
        std::lower_bound(backend.targets.begin(), backend.targets.end(),
                         labels[i]) - backend.targets.begin());

  std::vector<Fold> folds = StratifiedKFold(labels, options.folds, options.seed);
  double best_eer = std::numeric_limits<double>::infinity();
  Matrix best_oof;
  for (double c : options.penalty_grid) {
    SvmOptions svm = options.svm;
    svm.penalty = c;
    Matrix oof(labels.size(), grams.size() * num_t);
    for (const Fold &fold : folds) {
      std::vector<GramMatrix> sub;
      std::vector<Matrix> cross;
      for (const GramMatrix &g : grams) {
        sub.push_back(SubGram(g, fold.train));
        cross.push_back(SubBlock(g.Values(), fold.test, fold.train));
      }
      std::vector<std::string> sub_labels;
      for (int i : fold.train) sub_labels.push_back(labels[i]);
      std::vector<SvmModel> models =
          TrainOneVsRest(sub, sub_labels, backend.targets, svm);
      Matrix raw = SvmRawScores(models, backend.num_recognizers, cross);
      for (size_t r = 0; r < fold.test.size(); ++r) oof.row(fold.test[r]) = raw.row(r);
    }
    Matrix mean = Matrix::Zero(labels.size(), num_t);
    for (int l = 0; l < backend.num_recognizers; ++l)
      mean += oof.middleCols(l * num_t, num_t);
    std::vector<std::string> ids(labels.size());
    double eer = Eer(MakeTrials(ids, labels, backend.targets, mean));
    if (eer < best_eer) {
      best_eer = eer;
      backend.penalty = c;
      best_oof = std::move(oof);
    }
  }
  backend.fusion = TrainFusion(best_oof, label_index, num_t, options.fusion);
  SvmOptions svm = options.svm;
  svm.penalty = backend.penalty;
  backend.models = TrainOneVsRest(grams, labels, backend.targets, svm);
  return backend;
}

Matrix ScoreSvmBackend(const SvmBackend &backend,
                       const std::vector<Matrix> &kernels) {
  return ApplyFusion(backend.fusion,
                     SvmRawScores(backend.models, backend.num_recognizers,
                                  kernels));
}

}  // namespace grasslid
