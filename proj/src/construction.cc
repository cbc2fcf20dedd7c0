// src/construction.cc

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

#include "grasslid/construction.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "grasslid/error.h"

namespace grasslid {

namespace {

void CheckFactorizable(const Matrix &z, int d) {
  if (!z.allFinite()) GRASSLID_THROW(InputError, "stacked matrix not finite");
  if (z.cols() < z.rows())
    GRASSLID_THROW(ShortUtteranceError, "utterance has K = ", z.cols(),
                   " columns but stacked dimension D = ", z.rows());
  if (d < 1 || d > z.rows())
    GRASSLID_THROW(RankError, "subspace rank ", d, " outside [1, ", z.rows(),
                   "]");
}

}  // namespace

Matrix ThresholdOperator(const Matrix &x, double lambda) {
  if (!(lambda >= 0.0))
    GRASSLID_THROW(InputError, "threshold must be non-negative, got ", lambda);
  return (x.array().abs() > lambda).select(x, 0.0);
}

Subspace ConstructOlr(const Matrix &z, int d) {
  CheckFactorizable(z, d);
  return Subspace(TruncatedSvd(z, d).left, "olr");
}

void OdlConfig::Check() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    GRASSLID_THROW(InputError, "odl lambda must be finite and >= 0, got ",
                   lambda);
  if (iterations < 1)
    GRASSLID_THROW(InputError, "odl iterations must be >= 1, got ", iterations);
}

double OdlObjective(const Matrix &z, const Matrix &s, const Matrix &w,
                    double lambda) {
  if (s.rows() != z.rows() || w.cols() != z.cols() || s.cols() != w.rows())
    GRASSLID_THROW(DimensionError, "odl objective: Z ", z.rows(), "x",
                   z.cols(), ", S ", s.rows(), "x", s.cols(), ", W ", w.rows(),
                   "x", w.cols());
  double nnz = static_cast<double>((w.array() != 0.0).count());
  return (z - s * w).squaredNorm() + lambda * lambda * nnz;
}

OdlResult RunOdl(const Matrix &z, int d, const OdlConfig &cfg,
                 std::uint64_t seed) {
  CheckFactorizable(z, d);
  cfg.Check();
  const int dim = static_cast<int>(z.rows());

  std::vector<int> axes(dim);
  std::iota(axes.begin(), axes.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::shuffle's draw pattern is not specified.
  for (int i = 0; i < d; ++i) {
    std::uniform_int_distribution<int> pick(i, dim - 1);
    std::swap(axes[i], axes[pick(rng)]);
  }
  Matrix s = Matrix::Zero(dim, d);
  for (int i = 0; i < d; ++i) s(axes[i], i) = 1.0;

  OdlResult out;
  Matrix w = ThresholdOperator(s.transpose() * z, cfg.lambda);
  out.objective.push_back(OdlObjective(z, s, w, cfg.lambda));
  for (int j = 0; j < cfg.iterations; ++j) {
    if (j > 0) w = ThresholdOperator(s.transpose() * z, cfg.lambda);
    Matrix cross = z * w.transpose();
    if ((cross.array() == 0.0).all()) {
      out.stopped_early = true;
      break;
    }
    SvdResult svd = TruncatedSvd(cross, d);
    s = svd.left * svd.right.transpose();
    out.objective.push_back(OdlObjective(z, s, w, cfg.lambda));
  }
  out.basis = std::move(s);
  out.codes = std::move(w);
  return out;
}

Subspace ConstructOdl(const Matrix &z, int d, const OdlConfig &cfg,
                      std::uint64_t seed) {
  return Subspace(RunOdl(z, d, cfg, seed).basis, "odl");
}

DlmModel::DlmModel(Matrix transition, Matrix generator)
    : transition_(std::move(transition)), generator_(std::move(generator)) {
  const Eigen::Index d = transition_.rows();
  if (d < 1 || transition_.cols() != d || generator_.cols() != d ||
      generator_.rows() < d)
    GRASSLID_THROW(InputError, "dlm shapes: A ", transition_.rows(), "x",
                   transition_.cols(), ", C ", generator_.rows(), "x",
                   generator_.cols());
  if (!(OrthonormalityError(transition_) <= kOrthonormalTolerance))
    GRASSLID_THROW(InputError, "dlm transition not orthogonal");
  if (!(OrthonormalityError(generator_) <= kOrthonormalTolerance))
    GRASSLID_THROW(InputError, "dlm generator not column-orthonormal");
}

DlmFit FitDlm(const Matrix &y, int d) {
  const Eigen::Index m = y.rows(), k = y.cols();
  if (k < 2)
    GRASSLID_THROW(ShortUtteranceError, "dlm needs K >= 2 observations, got ",
                   k);
  if (d < 1 || d > std::min(m, k))
    GRASSLID_THROW(RankError, "dlm state dim ", d, " outside [1, ",
                   std::min(m, k), "]");
  SvdResult svd = TruncatedSvd(y, d);
  Matrix states = svd.singular_values.asDiagonal() * svd.right.transpose();
  Matrix a = OrthogonalProcrustes(states.leftCols(k - 1), states.rightCols(k - 1));
  return DlmFit{DlmModel(std::move(a), std::move(svd.left)), std::move(states)};
}

DlmFit FitDlm(const PhoneticSequence &seq, int d) {
  return FitDlm(Matrix(seq.Posteriors().transpose()), d);
}

Subspace DlmObservability(const DlmModel &model, int n) {
  if (n < 1) GRASSLID_THROW(InputError, "context order must be >= 1, got ", n);
  const int m = model.NumUnits(), d = model.StateDim();
  Matrix obs(static_cast<Eigen::Index>(n) * m, d);
  Matrix block = model.Generator();
  for (int i = 0; i < n; ++i) {
    obs.middleRows(static_cast<Eigen::Index>(i) * m, m) = block;
    block = block * model.Transition();
  }
  obs /= std::sqrt(static_cast<double>(n));
  return Subspace(std::move(obs), "dlm");
}

std::string_view MethodName(ConstructionMethod method) {
  switch (method) {
    case ConstructionMethod::kOlr: return "olr";
    case ConstructionMethod::kOdl: return "odl";
    case ConstructionMethod::kDlm: return "dlm";
  }
  return "?";
}

ConstructionMethod ParseMethod(std::string_view name) {
  std::string lower(name);
  for (char &c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "olr") return ConstructionMethod::kOlr;
  if (lower == "odl") return ConstructionMethod::kOdl;
  if (lower == "dlm") return ConstructionMethod::kDlm;
  GRASSLID_THROW(InputError, "unknown construction method '", name,
                 "' (expected olr, odl or dlm)");
}

void SubspaceSpec::Check() const {
  if (!(sample_ratio > 0.0 && sample_ratio < 1.0))
    GRASSLID_THROW(InputError, "sample ratio must lie in (0, 1), got ",
                   sample_ratio);
  if (context_order < 1)
    GRASSLID_THROW(InputError, "context order must be >= 1, got ",
                   context_order);
  if (method == ConstructionMethod::kOdl) odl.Check();
}

int SampleRank(int num_units, double ratio) {
  int d = static_cast<int>(std::floor(ratio * num_units + 1e-9));
  return std::max(d, 2);
}

Subspace Construct(const PhoneticSequence &seq, const SubspaceSpec &spec,
                   std::uint64_t seed) {
  spec.Check();
  const int d = SampleRank(seq.NumUnits(), spec.sample_ratio);
  switch (spec.method) {
    case ConstructionMethod::kOlr:
      return ConstructOlr(StackContext(seq, spec.context_order).data, d);
    case ConstructionMethod::kOdl:
      return ConstructOdl(StackContext(seq, spec.context_order).data, d,
                          spec.odl, seed);
    case ConstructionMethod::kDlm:
      return DlmObservability(FitDlm(seq, d).model, spec.context_order);
  }
  GRASSLID_THROW(InputError, "bad construction method");
}

}  // namespace grasslid
