// grasslid/snn.h

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

#ifndef GRASSLID_SNN_H_
#define GRASSLID_SNN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "grasslid/manifold.h"

namespace grasslid {

/// One training or test item: one subspace per input channel plus the
/// 0-based target index (ignored when scoring).
struct SnnSample {
  std::vector<Subspace> inputs;
  int label = 0;
};

/**
   Subspace network.  Input l owns `num_maps` weight maps W_lj of shape
   D_l x r_l, stored side by side in weight_maps[l] (D_l x num_maps * r_l).
   The kernel layer emits k_{l,j} = ||W_lj^T S_l||_F^2 at index
   l * num_maps + j.  The head is linear + softmax, or, when hidden_weights
   is non-empty, one tanh layer followed by linear + softmax.
*/
struct SnnModel {
  int num_maps = 0;
  std::vector<int> map_ranks;        // r_l per input
  std::vector<Matrix> weight_maps;   // D_l x (num_maps * r_l)
  Matrix hidden_weights;             // F x H, empty without hidden layer
  Vector hidden_bias;                // H
  Matrix head_weights;               // F x T, or H x T with a hidden layer
  Vector head_bias;                  // T
  double lambda = 0.0;

  int NumInputs() const { return static_cast<int>(weight_maps.size()); }
  int NumFeatures() const { return NumInputs() * num_maps; }
  int NumTargets() const { return static_cast<int>(head_bias.size()); }
  bool HasHidden() const { return hidden_weights.size() > 0; }
  /// Weight map j of input l (a D_l x r_l block).
  Matrix Map(int l, int j) const;
};

/// Gradients (or Adam moments) with the same layout as SnnModel.
struct SnnParameters {
  std::vector<Matrix> weight_maps;
  Matrix hidden_weights;
  Vector hidden_bias;
  Matrix head_weights;
  Vector head_bias;
};

struct SnnTrainConfig {
  double learning_rate = 1e-3;
  int lr_halving_period = 10;
  int batch_size = 24;
  int max_epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double lambda_orth = 1e-9;
  int num_maps = 170;
  double beta = 0.8;        // reference-to-sample rank ratio
  int hidden_units = 0;     // 0 = linear head
  std::uint64_t seed = 0;

  /// Throws InputError when a field is outside its admissible range.
  void Check() const;
};

/// max(floor(beta * sample_rank), 2).
int ReferenceRank(int sample_rank, double beta);

/// Learning rate of 0-based epoch e: lr * 0.5^floor(e / period).
double LearningRate(const SnnTrainConfig &cfg, int epoch);

struct SnnInputShape {
  int ambient_dim = 0;
  int map_rank = 0;
};

/**
   Fresh model: Haar-distributed weight maps, Glorot-normal head weights,
   zero biases.  Throws RankError if a map rank exceeds its ambient dim.
*/
SnnModel InitSnnModel(const std::vector<SnnInputShape> &shapes, int num_maps,
                      int num_targets, int hidden_units, double lambda,
                      std::uint64_t seed);

struct SnnForward {
  Vector kernel;      // F
  Vector hidden;      // H (empty without hidden layer)
  Vector logits;      // T
  Vector log_posteriors;
};

/// Kernel-layer scores.  Throws DimensionError on input count or ambient
/// dimension mismatch.
Vector KernelScores(const SnnModel &model, const SnnSample &sample);
SnnForward Forward(const SnnModel &model, const SnnSample &sample);

/// sum over all maps of ||W^T W - I||_F^2 (no lambda factor).
double OrthogonalityPenalty(const SnnModel &model);

struct SnnLoss {
  double cross_entropy = 0.0;  // batch mean
  double penalty = 0.0;        // lambda * OrthogonalityPenalty
  double Total() const { return cross_entropy + penalty; }
};

SnnLoss Loss(const SnnModel &model, const std::vector<const SnnSample *> &batch);

/**
   Loss and its gradient with respect to every parameter.  Per-input map
   gradients run in parallel; each one sums the batch in sample order, so
   results do not depend on the worker count.
*/
SnnLoss Backward(const SnnModel &model,
                 const std::vector<const SnnSample *> &batch,
                 SnnParameters *gradients);

struct SnnEpochLog {
  int epoch = 0;
  double learning_rate = 0.0;
  double mean_loss = 0.0;   // sample-weighted mean of batch losses
  double penalty = 0.0;     // at the end of the epoch
  double seconds = 0.0;
};

/**
   Mini-batch Adam on the loss above with the halving schedule.  The epoch
   order is a seeded shuffle; the last batch may be short.  Reference ranks
   come from the first sample's input ranks and cfg.beta.  Returns the model
   after the last epoch.  Throws InputError for an empty dataset, fewer than
   two classes present, or labels outside [0, num_targets).
*/
SnnModel TrainSnn(const std::vector<SnnSample> &data, int num_targets,
                  const SnnTrainConfig &cfg, std::vector<SnnEpochLog> *log);

/// Per-target log-softmax scores, N x T.
Matrix DetectionScores(const SnnModel &model,
                       const std::vector<SnnSample> &samples);

struct GradCheckEntry {
  std::string tensor;
  double max_relative_error = 0.0;  // max |g - fd| / max |fd| over the tensor
};

/// Compares Backward against central differences of Loss with step h.
std::vector<GradCheckEntry> GradCheck(
    const SnnModel &model, const std::vector<const SnnSample *> &batch,
    double step);

/**
   Self-contained gradient check: a random two-input model (optionally with
   a hidden layer) whose maps are pushed off orthonormality so the penalty
   gradient is active, evaluated on a random batch.
*/
std::vector<GradCheckEntry> RandomGradCheck(std::uint64_t seed,
                                            bool hidden_layer, double step);

}  // namespace grasslid

#endif  // GRASSLID_SNN_H_
