// src/snn.cc

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

#include "grasslid/snn.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "grasslid/error.h"
#include "grasslid/parallel.h"

namespace grasslid {

namespace {

Vector LogSoftmax(const Vector &logits) {
  double mx = logits.maxCoeff();
  double lse = mx + std::log((logits.array() - mx).exp().sum());
  return logits.array() - lse;
}

void CheckSample(const SnnModel &model, const SnnSample &sample) {
  if (static_cast<int>(sample.inputs.size()) != model.NumInputs())
    GRASSLID_THROW(DimensionError, "sample has ", sample.inputs.size(),
                   " inputs, model expects ", model.NumInputs());
  for (int l = 0; l < model.NumInputs(); ++l)
    if (sample.inputs[l].AmbientDim() != model.weight_maps[l].rows())
      GRASSLID_THROW(DimensionError, "input ", l, " has ambient dim ",
                     sample.inputs[l].AmbientDim(), ", weight maps have ",
                     model.weight_maps[l].rows());
}

// Squared norms of each map's block of rows in P = W_l^T S_l.
void MapScores(const Matrix &projected, int num_maps, int rank,
               Eigen::Ref<Vector> out) {
  for (int j = 0; j < num_maps; ++j)
    out(j) = projected.middleRows(static_cast<Eigen::Index>(j) * rank, rank)
                 .squaredNorm();
}

SnnParameters ZerosLike(const SnnModel &model) {
  SnnParameters p;
  for (const Matrix &w : model.weight_maps)
    p.weight_maps.push_back(Matrix::Zero(w.rows(), w.cols()));
  p.hidden_weights = Matrix::Zero(model.hidden_weights.rows(),
                                  model.hidden_weights.cols());
  p.hidden_bias = Vector::Zero(model.hidden_bias.size());
  p.head_weights = Matrix::Zero(model.head_weights.rows(),
                                model.head_weights.cols());
  p.head_bias = Vector::Zero(model.head_bias.size());
  return p;
}

// Visits every (model tensor, parameter tensor) pair with a name.
template <typename Model, typename Params, typename Fn>
void ForEachTensor(Model &model, Params &params, Fn fn) {
  for (size_t l = 0; l < model.weight_maps.size(); ++l)
    fn("weight_maps[" + std::to_string(l) + "]", model.weight_maps[l],
       params.weight_maps[l]);
  if (model.hidden_weights.size() > 0) {
    fn("hidden_weights", model.hidden_weights, params.hidden_weights);
    fn("hidden_bias", model.hidden_bias, params.hidden_bias);
  }
  fn("head_weights", model.head_weights, params.head_weights);
  fn("head_bias", model.head_bias, params.head_bias);
}

}  // namespace

Matrix SnnModel::Map(int l, int j) const {
  return weight_maps[l].middleCols(static_cast<Eigen::Index>(j) * map_ranks[l],
                                   map_ranks[l]);
}

void SnnTrainConfig::Check() const {
  if (!(learning_rate > 0.0)) GRASSLID_THROW(InputError, "learning rate must be > 0");
  if (lr_halving_period < 1)
    GRASSLID_THROW(InputError, "lr halving period must be >= 1");
  if (batch_size < 1) GRASSLID_THROW(InputError, "batch size must be >= 1");
  if (max_epochs < 1) GRASSLID_THROW(InputError, "epochs must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 &&
        adam_beta2 < 1.0 && adam_epsilon > 0.0))
    GRASSLID_THROW(InputError, "invalid Adam parameters");
  if (!(lambda_orth >= 0.0) || !std::isfinite(lambda_orth))
    GRASSLID_THROW(InputError, "lambda_orth must be finite and >= 0");
  if (num_maps < 1) GRASSLID_THROW(InputError, "number of maps must be >= 1");
  if (!(beta >= 0.5 && beta <= 1.5))
    GRASSLID_THROW(InputError, "beta must lie in [0.5, 1.5], got ", beta);
  if (hidden_units < 0) GRASSLID_THROW(InputError, "hidden units must be >= 0");
}

int ReferenceRank(int sample_rank, double beta) {
  return std::max(static_cast<int>(std::floor(beta * sample_rank + 1e-9)), 2);
}

double LearningRate(const SnnTrainConfig &cfg, int epoch) {
  return cfg.learning_rate * std::pow(0.5, epoch / cfg.lr_halving_period);
}

SnnModel InitSnnModel(const std::vector<SnnInputShape> &shapes, int num_maps,
                      int num_targets, int hidden_units, double lambda,
                      std::uint64_t seed) {
  if (shapes.empty()) GRASSLID_THROW(InputError, "network needs >= 1 input");
  if (num_maps < 1 || num_targets < 2)
    GRASSLID_THROW(InputError, "network needs >= 1 map and >= 2 targets");
  SnnModel model;
  model.num_maps = num_maps;
  model.lambda = lambda;
  std::mt19937_64 rng(DeriveSeed(seed, "snn-init"));
  for (const SnnInputShape &s : shapes) {
    if (s.map_rank < 1 || s.map_rank > s.ambient_dim)
      GRASSLID_THROW(RankError, "map rank ", s.map_rank, " outside [1, ",
                     s.ambient_dim, "]");
    model.map_ranks.push_back(s.map_rank);
    Matrix w(s.ambient_dim, static_cast<Eigen::Index>(num_maps) * s.map_rank);
    for (int j = 0; j < num_maps; ++j)
      w.middleCols(static_cast<Eigen::Index>(j) * s.map_rank, s.map_rank) =
          RandomOrthonormalMatrix(s.ambient_dim, s.map_rank, rng);
    model.weight_maps.push_back(std::move(w));
  }
  auto glorot = [&rng](int fan_in, int fan_out) {
    std::normal_distribution<double> normal(
        0.0, std::sqrt(2.0 / (fan_in + fan_out)));
    Matrix m(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r)
      for (int c = 0; c < fan_out; ++c) m(r, c) = normal(rng);
    return m;
  };
  const int features = model.NumFeatures();
  if (hidden_units > 0) {
    model.hidden_weights = glorot(features, hidden_units);
    model.hidden_bias = Vector::Zero(hidden_units);
    model.head_weights = glorot(hidden_units, num_targets);
  } else {
    model.head_weights = glorot(features, num_targets);
  }
  model.head_bias = Vector::Zero(num_targets);
  return model;
}

Vector KernelScores(const SnnModel &model, const SnnSample &sample) {
  CheckSample(model, sample);
  Vector k(model.NumFeatures());
  for (int l = 0; l < model.NumInputs(); ++l) {
    Matrix projected = model.weight_maps[l].transpose() * sample.inputs[l].Basis();
    MapScores(projected, model.num_maps, model.map_ranks[l],
              k.segment(static_cast<Eigen::Index>(l) * model.num_maps,
                        model.num_maps));
  }
  return k;
}

SnnForward Forward(const SnnModel &model, const SnnSample &sample) {
  SnnForward out;
  out.kernel = KernelScores(model, sample);
  if (model.HasHidden()) {
    out.hidden = (model.hidden_weights.transpose() * out.kernel +
                  model.hidden_bias).array().tanh();
    out.logits = model.head_weights.transpose() * out.hidden + model.head_bias;
  } else {
    out.logits = model.head_weights.transpose() * out.kernel + model.head_bias;
  }
  out.log_posteriors = LogSoftmax(out.logits);
  return out;
}

double OrthogonalityPenalty(const SnnModel &model) {
  double total = 0.0;
  for (int l = 0; l < model.NumInputs(); ++l) {
    for (int j = 0; j < model.num_maps; ++j) {
      Matrix w = model.Map(l, j);
      Matrix gram = w.transpose() * w;
      gram.diagonal().array() -= 1.0;
      total += gram.squaredNorm();
    }
  }
  return total;
}

SnnLoss Loss(const SnnModel &model, const std::vector<const SnnSample *> &batch) {
  if (batch.empty()) GRASSLID_THROW(InputError, "empty batch");
  std::vector<double> nll(batch.size());
  ParallelFor(static_cast<int>(batch.size()), [&](int b) {
    nll[b] = -Forward(model, *batch[b]).log_posteriors(batch[b]->label);
  });
  SnnLoss loss;
  for (double v : nll) loss.cross_entropy += v;
  loss.cross_entropy /= batch.size();
  loss.penalty = model.lambda * OrthogonalityPenalty(model);
  return loss;
}

SnnLoss Backward(const SnnModel &model,
                 const std::vector<const SnnSample *> &batch,
                 SnnParameters *gradients) {
  if (batch.empty()) GRASSLID_THROW(InputError, "empty batch");
  const int nb = static_cast<int>(batch.size());
  const double inv = 1.0 / nb;
  std::vector<SnnForward> fwd(nb);
  std::vector<Vector> dkernel(nb);
  ParallelFor(nb, [&](int b) {
    fwd[b] = Forward(model, *batch[b]);
    if (batch[b]->label < 0 || batch[b]->label >= model.NumTargets())
      GRASSLID_THROW(InputError, "label ", batch[b]->label, " out of range");
  });

  SnnParameters &g = *gradients;
  g = ZerosLike(model);
  SnnLoss loss;
  for (int b = 0; b < nb; ++b) {
    const SnnForward &f = fwd[b];
    loss.cross_entropy -= f.log_posteriors(batch[b]->label);
    Vector delta = f.log_posteriors.array().exp();
    delta(batch[b]->label) -= 1.0;
    delta *= inv;
    g.head_bias += delta;
    if (model.HasHidden()) {
      g.head_weights += f.hidden * delta.transpose();
      Vector da = (model.head_weights * delta).array() *
                  (1.0 - f.hidden.array().square());
      g.hidden_weights += f.kernel * da.transpose();
      g.hidden_bias += da;
      dkernel[b] = model.hidden_weights * da;
    } else {
      g.head_weights += f.kernel * delta.transpose();
      dkernel[b] = model.head_weights * delta;
    }
  }
  loss.cross_entropy *= inv;

  // d ||W^T S||^2 / dW = 2 S (W^T S)^T, scaled per map by dL/dk.
  ParallelFor(model.NumInputs(), [&](int l) {
    const int rank = model.map_ranks[l];
    const Matrix &w = model.weight_maps[l];
    Matrix &gw = g.weight_maps[l];
    for (int b = 0; b < nb; ++b) {
      const Matrix &s = batch[b]->inputs[l].Basis();
      Matrix projected = w.transpose() * s;
      for (int j = 0; j < model.num_maps; ++j)
        projected.middleRows(static_cast<Eigen::Index>(j) * rank, rank) *=
            2.0 * dkernel[b](l * model.num_maps + j);
      gw.noalias() += s * projected.transpose();
    }
    // d lambda ||W^T W - I||^2 / dW = 4 lambda W (W^T W - I).
    if (model.lambda != 0.0) {
      for (int j = 0; j < model.num_maps; ++j) {
        const auto block = w.middleCols(static_cast<Eigen::Index>(j) * rank, rank);
        Matrix gram = block.transpose() * block;
        gram.diagonal().array() -= 1.0;
        gw.middleCols(static_cast<Eigen::Index>(j) * rank, rank) +=
            4.0 * model.lambda * block * gram;
      }
    }
  });
  loss.penalty = model.lambda * OrthogonalityPenalty(model);
  return loss;
}

SnnModel TrainSnn(const std::vector<SnnSample> &data, int num_targets,
                  const SnnTrainConfig &cfg, std::vector<SnnEpochLog> *log) {
  cfg.Check();
  if (data.empty()) GRASSLID_THROW(InputError, "empty training set");
  std::set<int> classes;
  for (const SnnSample &s : data) {
    if (s.label < 0 || s.label >= num_targets)
      GRASSLID_THROW(InputError, "label ", s.label, " outside [0, ",
                     num_targets, ")");
    classes.insert(s.label);
  }
  if (classes.size() < 2)
    GRASSLID_THROW(InputError, "training needs at least two classes");

  std::vector<SnnInputShape> shapes;
  for (const Subspace &s : data.front().inputs)
    shapes.push_back({s.AmbientDim(),
                      std::min(ReferenceRank(s.Rank(), cfg.beta), s.AmbientDim())});
  SnnModel model = InitSnnModel(shapes, cfg.num_maps, num_targets,
                                cfg.hidden_units, cfg.lambda_orth, cfg.seed);
  for (const SnnSample &s : data) CheckSample(model, s);

  SnnParameters first = ZerosLike(model), second = ZerosLike(model), grad;
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(DeriveSeed(cfg.seed, "snn-shuffle"));
  long long step = 0;
  if (log) log->clear();
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    const double lr = LearningRate(cfg, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<const SnnSample *> batch;
      for (size_t i = begin; i < end; ++i) batch.push_back(&data[order[i]]);
      SnnLoss loss = Backward(model, batch, &grad);
      loss_sum += loss.Total() * batch.size();

      ++step;
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      auto update = [&](auto &param, auto &m1, auto &m2, const auto &gr) {
        m1 = cfg.adam_beta1 * m1 + (1.0 - cfg.adam_beta1) * gr;
        m2 = cfg.adam_beta2 * m2 + (1.0 - cfg.adam_beta2) * gr.cwiseAbs2();
        param.array() -= lr * (m1.array() / c1) /
                         ((m2.array() / c2).sqrt() + cfg.adam_epsilon);
      };
      for (int l = 0; l < model.NumInputs(); ++l)
        update(model.weight_maps[l], first.weight_maps[l], second.weight_maps[l],
               grad.weight_maps[l]);
      if (model.HasHidden()) {
        update(model.hidden_weights, first.hidden_weights, second.hidden_weights,
               grad.hidden_weights);
        update(model.hidden_bias, first.hidden_bias, second.hidden_bias,
               grad.hidden_bias);
      }
      update(model.head_weights, first.head_weights, second.head_weights,
             grad.head_weights);
      update(model.head_bias, first.head_bias, second.head_bias, grad.head_bias);
    }
    if (log) {
      SnnEpochLog entry;
      entry.epoch = epoch;
      entry.learning_rate = lr;
      entry.mean_loss = loss_sum / data.size();
      entry.penalty = model.lambda * OrthogonalityPenalty(model);
      entry.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start).count();
      log->push_back(entry);
    }
  }
  return model;
}

Matrix DetectionScores(const SnnModel &model,
                       const std::vector<SnnSample> &samples) {
  Matrix out(samples.size(), model.NumTargets());
  ParallelFor(static_cast<int>(samples.size()), [&](int i) {
    out.row(i) = Forward(model, samples[i]).log_posteriors.transpose();
  });
  return out;
}

std::vector<GradCheckEntry> GradCheck(
    const SnnModel &model, const std::vector<const SnnSample *> &batch,
    double step) {
  SnnParameters analytic;
  Backward(model, batch, &analytic);
  SnnModel probe = model;
  std::vector<GradCheckEntry> out;
  ForEachTensor(probe, analytic, [&](const std::string &name, auto &param,
                                     const auto &grad) {
    double max_err = 0.0, max_fd = 0.0;
    for (Eigen::Index i = 0; i < param.size(); ++i) {
      double saved = param.data()[i];
      param.data()[i] = saved + step;
      double up = Loss(probe, batch).Total();
      param.data()[i] = saved - step;
      double down = Loss(probe, batch).Total();
      param.data()[i] = saved;
      double fd = (up - down) / (2.0 * step);
      max_err = std::max(max_err, std::abs(grad.data()[i] - fd));
      max_fd = std::max(max_fd, std::abs(fd));
    }
    out.push_back({name, max_fd > 0.0 ? max_err / max_fd : max_err});
  });
  return out;
}

std::vector<GradCheckEntry> RandomGradCheck(std::uint64_t seed,
                                            bool hidden_layer, double step) {
  std::mt19937_64 rng(DeriveSeed(seed, "gradcheck"));
  std::uniform_int_distribution<int> pick(0, 2);
  const int num_targets = 3 + pick(rng);
  const std::vector<SnnInputShape> shapes = {{6 + pick(rng), 2},
                                             {8 + pick(rng), 3}};
  SnnModel model = InitSnnModel(shapes, 3 + pick(rng), num_targets,
                                hidden_layer ? 4 : 0, 0.05, seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Matrix &w : model.weight_maps)
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] += 0.1 * normal(rng);
  for (Eigen::Index i = 0; i < model.head_bias.size(); ++i)
    model.head_bias(i) = 0.1 * normal(rng);
  if (model.HasHidden())
    for (Eigen::Index i = 0; i < model.hidden_bias.size(); ++i)
      model.hidden_bias(i) = 0.1 * normal(rng);

  std::vector<SnnSample> samples(5);
  for (int b = 0; b < 5; ++b) {
    samples[b].label = b % num_targets;
    samples[b].inputs.push_back(
        Subspace(RandomOrthonormalMatrix(shapes[0].ambient_dim, 3, rng)));
    samples[b].inputs.push_back(
        Subspace(RandomOrthonormalMatrix(shapes[1].ambient_dim, 2, rng)));
  }
  std::vector<const SnnSample *> batch;
  for (const SnnSample &s : samples) batch.push_back(&s);
  return GradCheck(model, batch, step);
}

}  // namespace grasslid
