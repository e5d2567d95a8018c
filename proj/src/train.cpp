/*
 * tagtrack : conditioned implicit neural representations for tagged-MRI motion tracking
 *
 * Copyright 2026 the tagtrack authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>

#include "tagtrack/core/coords.hpp"
#include "tagtrack/objective/train.hpp"
#include "tagtrack/util/rng.hpp"

namespace tagtrack::objective {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct SampleKey {
  int case_index;
  int frame;
};

struct CaseCache {
  std::vector<Vec2> ed_norm;                       // frame-0 points, normalized
  std::vector<std::vector<Vec2>> targets_norm;     // per frame
  Vec2 centroid_norm;
  double r_min_norm = 0.0, r_max_norm = 0.0;
};

void validate_dataset(const std::vector<CaseRecord>& dataset, const diffnet::InrConfig& arch) {
  if (dataset.empty()) throw DataError("train: empty dataset");
  for (const auto& rec : dataset) {
    if (rec.series.frame_count() < 2)
      throw DataError("train: case " + rec.series.case_id + " has fewer than 2 frames");
    if (rec.landmarks.frame_count() != rec.series.frame_count())
      throw DataError("train: case " + rec.series.case_id +
                      " landmark frames do not match image frames");
    for (const auto& img : rec.series.frames)
      if (img.width != arch.image_size || img.height != arch.image_size)
        throw DataError("train: case " + rec.series.case_id + " frames are not " +
                        std::to_string(arch.image_size) + "x" + std::to_string(arch.image_size));
  }
}

std::vector<CaseCache> build_cache(const std::vector<CaseRecord>& dataset, int image_size) {
  std::vector<CaseCache> cache(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& lm = dataset[i].landmarks;
    CaseCache& c = cache[i];
    c.ed_norm = normalize_coords(lm.frame(0), image_size);
    c.targets_norm.resize(lm.frame_count());
    for (int t = 0; t < lm.frame_count(); ++t)
      c.targets_norm[t] = normalize_coords(lm.frame(t), image_size);

    Vec2 centroid{0.0, 0.0};
    for (const auto& p : c.ed_norm) centroid = centroid + p;
    centroid = (1.0 / static_cast<double>(c.ed_norm.size())) * centroid;
    c.centroid_norm = centroid;
    double rmin = 1e30, rmax = 0.0;
    for (const auto& p : c.ed_norm) {
      const double r = std::hypot(p.x - centroid.x, p.y - centroid.y);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    c.r_min_norm = rmin;
    c.r_max_norm = rmax;
  }
  return cache;
}

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(epoch + 1));
}

std::vector<Vec2> sample_interior_points(const CaseCache& c, std::size_t count, Rng& rng) {
  std::vector<Vec2> pts;
  pts.reserve(count);
  const double r2min = c.r_min_norm * c.r_min_norm;
  const double r2max = c.r_max_norm * c.r_max_norm;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = std::sqrt(r2min + rng.uniform() * (r2max - r2min));
    const double th = kTwoPi * rng.uniform();
    pts.push_back({c.centroid_norm.x + r * std::cos(th), c.centroid_norm.y + r * std::sin(th)});
  }
  return pts;
}

}  // namespace

template <typename T>
void train_continue(TrainState<T>& state, const std::vector<CaseRecord>& dataset,
                    const TrainConfig& config, const EpochCallback<T>& on_epoch) {
  const auto& arch = state.model.config;
  validate_dataset(dataset, arch);
  if (config.batch_size < 1) throw DataError("train: batch_size must be >= 1");
  if (!(config.learning_rate > 0.0)) throw DataError("train: learning_rate must be positive");

  const auto cache = build_cache(dataset, arch.image_size);

  std::vector<SampleKey> all_samples;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    for (int t = 1; t < dataset[i].series.frame_count(); ++t)
      all_samples.push_back({static_cast<int>(i), t});

  for (int epoch = state.next_epoch; epoch < config.epochs; ++epoch) {
    Rng rng(epoch_seed(config.seed, epoch));
    std::vector<SampleKey> order = all_samples;
    rng.shuffle(order);

    EpochStats stats;
    stats.epoch = epoch;
    std::size_t done = 0;
    while (done < order.size()) {
      const std::size_t bsz =
          std::min<std::size_t>(config.batch_size, order.size() - done);
      std::vector<diffnet::SupervisionSample> batch(bsz);
      for (std::size_t s = 0; s < bsz; ++s) {
        const SampleKey key = order[done + s];
        const auto& rec = dataset[key.case_index];
        const auto& c = cache[key.case_index];
        auto& sample = batch[s];
        sample.i0 = &rec.series.frames[0];
        sample.it = &rec.series.frames[key.frame];
        sample.t_norm = normalize_time(key.frame, rec.series.frame_count());
        sample.points_norm = c.ed_norm;
        sample.targets_norm = c.targets_norm[key.frame];
        if (config.jacobian_policy == JacobianSamplePolicy::random_interior)
          sample.jac_points_norm = sample_interior_points(c, c.ed_norm.size(), rng);
      }
      const auto bundle = diffnet::loss_gradients(state.model, batch, config.weights.alpha,
                                                  config.weights.beta, config.workers);
      adam_step(state.model.params, bundle.grad, state.opt, config.learning_rate,
                state.model.layout);
      stats.pos += bundle.losses.pos * bsz;
      stats.jac += bundle.losses.jac * bsz;
      stats.latent += bundle.losses.latent * bsz;
      stats.total += bundle.losses.total * bsz;
      done += bsz;
    }
    const double inv = 1.0 / static_cast<double>(order.size());
    stats.pos *= inv;
    stats.jac *= inv;
    stats.latent *= inv;
    stats.total *= inv;

    state.next_epoch = epoch + 1;
    state.history.push_back(stats);
    if (on_epoch) on_epoch(state, stats);
  }
}

template <typename T>
TrainState<T> train(const std::vector<CaseRecord>& dataset, const TrainConfig& config,
                    const diffnet::InrConfig& arch, const EpochCallback<T>& on_epoch) {
  TrainState<T> state;
  state.model = diffnet::init_model<T>(config.seed, arch);
  state.opt = OptimizerState<T>(state.model.layout.total());
  train_continue(state, dataset, config, on_epoch);
  return state;
}

template TrainState<float> train<float>(const std::vector<CaseRecord>&, const TrainConfig&,
                                        const diffnet::InrConfig&, const EpochCallback<float>&);
template TrainState<double> train<double>(const std::vector<CaseRecord>&, const TrainConfig&,
                                          const diffnet::InrConfig&,
                                          const EpochCallback<double>&);
template void train_continue<float>(TrainState<float>&, const std::vector<CaseRecord>&,
                                    const TrainConfig&, const EpochCallback<float>&);
template void train_continue<double>(TrainState<double>&, const std::vector<CaseRecord>&,
                                     const TrainConfig&, const EpochCallback<double>&);

}  // namespace tagtrack::objective
