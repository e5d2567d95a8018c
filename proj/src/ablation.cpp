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

#include "tagtrack/strain/ablation.hpp"

namespace tagtrack::strain {

AblationRow summarize_cohort(double alpha, const std::vector<CaseStrain>& cases) {
  if (cases.empty()) throw DataError("summarize_cohort: no cases");
  AblationRow row;
  row.alpha = alpha;
  std::vector<double> gcs_p, gcs_r, grs_p, grs_r;
  for (const auto& c : cases) {
    row.point_error_mm += c.point_error_mm;
    gcs_p.push_back(c.gcs_pred);
    gcs_r.push_back(c.gcs_ref);
    grs_p.push_back(c.grs_pred);
    grs_r.push_back(c.grs_ref);
  }
  row.point_error_mm /= static_cast<double>(cases.size());
  const auto g = agreement(gcs_p, gcs_r);
  const auto r = agreement(grs_p, grs_r);
  row.gcs_bias = g.bias;
  row.gcs_error = g.error;
  row.grs_bias = r.bias;
  row.grs_error = r.error;
  return row;
}

template <typename T>
std::vector<AblationRow> ablation_sweep(const std::vector<CaseRecord>& train_set,
                                        const std::vector<CaseRecord>& eval_set,
                                        const std::vector<double>& alphas,
                                        objective::TrainConfig config,
                                        const diffnet::InrConfig& arch,
                                        const std::function<void(const AblationRow&)>& on_row) {
  if (alphas.empty()) throw UsageError("ablation_sweep: empty alpha list");
  if (eval_set.empty()) throw DataError("ablation_sweep: empty evaluation set");

  std::vector<AblationRow> rows;
  rows.reserve(alphas.size());
  for (const double alpha : alphas) {
    config.weights.alpha = alpha;
    const auto state = objective::train<T>(train_set, config, arch);
    std::vector<CaseStrain> cases;
    cases.reserve(eval_set.size());
    for (const auto& rec : eval_set) {
      const auto pred = predict_landmarks(state.model, rec.series, rec.landmarks);
      cases.push_back(
          evaluate_case(rec.series.case_id, pred, rec.landmarks, rec.series.pixel_spacing_mm));
    }
    rows.push_back(summarize_cohort(alpha, cases));
    if (on_row) on_row(rows.back());
  }
  return rows;
}

template std::vector<AblationRow> ablation_sweep<float>(
    const std::vector<CaseRecord>&, const std::vector<CaseRecord>&, const std::vector<double>&,
    objective::TrainConfig, const diffnet::InrConfig&,
    const std::function<void(const AblationRow&)>&);
template std::vector<AblationRow> ablation_sweep<double>(
    const std::vector<CaseRecord>&, const std::vector<CaseRecord>&, const std::vector<double>&,
    objective::TrainConfig, const diffnet::InrConfig&,
    const std::function<void(const AblationRow&)>&);

}  // namespace tagtrack::strain
