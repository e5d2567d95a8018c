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

#pragma once

#include <functional>
#include <vector>

#include "tagtrack/objective/train.hpp"
#include "tagtrack/strain/metrics.hpp"

namespace tagtrack::strain {

struct AblationRow {
  double alpha = 0.0;
  double point_error_mm = 0.0;  // mean over eval cases
  double gcs_bias = 0.0, gcs_error = 0.0;
  double grs_bias = 0.0, grs_error = 0.0;
};

/// Summarize a cohort of per-case results into one ablation-table row.
AblationRow summarize_cohort(double alpha, const std::vector<CaseStrain>& cases);

/// Train one model per alpha (identical seed and data order) and evaluate
/// point error and strain agreement on the held-out cases.
template <typename T>
std::vector<AblationRow> ablation_sweep(const std::vector<CaseRecord>& train_set,
                                        const std::vector<CaseRecord>& eval_set,
                                        const std::vector<double>& alphas,
                                        objective::TrainConfig config,
                                        const diffnet::InrConfig& arch,
                                        const std::function<void(const AblationRow&)>& on_row = {});

extern template std::vector<AblationRow> ablation_sweep<float>(
    const std::vector<CaseRecord>&, const std::vector<CaseRecord>&, const std::vector<double>&,
    objective::TrainConfig, const diffnet::InrConfig&,
    const std::function<void(const AblationRow&)>&);
extern template std::vector<AblationRow> ablation_sweep<double>(
    const std::vector<CaseRecord>&, const std::vector<CaseRecord>&, const std::vector<double>&,
    objective::TrainConfig, const diffnet::InrConfig&,
    const std::function<void(const AblationRow&)>&);

}  // namespace tagtrack::strain
