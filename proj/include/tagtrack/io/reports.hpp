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

#include <filesystem>
#include <string>
#include <vector>

#include "tagtrack/strain/ablation.hpp"
#include "tagtrack/strain/metrics.hpp"

namespace tagtrack::io {

std::string csv_number(double v);

/// Columns: case_id,point_error_mm,gcs,gcs_bias,gcs_error,grs,grs_bias,grs_error
/// Strains in percent, biases/errors in percentage points.
void write_per_case_csv(const std::filesystem::path& path,
                        const std::vector<strain::CaseStrain>& cases);

/// Same columns, one aggregate row over the cohort.
void write_cohort_csv(const std::filesystem::path& path,
                      const std::vector<strain::CaseStrain>& cases);

/// Columns: alpha,point_error,gcs_bias,gcs_error,grs_bias,grs_error
void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<strain::AblationRow>& rows);

}  // namespace tagtrack::io
