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

#include <vector>

#include "tagtrack/core/types.hpp"
#include "tagtrack/diffnet/model.hpp"

namespace tagtrack::strain {

/// Lagrangian chord strain (L_ES - L_ED) / L_ED.
double local_strain(double l_ed, double l_es);

struct StrainValue {
  double mean = 0.0;
  std::vector<double> per_pair;
};

/// Global circumferential strain: chord strains over every cyclically
/// adjacent spoke pair of every ring, averaged.
StrainValue gcs(const LandmarkGrid& grid, int ed_frame, int es_frame);

/// Global radial strain: chord strains over every adjacent ring pair of
/// every spoke, averaged.
StrainValue grs(const LandmarkGrid& grid, int ed_frame, int es_frame);

/// Root mean squared point distance over all frames t > 0, in millimetres.
double point_rmse(const LandmarkGrid& pred, const LandmarkGrid& ref, double spacing_mm);

struct AgreementStats {
  double bias = 0.0;   // mean signed difference, percent
  double sd = 0.0;     // standard deviation of the signed differences
  double error = 0.0;  // mean absolute difference, percent
  int n_cases = 0;
};

/// Bias / error between per-case predicted and reference strain fractions,
/// reported in percent.
AgreementStats agreement(const std::vector<double>& pred, const std::vector<double>& ref);

/// Frame with the smallest mean innermost-ring circumference (ties go to the
/// earliest frame).
int end_systole_index(const LandmarkGrid& landmarks);

/// Track the frame-0 grid through the network for every frame. Frame 0 of
/// the result is the reference grid itself (the material points), frames
/// t > 0 are X + u with Z re-encoded per target frame.
template <typename T>
LandmarkGrid predict_landmarks(const diffnet::InrModel<T>& model, const TagFrameSeries& series,
                               const LandmarkGrid& reference);

extern template LandmarkGrid predict_landmarks<float>(const diffnet::InrModel<float>&,
                                                      const TagFrameSeries&,
                                                      const LandmarkGrid&);
extern template LandmarkGrid predict_landmarks<double>(const diffnet::InrModel<double>&,
                                                       const TagFrameSeries&,
                                                       const LandmarkGrid&);

/// Per-case strain summary used by the report writers.
struct CaseStrain {
  std::string case_id;
  int es_frame = 0;
  double point_error_mm = 0.0;
  double gcs_pred = 0.0, gcs_ref = 0.0;
  double grs_pred = 0.0, grs_ref = 0.0;
};

/// Compare one predicted trajectory against its reference: ES is located on
/// the reference trajectory and reused for the prediction.
CaseStrain evaluate_case(const std::string& case_id, const LandmarkGrid& pred,
                         const LandmarkGrid& ref, double spacing_mm);

/// Unweighted mean over slices sharing a case key, preserving first-seen
/// order. case_keys runs parallel to slices.
std::vector<CaseStrain> aggregate_slices(const std::vector<CaseStrain>& slices,
                                         const std::vector<std::string>& case_keys);

}  // namespace tagtrack::strain
