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
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tagtrack/io/reports.hpp"

namespace tagtrack::io {

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write report: " + path.string());
  return f;
}

void write_strain_row(std::ofstream& f, const std::string& id, double point_error,
                      double gcs_pct, double gcs_bias, double gcs_error, double grs_pct,
                      double grs_bias, double grs_error) {
  f << id << ',' << csv_number(point_error) << ',' << csv_number(gcs_pct) << ','
    << csv_number(gcs_bias) << ',' << csv_number(gcs_error) << ',' << csv_number(grs_pct) << ','
    << csv_number(grs_bias) << ',' << csv_number(grs_error) << "\n";
}

}  // namespace

void write_per_case_csv(const std::filesystem::path& path,
                        const std::vector<strain::CaseStrain>& cases) {
  auto f = open_out(path);
  f << "case_id,point_error_mm,gcs,gcs_bias,gcs_error,grs,grs_bias,grs_error\n";
  for (const auto& c : cases) {
    const double gcs_bias = (c.gcs_pred - c.gcs_ref) * 100.0;
    const double grs_bias = (c.grs_pred - c.grs_ref) * 100.0;
    write_strain_row(f, c.case_id, c.point_error_mm, c.gcs_pred * 100.0, gcs_bias,
                     std::abs(gcs_bias), c.grs_pred * 100.0, grs_bias, std::abs(grs_bias));
  }
}

void write_cohort_csv(const std::filesystem::path& path,
                      const std::vector<strain::CaseStrain>& cases) {
  if (cases.empty()) throw DataError("write_cohort_csv: no cases");
  auto f = open_out(path);
  f << "case_id,point_error_mm,gcs,gcs_bias,gcs_error,grs,grs_bias,grs_error\n";

  double point_error = 0.0, gcs_mean = 0.0, grs_mean = 0.0;
  std::vector<double> gcs_p, gcs_r, grs_p, grs_r;
  for (const auto& c : cases) {
    point_error += c.point_error_mm;
    gcs_mean += c.gcs_pred;
    grs_mean += c.grs_pred;
    gcs_p.push_back(c.gcs_pred);
    gcs_r.push_back(c.gcs_ref);
    grs_p.push_back(c.grs_pred);
    grs_r.push_back(c.grs_ref);
  }
  const double n = static_cast<double>(cases.size());
  const auto g = strain::agreement(gcs_p, gcs_r);
  const auto r = strain::agreement(grs_p, grs_r);
  write_strain_row(f, "cohort", point_error / n, gcs_mean / n * 100.0, g.bias, g.error,
                   grs_mean / n * 100.0, r.bias, r.error);
}

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<strain::AblationRow>& rows) {
  auto f = open_out(path);
  f << "alpha,point_error,gcs_bias,gcs_error,grs_bias,grs_error\n";
  for (const auto& row : rows)
    f << csv_number(row.alpha) << ',' << csv_number(row.point_error_mm) << ','
      << csv_number(row.gcs_bias) << ',' << csv_number(row.gcs_error) << ','
      << csv_number(row.grs_bias) << ',' << csv_number(row.grs_error) << "\n";
}

}  // namespace tagtrack::io
