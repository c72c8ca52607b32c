#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "p3ls/bench.hpp"
#include "p3ls/covariance.hpp"
#include "p3ls/pls.hpp"
#include "p3ls/point_pattern.hpp"

namespace p3ls {

/// Locale-independent formatting used for every file this library writes:
/// up to 12 significant digits, '.' decimal separator.
std::string format_double(double v);

/// Events file, header `subject_id,time`. Patterns are grouped by subject,
/// events sorted, subjects ordered by id. The window comes from the optional
/// argument or, failing that, from the file's min/max time.
std::vector<PointPattern> load_events(const std::string& path,
                                      std::optional<std::pair<double, double>> window = {});

void save_events(const std::string& path, const std::vector<PointPattern>& patterns);

/// Counts file, header `subject_id,bin_start,bin_end,count`. Each subject's
/// rows must tile a common window.
std::vector<CountVector> load_counts(const std::string& path);

void save_counts(const std::string& path, const std::vector<CountVector>& counts);

/// Responses file, header `subject_id,y`.
std::map<std::string, double> load_responses(const std::string& path);

void save_responses(const std::string& path, const std::vector<std::string>& ids,
                    const Eigen::VectorXd& y);

/// Model file: one JSON document with grid, config, basis, directions,
/// coefficients, means and the covariance spectrum. Save/load round-trips
/// byte-exactly.
void save_model(const std::string& path, const PlsModel& model);
PlsModel load_model(const std::string& path);

void save_covariance(const std::string& path, const CovarianceEstimate& cov);
void save_spectrum(const std::string& path, const Eigen::VectorXd& eigenvalues);
void save_curve(const std::string& path, const Curve& curve, const std::string& value_name);
void save_predictions(const std::string& path, const std::vector<std::string>& ids,
                      const Eigen::VectorXd& yhat);
void save_study_result(const std::string& path, const StudyResult& result);
void save_study_quantiles(const std::string& path, const StudyResult& result);
void save_cv_table(const std::string& path, const CvTable& table);
void save_cv_summary(const std::string& path, const CvTable& table);

}  // namespace p3ls
