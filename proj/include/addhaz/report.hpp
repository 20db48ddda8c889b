#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"

#include "addhaz/crossval.hpp"
#include "addhaz/eval.hpp"
#include "addhaz/simulate.hpp"
#include "addhaz/solver.hpp"

namespace addhaz {

/// Version stamped into every output document.
inline constexpr int kDocumentVersion = 1;

nlohmann::json penalty_to_json(const PenaltySpec& spec);
nlohmann::json sparse_to_json(const Eigen::VectorXd& beta);
nlohmann::json path_to_json(const SolutionPath& path);
nlohmann::json cv_to_json(const CvResult& cv, SelectionRule rule);
nlohmann::json metrics_to_json(const SimMetrics& m);
nlohmann::json study_to_json(const StudyReport& report, const StudyOptions& options);
nlohmann::json logrank_to_json(const LogRankResult& r);

/// Flat `key = value` document; `#` starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(std::istream& in);

}  // namespace addhaz
