#include "addhaz/report.hpp"

#include <istream>
#include <stdexcept>

namespace addhaz {

using nlohmann::json;

namespace {

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

json fit_config_json(const FitConfig& cfg) {
  json j = {{"tol", cfg.tol},
            {"max_sweeps", cfg.max_sweeps},
            {"grid_size", cfg.grid_size},
            {"grid_ratio", cfg.grid_ratio}};
  j["max_active"] = cfg.max_active ? json(*cfg.max_active) : json(nullptr);
  return j;
}

}  // namespace

json penalty_to_json(const PenaltySpec& spec) {
  json j = {{"kind", to_string(spec.kind())}};
  switch (spec.kind()) {
    case PenaltyKind::kSCAD:
    case PenaltyKind::kMCP:
    case PenaltyKind::kSICA: j["a"] = spec.shape_a(); break;
    case PenaltyKind::kElasticNet: j["alpha"] = spec.enet_alpha(); break;
    case PenaltyKind::kL1: break;
  }
  return j;
}

json sparse_to_json(const Eigen::VectorXd& beta) {
  json arr = json::array();
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) arr.push_back(json::array({j, beta(j)}));
  }
  return arr;
}

json path_to_json(const SolutionPath& path) {
  json doc = {{"version", kDocumentVersion}, {"document", "solution_path"}};
  doc["penalty"] = penalty_to_json(path.penalty);
  doc["stage_shapes"] = path.stage_shapes;
  doc["lambdas"] = path.lambdas;
  doc["completed"] = path.completed();
  doc["early_stopped"] = path.early_stopped;
  doc["excluded_coordinates"] = path.excluded;
  json points = json::array();
  for (std::size_t k = 0; k < path.completed(); ++k) {
    points.push_back({{"lambda", path.lambdas[k]},
                      {"nonzeros", sparse_to_json(path.betas[k])},
                      {"objective", path.objective_values[k]},
                      {"sweeps", path.sweeps_used[k]},
                      {"converged", static_cast<bool>(path.converged_flags[k])},
                      {"coordinatewise_convex", static_cast<bool>(path.coordinatewise_convex[k])},
                      {"convexity_warning", static_cast<bool>(path.convexity_warnings[k])}});
  }
  doc["points"] = std::move(points);
  return doc;
}

json cv_to_json(const CvResult& cv, SelectionRule rule) {
  const std::size_t chosen = select_index(cv, rule);
  json doc = {{"version", kDocumentVersion}, {"document", "cross_validation"}};
  doc["folds"] = cv.fold_losses.size();
  doc["rule"] = to_string(rule);
  doc["lambdas"] = cv.lambdas;
  doc["cv_scores"] = cv.cv_scores;
  doc["cv_se"] = cv.cv_se;
  doc["best_index"] = cv.best_index;
  doc["selected_index"] = chosen;
  doc["selected_lambda"] = cv.lambdas[chosen];
  doc["fold_assignment"] = cv.fold_assignment;
  doc["selected_coefficients"] = sparse_to_json(cv.full_path.betas.at(chosen));
  doc["path"] = path_to_json(cv.full_path);
  return doc;
}

json metrics_to_json(const SimMetrics& m) {
  return {{"pe1", m.pe1},
          {"pe2", m.pe2},
          {"l2_loss", m.l2_loss},
          {"l1_loss", m.l1_loss},
          {"num_selected", m.num_selected},
          {"false_negatives", m.false_negatives},
          {"false_negatives_strong", m.false_negatives_strong}};
}

json study_to_json(const StudyReport& report, const StudyOptions& options) {
  const auto& cfg = report.config;
  json doc = {{"version", kDocumentVersion}, {"document", "simulation_study"}};
  doc["master_seed"] = cfg.seed;
  const Eigen::VectorXd beta0 = cfg.base_beta0();
  doc["config"] = {{"n", cfg.n},
                   {"p", cfg.p},
                   {"rho", cfg.rho},
                   {"beta0", sparse_to_json(beta0)},
                   {"target_censoring", cfg.target_censoring},
                   {"weak_effect_count", cfg.weak_effect_count},
                   {"weak_effect_eps", cfg.weak_effect_eps},
                   {"replicates", cfg.replicates},
                   {"test_n", cfg.test_n},
                   {"folds", options.folds},
                   {"rule", to_string(options.rule)},
                   {"curve_max_size", options.curve_max_size},
                   {"fit", fit_config_json(options.fit)}};
  json methods = json::array();
  for (const auto& m : options.methods) {
    methods.push_back({{"label", m.label},
                       {"penalty", penalty_to_json(m.penalty)},
                       {"pilot_shapes", m.pilot_shapes}});
  }
  doc["methods"] = std::move(methods);
  doc["censoring_bound"] = report.c0;

  json table = json::array();
  for (const auto& row : report.summary) {
    table.push_back({{"method", row.label},
                     {"replicates", row.replicates},
                     {"pe1", summary_json(row.pe1)},
                     {"pe2", summary_json(row.pe2)},
                     {"l2_loss", summary_json(row.l2_loss)},
                     {"l1_loss", summary_json(row.l1_loss)},
                     {"num_selected", summary_json(row.num_selected)},
                     {"false_negatives", summary_json(row.false_negatives)},
                     {"false_negatives_strong", summary_json(row.false_negatives_strong)}});
  }
  doc["table"] = std::move(table);

  json curves = json::object();
  for (std::size_t m = 0; m < report.labels.size(); ++m) {
    curves[report.labels[m]] = report.summary[m].mean_curve;
  }
  doc["selection_curves"] = {{"model_size", json::array()}, {"mean_correct", std::move(curves)}};
  for (Index s = 1; s <= options.curve_max_size; ++s) doc["selection_curves"]["model_size"].push_back(s);

  json reps = json::array();
  for (const auto& rep : report.replicates) {
    json r = {{"replicate", rep.replicate}, {"seed", rep.seed}, {"ok", rep.ok}};
    if (!rep.ok) {
      r["error"] = rep.error;
    } else {
      r["censoring_rate"] = rep.censoring_rate;
      json per = json::object();
      for (std::size_t m = 0; m < rep.methods.size(); ++m) {
        const auto& mo = rep.methods[m];
        per[report.labels[m]] = {{"lambda", mo.lambda},
                                 {"lambda_index", mo.lambda_index},
                                 {"metrics", metrics_to_json(mo.metrics)},
                                 {"curve", mo.curve}};
      }
      per["oracle"] = {{"metrics", metrics_to_json(rep.oracle)}};
      r["methods"] = std::move(per);
    }
    reps.push_back(std::move(r));
  }
  doc["replicates"] = std::move(reps);
  return doc;
}

json logrank_to_json(const LogRankResult& r) {
  return {{"statistic", r.statistic},
          {"p_value", r.p_value},
          {"group_sizes", r.group_sizes},
          {"observed_events", r.observed_events},
          {"expected_events", r.expected_events}};
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(row) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(row) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(row) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

}  // namespace addhaz
