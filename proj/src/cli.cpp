#include "addhaz/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "addhaz/crossval.hpp"
#include "addhaz/eval.hpp"
#include "addhaz/report.hpp"
#include "addhaz/survdata.hpp"

namespace addhaz {

using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + value + "' is not a number");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw std::invalid_argument("config key '" + key + "': '" + value + "' is not an integer");
  }
  return static_cast<long long>(v);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

struct PenaltyOptions {
  std::string name = "lasso";
  std::optional<double> a;
  std::optional<double> a_final;
  double enet_alpha = PenaltySpec::kDefaultEnetAlpha;
};

PathMethod make_method(const PenaltyOptions& opt) {
  PathMethod method;
  try {
    const PenaltyKind kind = parse_penalty_kind(opt.name);
    method.label = to_string(kind);
    if (opt.a_final && kind != PenaltyKind::kSICA) {
      throw std::invalid_argument("--a-final only applies to sica");
    }
    switch (kind) {
      case PenaltyKind::kL1: method.penalty = PenaltySpec::lasso(); break;
      case PenaltyKind::kSCAD:
        method.penalty = PenaltySpec::scad(opt.a.value_or(PenaltySpec::kDefaultConcaveA));
        break;
      case PenaltyKind::kMCP:
        method.penalty = PenaltySpec::mcp(opt.a.value_or(PenaltySpec::kDefaultConcaveA));
        break;
      case PenaltyKind::kSICA: {
        const double a = opt.a.value_or(PenaltySpec::kDefaultSicaA);
        if (opt.a_final) {
          if (!(*opt.a_final <= a)) throw std::invalid_argument("--a-final must not exceed --a");
          method.penalty = PenaltySpec::sica(*opt.a_final);
          if (*opt.a_final != a) method.pilot_shapes = {a};
        } else {
          method.penalty = PenaltySpec::sica(a);
        }
        break;
      }
      case PenaltyKind::kElasticNet: method.penalty = PenaltySpec::elastic_net(opt.enet_alpha); break;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return method;
}

struct FitOptions {
  int lambda_count = 100;
  double lambda_ratio = 1e-3;
  std::optional<long long> max_active;
  double tol = 1e-7;
  int max_sweeps = 10000;

  FitConfig config() const {
    FitConfig cfg;
    cfg.grid_size = lambda_count;
    cfg.grid_ratio = lambda_ratio;
    cfg.tol = tol;
    cfg.max_sweeps = max_sweeps;
    if (max_active) cfg.max_active = static_cast<Index>(*max_active);
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

void add_penalty_options(CLI::App* cmd, PenaltyOptions& opt) {
  cmd->add_option("--penalty", opt.name, "lasso | scad | mcp | sica | enet")
      ->check(CLI::IsMember({"lasso", "scad", "mcp", "sica", "enet"}));
  cmd->add_option("--a", opt.a, "shape parameter (SCAD/MCP default 3.7, SICA pilot default 1)");
  cmd->add_option("--a-final", opt.a_final, "final SICA shape; runs a staged path from --a");
  cmd->add_option("--enet-alpha", opt.enet_alpha, "elastic net L1 mixing weight in (0, 1]");
}

void add_fit_options(CLI::App* cmd, FitOptions& opt) {
  cmd->add_option("--lambda-count", opt.lambda_count, "grid size");
  cmd->add_option("--lambda-ratio", opt.lambda_ratio, "lambda_min / lambda_max");
  cmd->add_option("--max-active", opt.max_active, "stop the path beyond this many nonzeros");
  cmd->add_option("--tol", opt.tol, "coordinate-change convergence threshold");
  cmd->add_option("--max-sweeps", opt.max_sweeps, "sweep limit per fit");
}

json method_json(const PathMethod& m) {
  return {{"label", m.label},
          {"penalty", penalty_to_json(m.penalty)},
          {"pilot_shapes", m.pilot_shapes}};
}

json fit_options_json(const FitOptions& f) {
  json j = {{"lambda_count", f.lambda_count},
            {"lambda_ratio", f.lambda_ratio},
            {"tol", f.tol},
            {"max_sweeps", f.max_sweeps}};
  j["max_active"] = f.max_active ? json(*f.max_active) : json(nullptr);
  return j;
}

struct Artifact {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

class Outputs {
 public:
  Outputs(std::string command, std::ostream& out) : command_(std::move(command)), out_(out) {}

  json& options() { return options_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  /// Writes a JSON document to `path`, or to stdout when `path` is empty.
  void write_json(const std::string& path, const json& doc) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty()) {
      out_ << text;
      return;
    }
    {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw ParseError("cannot write " + path);
      f << text;
      if (!f) throw ParseError("write failed for " + path);
    }
    std::ifstream check(path, std::ios::binary);
    const json reread = json::parse(check);
    if (reread != doc) throw std::runtime_error("validation of " + path + " failed");
    record(path);
    if (manifest_path_.empty()) manifest_path_ = path + ".manifest.json";
  }

  void write_csv(const std::string& path, const SurvivalDataset& ds) {
    save_csv(path, ds);
    const SurvivalDataset reread = load_csv(path);
    if (reread.n() != ds.n() || reread.p() != ds.p()) {
      throw std::runtime_error("validation of " + path + " failed");
    }
    record(path);
    if (manifest_path_.empty()) manifest_path_ = path + ".manifest.json";
  }

  void finish(std::chrono::steady_clock::time_point start) {
    if (manifest_path_.empty()) return;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json arts = json::array();
    for (const auto& a : artifacts_) {
      arts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    }
    json manifest = {{"version", kDocumentVersion},
                     {"document", "run_manifest"},
                     {"command", command_},
                     {"options", options_},
                     {"artifacts", std::move(arts)},
                     {"wall_time_seconds", wall}};
    manifest["seed"] = seed_ ? json(*seed_) : json(nullptr);
    std::ofstream f(manifest_path_);
    f << manifest.dump(2) << "\n";
    if (!f) throw ParseError("cannot write " + manifest_path_);
  }

 private:
  void record(const std::string& path) {
    artifacts_.push_back({path, sha256_file(path), std::filesystem::file_size(path)});
  }

  std::string command_;
  std::ostream& out_;
  json options_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<Artifact> artifacts_;
  std::string manifest_path_;
};

SurvivalDataset load_data(const std::string& path) { return load_csv(path); }

std::string feature_name(const SurvivalDataset& ds, Index j) {
  if (!ds.feature_names().empty()) return ds.feature_names()[static_cast<std::size_t>(j)];
  return "Z" + std::to_string(j + 1);
}

int check_folds(int folds, const SurvivalDataset& ds) {
  if (folds < 2 || folds > ds.n()) {
    throw UsageError("--folds must lie in [2, n] (n = " + std::to_string(ds.n()) + ")");
  }
  return folds;
}

}  // namespace

std::pair<SimStudyConfig, StudyOptions> parse_study_config(std::istream& in) {
  const auto kv = parse_key_values(in);
  SimStudyConfig cfg;
  StudyOptions opt;
  int repeats = 3;
  std::vector<std::string> method_names = {"lasso", "scad", "mcp", "sica", "enet"};
  double scad_a = PenaltySpec::kDefaultConcaveA;
  double mcp_a = PenaltySpec::kDefaultConcaveA;
  std::vector<double> sica_shapes = {1.0, 0.1};
  double enet_alpha = PenaltySpec::kDefaultEnetAlpha;
  std::optional<std::vector<double>> beta0;

  for (const auto& [key, value] : kv) {
    if (key == "n") cfg.n = parse_int(key, value);
    else if (key == "p") cfg.p = parse_int(key, value);
    else if (key == "rho") cfg.rho = parse_double(key, value);
    else if (key == "repeats") repeats = static_cast<int>(parse_int(key, value));
    else if (key == "beta0") {
      std::vector<double> b;
      for (const auto& item : split_list(value)) b.push_back(parse_double(key, item));
      beta0 = std::move(b);
    } else if (key == "target_censoring") cfg.target_censoring = parse_double(key, value);
    else if (key == "weak_effect_count") cfg.weak_effect_count = parse_int(key, value);
    else if (key == "weak_effect_eps") cfg.weak_effect_eps = parse_double(key, value);
    else if (key == "replicates") cfg.replicates = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "test_n") cfg.test_n = parse_int(key, value);
    else if (key == "folds") opt.folds = static_cast<int>(parse_int(key, value));
    else if (key == "rule") opt.rule = parse_selection_rule(value);
    else if (key == "methods") method_names = split_list(value);
    else if (key == "scad_a") scad_a = parse_double(key, value);
    else if (key == "mcp_a") mcp_a = parse_double(key, value);
    else if (key == "sica_a") {
      sica_shapes.clear();
      for (const auto& item : split_list(value)) sica_shapes.push_back(parse_double(key, item));
    } else if (key == "enet_alpha") enet_alpha = parse_double(key, value);
    else if (key == "lambda_count") opt.fit.grid_size = static_cast<int>(parse_int(key, value));
    else if (key == "lambda_ratio") opt.fit.grid_ratio = parse_double(key, value);
    else if (key == "max_active") opt.fit.max_active = parse_int(key, value);
    else if (key == "tol") opt.fit.tol = parse_double(key, value);
    else if (key == "max_sweeps") opt.fit.max_sweeps = static_cast<int>(parse_int(key, value));
    else if (key == "curve_max_size") opt.curve_max_size = parse_int(key, value);
    else if (key == "threads") opt.threads = static_cast<int>(parse_int(key, value));
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }

  if (beta0) {
    cfg.beta0 = Eigen::Map<const Eigen::VectorXd>(beta0->data(), static_cast<Index>(beta0->size()));
  } else {
    cfg.beta0 = block_beta0(cfg.p, repeats);
  }
  cfg.validate();
  opt.fit.validate();
  if (opt.folds < 2 || opt.folds > cfg.n) throw std::invalid_argument("folds must lie in [2, n]");
  if (sica_shapes.empty()) throw std::invalid_argument("sica_a needs at least one value");

  for (const auto& name : method_names) {
    PathMethod m;
    const PenaltyKind kind = parse_penalty_kind(name);
    m.label = to_string(kind);
    switch (kind) {
      case PenaltyKind::kL1: m.penalty = PenaltySpec::lasso(); break;
      case PenaltyKind::kSCAD: m.penalty = PenaltySpec::scad(scad_a); break;
      case PenaltyKind::kMCP: m.penalty = PenaltySpec::mcp(mcp_a); break;
      case PenaltyKind::kSICA:
        m.penalty = PenaltySpec::sica(sica_shapes.back());
        m.pilot_shapes.assign(sica_shapes.begin(), sica_shapes.end() - 1);
        break;
      case PenaltyKind::kElasticNet: m.penalty = PenaltySpec::elastic_net(enet_alpha); break;
    }
    opt.methods.push_back(std::move(m));
  }
  return {cfg, opt};
}

std::pair<SimStudyConfig, StudyOptions> load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_study_config(in);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse additive hazards regression via penalized pseudoscore"};
  app.require_subcommand(1);

  std::string data_path;
  std::string test_path;
  std::string out_path;
  std::string test_out_path;
  std::string config_path;
  PenaltyOptions pen;
  FitOptions fit;
  double lambda = 0.0;
  int folds = 10;
  std::string rule_name = "min";
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  int replicate = 0;

  auto* fit_cmd = app.add_subcommand("fit", "coordinate descent at a single lambda");
  fit_cmd->add_option("--data", data_path, "training CSV (time,status,covariates...)")->required();
  add_penalty_options(fit_cmd, pen);
  fit_cmd->add_option("--lambda", lambda, "regularization parameter")->required();
  fit_cmd->add_option("--tol", fit.tol, "coordinate-change convergence threshold");
  fit_cmd->add_option("--max-sweeps", fit.max_sweeps, "sweep limit");
  fit_cmd->add_option("--out", out_path, "output document");

  auto* path_cmd = app.add_subcommand("path", "warm-started solution path");
  path_cmd->add_option("--data", data_path, "training CSV")->required();
  add_penalty_options(path_cmd, pen);
  add_fit_options(path_cmd, fit);
  path_cmd->add_option("--out", out_path, "output document");

  auto* cv_cmd = app.add_subcommand("cv", "M-fold cross-validation and lambda selection");
  cv_cmd->add_option("--data", data_path, "training CSV")->required();
  add_penalty_options(cv_cmd, pen);
  add_fit_options(cv_cmd, fit);
  cv_cmd->add_option("--folds", folds, "number of folds");
  cv_cmd->add_option("--rule", rule_name, "min | one_se")->check(CLI::IsMember({"min", "one_se"}));
  cv_cmd->add_option("--seed", seed, "master seed");
  cv_cmd->add_option("--threads", threads, "worker threads");
  cv_cmd->add_option("--out", out_path, "output document");

  auto* eval_cmd = app.add_subcommand("evaluate", "CV fit on train, risk groups and log-rank on test");
  eval_cmd->add_option("--data", data_path, "training CSV")->required();
  eval_cmd->add_option("--test", test_path, "test CSV")->required();
  add_penalty_options(eval_cmd, pen);
  add_fit_options(eval_cmd, fit);
  eval_cmd->add_option("--folds", folds, "number of folds");
  eval_cmd->add_option("--rule", rule_name, "min | one_se")->check(CLI::IsMember({"min", "one_se"}));
  eval_cmd->add_option("--seed", seed, "master seed");
  eval_cmd->add_option("--threads", threads, "worker threads");
  eval_cmd->add_option("--out", out_path, "output document");

  auto* sim_cmd = app.add_subcommand("simulate", "replicated simulation study");
  sim_cmd->add_option("--config", config_path, "study config (key = value lines)")->required();
  sim_cmd->add_option("--seed", seed_override, "override the config's master seed");
  sim_cmd->add_option("--threads", threads, "worker threads");
  sim_cmd->add_option("--out", out_path, "output document");

  auto* gen_cmd = app.add_subcommand("generate", "write one simulated train/test pair as CSV");
  gen_cmd->add_option("--config", config_path, "study config")->required();
  gen_cmd->add_option("--seed", seed_override, "override the config's master seed");
  gen_cmd->add_option("--replicate", replicate, "replicate index");
  gen_cmd->add_option("--out", out_path, "training CSV")->required();
  gen_cmd->add_option("--test-out", test_out_path, "test CSV");

  std::vector<const char*> argv;
  argv.push_back("addhaz");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (*fit_cmd) {
      Outputs outputs("fit", out);
      const PathMethod method = make_method(pen);
      if (method.penalty.kind() == PenaltyKind::kSICA && !method.pilot_shapes.empty()) {
        throw UsageError("fit takes a single SICA shape; use path for staged fits");
      }
      const FitConfig cfg = fit.config();
      if (!(lambda >= 0.0)) throw UsageError("--lambda must be nonnegative");
      const SurvivalDataset ds = load_data(data_path);
      const PseudoscoreSystem sys = build_system(ds);
      const FitResult res =
          coordinate_descent(sys, method.penalty, lambda, Eigen::VectorXd::Zero(sys.p()), cfg);
      std::vector<Index> active;
      for (Index j = 0; j < res.beta.size(); ++j) {
        if (res.beta(j) != 0.0) active.push_back(j);
      }
      json doc = {{"version", kDocumentVersion}, {"document", "fit"}};
      doc["penalty"] = penalty_to_json(method.penalty);
      doc["lambda"] = lambda;
      doc["lambda_max"] = lambda_max(sys, method.penalty);
      doc["coefficients"] = sparse_to_json(res.beta);
      doc["objective"] = res.diagnostics.objective;
      doc["sweeps"] = res.diagnostics.sweeps;
      doc["converged"] = res.diagnostics.converged;
      doc["coordinatewise_convex"] = res.diagnostics.coordinatewise_convex;
      doc["frozen_coordinates"] = res.diagnostics.frozen;
      doc["convexity_warning"] =
          !active.empty() && !restricted_convexity_check(sys, method.penalty, lambda, active);
      outputs.options() = {{"data", data_path}, {"method", method_json(method)}, {"lambda", lambda},
                           {"tol", fit.tol}, {"max_sweeps", fit.max_sweeps}};
      outputs.write_json(out_path, doc);
      outputs.finish(start);
    } else if (*path_cmd) {
      Outputs outputs("path", out);
      const PathMethod method = make_method(pen);
      const FitConfig cfg = fit.config();
      const SurvivalDataset ds = load_data(data_path);
      const PseudoscoreSystem sys = build_system(ds);
      const auto grid = lambda_grid(method.top_lambda(sys), cfg);
      const SolutionPath path = method.fit(sys, cfg, grid);
      outputs.options() = {{"data", data_path}, {"method", method_json(method)},
                           {"fit", fit_options_json(fit)}};
      outputs.write_json(out_path, path_to_json(path));
      outputs.finish(start);
    } else if (*cv_cmd) {
      Outputs outputs("cv", out);
      const PathMethod method = make_method(pen);
      const FitConfig cfg = fit.config();
      const SelectionRule rule = parse_selection_rule(rule_name);
      const SurvivalDataset ds = load_data(data_path);
      check_folds(folds, ds);
      const CvResult cv = kfold_cv(ds, method, cfg, folds, seed, threads);
      outputs.set_seed(seed);
      outputs.options() = {{"data", data_path}, {"method", method_json(method)},
                           {"fit", fit_options_json(fit)}, {"folds", folds},
                           {"rule", rule_name}, {"seed", seed}, {"threads", threads}};
      json doc = cv_to_json(cv, rule);
      doc["method"] = method_json(method);
      doc["seed"] = seed;
      outputs.write_json(out_path, doc);
      outputs.finish(start);
    } else if (*eval_cmd) {
      Outputs outputs("evaluate", out);
      const PathMethod method = make_method(pen);
      const FitConfig cfg = fit.config();
      const SelectionRule rule = parse_selection_rule(rule_name);
      const SurvivalDataset train = load_data(data_path);
      const SurvivalDataset test = load_data(test_path);
      if (test.p() != train.p()) {
        throw ValidationError("dimension mismatch: training data has p = " +
                              std::to_string(train.p()) + ", test data has p = " +
                              std::to_string(test.p()));
      }
      check_folds(folds, train);
      const CvResult cv = kfold_cv(train, method, cfg, folds, seed, threads);
      const std::size_t chosen = select_index(cv, rule);
      const Eigen::VectorXd& beta = cv.full_path.betas.at(chosen);

      json doc = {{"version", kDocumentVersion}, {"document", "evaluation"}};
      doc["method"] = method_json(method);
      doc["seed"] = seed;
      doc["rule"] = rule_name;
      doc["selected_lambda"] = cv.lambdas[chosen];
      doc["selected_index"] = chosen;
      json features = json::array();
      for (Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) {
          features.push_back({{"index", j}, {"name", feature_name(train, j)}, {"coefficient", beta(j)}});
        }
      }
      doc["num_selected"] = features.size();
      doc["null_model"] = features.empty();
      doc["selected_features"] = std::move(features);
      doc["prediction_error"] = loss(build_system(test), beta);
      const auto groups = risk_split(test, beta);
      doc["risk_groups"] = groups;
      try {
        doc["logrank"] = logrank_to_json(logrank_test(test.times(), test.status(), groups));
      } catch (const std::exception& e) {
        doc["logrank"] = nullptr;
        doc["logrank_error"] = e.what();
      }
      doc["cv"] = {{"lambdas", cv.lambdas}, {"cv_scores", cv.cv_scores},
                   {"cv_se", cv.cv_se}, {"best_index", cv.best_index}};
      outputs.set_seed(seed);
      outputs.options() = {{"data", data_path}, {"test", test_path}, {"method", method_json(method)},
                           {"fit", fit_options_json(fit)}, {"folds", folds}, {"rule", rule_name},
                           {"seed", seed}, {"threads", threads}};
      outputs.write_json(out_path, doc);
      outputs.finish(start);
    } else if (*sim_cmd) {
      Outputs outputs("simulate", out);
      auto [cfg, opt] = load_study_config(config_path);
      if (seed_override) cfg.seed = *seed_override;
      if (sim_cmd->count("--threads") > 0) opt.threads = threads;
      const StudyReport report = run_study(cfg, opt);
      outputs.set_seed(cfg.seed);
      outputs.options() = {{"config", config_path}, {"seed", cfg.seed}, {"threads", opt.threads}};
      outputs.write_json(out_path, study_to_json(report, opt));
      outputs.finish(start);
    } else if (*gen_cmd) {
      Outputs outputs("generate", out);
      auto [cfg, opt] = load_study_config(config_path);
      if (seed_override) cfg.seed = *seed_override;
      if (replicate < 0) throw UsageError("--replicate must be nonnegative");
      const double c0 = calibrate_censoring(cfg);
      const std::uint64_t rep_seed =
          derive_seed(cfg.seed, Stream::kDataGen, static_cast<std::uint64_t>(replicate));
      const SimDraw draw = gen_dataset(cfg, c0, rep_seed);
      outputs.write_csv(out_path, draw.data);
      if (!test_out_path.empty()) {
        Rng test_rng(derive_seed(rep_seed, Stream::kTestGen));
        outputs.write_csv(test_out_path, draw_subjects(draw.beta0, cfg.rho, cfg.test_n, c0, test_rng));
      }
      outputs.set_seed(cfg.seed);
      outputs.options() = {{"config", config_path}, {"seed", cfg.seed}, {"replicate", replicate},
                           {"censoring_bound", c0}};
      outputs.finish(start);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace addhaz
