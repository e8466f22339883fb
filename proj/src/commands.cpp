#include "umsa/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "umsa/checkpoint.hpp"
#include "umsa/config.hpp"
#include "umsa/errors.hpp"
#include "umsa/evaluate.hpp"
#include "umsa/metrics.hpp"
#include "umsa/splits.hpp"
#include "umsa/synth.hpp"

namespace umsa {

namespace {

using nlohmann::json;

constexpr const char *kVersion = "0.1.0";

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_run_record(const std::filesystem::path &dir, const std::string &command,
                      const std::string &config_hash, uint64_t seed) {
  json j{{"format", "umsa-run"},
         {"version", kVersion},
         {"command", command},
         {"config_hash", config_hash},
         {"seed", seed},
         {"timestamp", timestamp_utc()}};
  std::ofstream out(dir / "run.json", std::ios::trunc);
  if (!out) throw DataError("cannot write run record in '" + dir.string() + "'");
  out << j.dump(2) << '\n';
}

void ensure_out_dir(const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
}

// Fails fast when configured path dims disagree with the data on disk.
void check_dims(const ModelConfig &mcfg, const std::vector<Trial> &trials) {
  if (trials.empty()) return;
  for (PathId id : mcfg.active) {
    auto it = trials.front().features.find(id);
    if (it == trials.front().features.end())
      throw ConfigError(std::string("manifest trials lack features for path ") +
                        path_letter(id));
    if (it->second.cols != mcfg.input_dims.at(id))
      throw ConfigError(std::string("path ") + path_letter(id) + " dimension mismatch: config says " +
                        std::to_string(mcfg.input_dims.at(id)) + ", data has " +
                        std::to_string(it->second.cols));
  }
}

void write_epoch_log(const std::vector<EpochStats> &log, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write training log '" + path.string() + "'");
  out << "epoch,mse,con,full\n";
  char buf[128];
  for (size_t i = 0; i < log.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, log[i].mse, log[i].con,
                  log[i].full);
    out << buf;
  }
}

}  // namespace

int cmd_generate(const GenerateOpts &opts) {
  const RunConfig cfg = RunConfig::load(opts.config);
  if (std::filesystem::exists(opts.out) && !std::filesystem::is_empty(opts.out) &&
      !opts.force)
    throw ConfigError("output directory '" + opts.out.string() +
                      "' is not empty (use --force to overwrite)");
  ensure_out_dir(opts.out);

  const auto trials = synth_generate(cfg.synth_config());
  write_synth_trials(trials, opts.out);
  write_run_record(opts.out, "generate", cfg.hash(), cfg.seed);

  if (trials.empty())
    std::cerr << "warning: n_trials = 0, wrote an empty manifest\n";

  double mean_len = 0.0;
  std::vector<int> hist(10, 0);
  for (const auto &st : trials) {
    mean_len += st.trial.length();
    const double y = normalize_grs(st.trial.grs, st.trial.grs_min, st.trial.grs_max);
    hist[std::min(9, static_cast<int>(y * 10.0))]++;
  }
  if (!trials.empty()) mean_len /= static_cast<double>(trials.size());

  std::cout << "generated " << trials.size() << " trials under " << opts.out.string()
            << "\n  mean length: " << mean_len << " steps\n  grs histogram:";
  for (int hcount : hist) std::cout << ' ' << hcount;
  std::cout << '\n';
  return 0;
}

int cmd_splits(const SplitsOpts &opts) {
  const Manifest m = read_manifest(opts.manifest);
  const auto [scheme, k] = parse_scheme(opts.scheme);
  const uint64_t seed = opts.seed.value_or(0);
  const SplitPlan plan = make_splits(m, scheme, k, seed);
  write_splits(plan, opts.out);

  std::vector<int> sizes(static_cast<size_t>(plan.n_folds), 0);
  for (const auto &[id, fold] : plan.assignment) sizes[static_cast<size_t>(fold)]++;
  std::cout << "wrote " << plan.scheme_string() << " splits for " << m.trials.size()
            << " trials to " << opts.out.string() << "\n  fold sizes:";
  for (int s : sizes) std::cout << ' ' << s;
  std::cout << '\n';
  return 0;
}

int cmd_train(const TrainOpts &opts) {
  const RunConfig cfg = RunConfig::load(opts.config);
  const ModelConfig mcfg =
      opts.paths ? cfg.model_config(*opts.paths) : cfg.model_config();
  const TrainConfig tcfg = cfg.train_config();

  const Manifest m = read_manifest(opts.manifest);
  const std::vector<Trial> trials = load_trials(m, cfg.source_fps, cfg.target_fps);
  if (trials.empty()) throw DataError("manifest has no trials to train on");
  check_dims(mcfg, trials);

  std::vector<const Trial *> train_set;
  if (opts.splits) {
    const SplitPlan plan = read_splits(*opts.splits);
    if (opts.fold < 0 || opts.fold >= plan.n_folds)
      throw ConfigError("fold " + std::to_string(opts.fold) + " outside [0, " +
                        std::to_string(plan.n_folds) + ")");
    for (const auto &t : trials) {
      auto it = plan.assignment.find(t.trial_id);
      if (it == plan.assignment.end())
        throw DataError("splits do not cover trial '" + t.trial_id + "'");
      if (it->second != opts.fold) train_set.push_back(&t);
    }
  } else {
    for (const auto &t : trials) train_set.push_back(&t);
  }

  ensure_out_dir(opts.out);
  Rng init_rng = Rng::derive(cfg.seed, "train.init");
  Rng order_rng = Rng::derive(cfg.seed, "train.order");
  Model model(mcfg, init_rng);
  const auto log = train_model(model, train_set, tcfg, order_rng);

  write_epoch_log(log, opts.out / "training_log.csv");
  save_checkpoint(model, cfg.hash(), opts.out / "checkpoint.json");
  write_run_record(opts.out, "train", cfg.hash(), cfg.seed);

  std::cout << "trained " << path_set_string(mcfg.active) << " model on "
            << train_set.size() << " trials for " << log.size() << " epochs\n";
  if (!log.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "  first epoch: full=%.6f mse=%.6f con=%.6f\n"
                  "  last epoch:  full=%.6f mse=%.6f con=%.6f\n",
                  log.front().full, log.front().mse, log.front().con, log.back().full,
                  log.back().mse, log.back().con);
    std::cout << buf;
  }
  std::cout << "checkpoint: " << (opts.out / "checkpoint.json").string() << '\n';
  return 0;
}

int cmd_eval(const EvalOpts &opts) {
  const RunConfig cfg = RunConfig::load(opts.config);
  const ModelConfig mcfg =
      opts.paths ? cfg.model_config(*opts.paths) : cfg.model_config();
  const TrainConfig tcfg = cfg.train_config();

  const Manifest m = read_manifest(opts.manifest);
  const std::vector<Trial> trials = load_trials(m, cfg.source_fps, cfg.target_fps);
  check_dims(mcfg, trials);
  const SplitPlan plan = read_splits(opts.splits);

  const EvalReport report = cross_validate(trials, plan, mcfg, tcfg);

  ensure_out_dir(opts.out);
  {
    std::ofstream out(opts.out / "report.json", std::ios::trunc);
    if (!out) throw DataError("cannot write eval report");
    out << report.to_json().dump(2) << '\n';
  }
  char name[64], buf[160];
  for (const auto &run : report.runs) {
    for (const auto &fold : run.folds) {
      std::snprintf(name, sizeof name, "predictions_run%d_fold%d.csv", run.run, fold.fold);
      std::ofstream out(opts.out / name, std::ios::trunc);
      out << "trial_id,task_id,y,q\n";
      for (const auto &p : fold.predictions) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g\n", p.trial_id.c_str(),
                      p.task_id.c_str(), p.y, p.q);
        out << buf;
      }
    }
  }
  write_run_record(opts.out, "eval", cfg.hash(), cfg.seed);

  char buf2[160];
  std::snprintf(buf2, sizeof buf2, "%s %s: overall srocc %.4f +- %.4f over %d runs\n",
                report.scheme.c_str(), report.paths.c_str(), report.overall_mean,
                report.overall_std, report.n_runs);
  std::cout << buf2;
  return 0;
}

int cmd_analyze(const AnalyzeOpts &opts) {
  std::string config_hash;
  Model model = load_checkpoint(opts.checkpoint, &config_hash);
  const Manifest m = read_manifest(opts.manifest);
  const std::vector<Trial> trials = load_trials(m);
  if (trials.empty()) throw DataError("manifest has no trials to analyze");
  try {
    check_dims(model.config(), trials);
  } catch (const ConfigError &e) {
    throw ConfigError(std::string("checkpoint does not match manifest data: ") + e.what());
  }

  const PathId feature_path = path_from_letter(opts.feature_path);
  std::vector<PathId> included =
      opts.paths ? parse_path_set(*opts.paths) : model.config().active;

  std::vector<ForwardTrace> traces;
  std::vector<Tensor2D> features;
  for (const auto &t : trials) {
    auto it = t.features.find(feature_path);
    if (it == t.features.end())
      throw DataError("trial '" + t.trial_id + "' lacks features for path " +
                      std::string(1, path_letter(feature_path)));
    traces.push_back(model.trace(t));
    features.push_back(it->second);
  }

  ensure_out_dir(opts.out);
  {
    std::ofstream out(opts.out / "correlations.csv", std::ios::trunc);
    out << "channel,R\n";
    char buf[64];
    for (int c : opts.channels) {
      const double r = correlation_analysis(traces, features, c, included);
      std::snprintf(buf, sizeof buf, "%d,%.9g\n", c, r);
      out << buf;
    }
  }
  {
    std::ofstream out(opts.out / "traces.csv", std::ios::trunc);
    out << "trial_id,t,path,score,weight,weighted_score\n";
    for (size_t i = 0; i < traces.size(); ++i)
      write_trace_csv(traces[i], out, trials[i].trial_id, /*header=*/false);
  }
  write_run_record(opts.out, "analyze", config_hash, 0);

  std::cout << "analyzed " << trials.size() << " trials; wrote "
            << (opts.out / "correlations.csv").string() << " and traces.csv\n";
  return 0;
}

}  // namespace umsa
