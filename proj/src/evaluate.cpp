#include "umsa/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "umsa/errors.hpp"
#include "umsa/metrics.hpp"

namespace umsa {

using nlohmann::json;

nlohmann::json EvalReport::to_json() const {
  json jruns = json::array();
  for (const auto &run : runs) {
    json jfolds = json::array();
    for (const auto &fold : run.folds) {
      json preds = json::array();
      for (const auto &p : fold.predictions)
        preds.push_back(json{{"trial_id", p.trial_id},
                             {"task_id", p.task_id},
                             {"y", p.y},
                             {"q", p.q}});
      jfolds.push_back(json{{"fold", fold.fold},
                            {"srocc", fold.srocc_value},
                            {"degenerate", fold.degenerate},
                            {"predictions", preds}});
    }
    json jtasks = json::array();
    for (const auto &t : run.per_task)
      jtasks.push_back(json{{"task_id", t.task_id},
                            {"srocc", t.srocc_value},
                            {"degenerate", t.degenerate}});
    jruns.push_back(json{{"run", run.run},
                         {"folds", jfolds},
                         {"per_task", jtasks},
                         {"overall", run.overall}});
  }
  return json{{"format", "umsa-eval-report"},
              {"version", 1},
              {"scheme", scheme},
              {"paths", paths},
              {"n_runs", n_runs},
              {"seed", seed},
              {"runs", jruns},
              {"overall_mean", overall_mean},
              {"overall_std", overall_std}};
}

namespace {

FoldResult run_fold(const std::vector<Trial> &trials, const SplitPlan &splits,
                    const ModelConfig &mcfg, const TrainConfig &tcfg, int run, int fold) {
  const std::string tag = "cv.run" + std::to_string(run) + ".fold" + std::to_string(fold);
  Rng init_rng = Rng::derive(tcfg.seed, tag + ".init");
  Rng order_rng = Rng::derive(tcfg.seed, tag + ".order");

  Model model(mcfg, init_rng);
  std::vector<const Trial *> train_set;
  std::vector<const Trial *> test_set;
  for (const auto &t : trials) {
    if (splits.assignment.at(t.trial_id) == fold)
      test_set.push_back(&t);
    else
      train_set.push_back(&t);
  }
  train_model(model, train_set, tcfg, order_rng);

  FoldResult fr;
  fr.fold = fold;
  for (const Trial *t : test_set)
    fr.predictions.push_back({t->trial_id, t->task_id, t->y(), model.predict(*t)});

  if (fr.predictions.size() < 2) {
    fr.degenerate = true;
  } else {
    std::vector<double> ys, qs;
    for (const auto &p : fr.predictions) ys.push_back(p.y), qs.push_back(p.q);
    const SroccResult r = srocc(qs, ys);
    fr.srocc_value = r.rho;
    fr.degenerate = r.degenerate;
  }
  return fr;
}

}  // namespace

EvalReport cross_validate(const std::vector<Trial> &trials, const SplitPlan &splits,
                          const ModelConfig &mcfg, const TrainConfig &tcfg) {
  tcfg.validate();
  mcfg.validate();
  if (trials.empty()) throw DataError("cross_validate: no trials");
  for (const auto &t : trials)
    if (!splits.assignment.count(t.trial_id))
      throw DataError("cross_validate: splits do not cover trial '" + t.trial_id + "'");

  EvalReport report;
  report.scheme = splits.scheme_string();
  report.paths = path_set_string(mcfg.active);
  report.n_runs = tcfg.n_runs;
  report.seed = tcfg.seed;
  report.runs.resize(static_cast<size_t>(tcfg.n_runs));

  struct Job {
    int run, fold;
  };
  std::vector<Job> jobs;
  for (int r = 0; r < tcfg.n_runs; ++r) {
    report.runs[r].run = r;
    report.runs[r].folds.resize(static_cast<size_t>(splits.n_folds));
    for (int f = 0; f < splits.n_folds; ++f) jobs.push_back({r, f});
  }

  const int workers = std::max(1, std::min<int>(tcfg.jobs, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (const Job &j : jobs)
      report.runs[j.run].folds[j.fold] = run_fold(trials, splits, mcfg, tcfg, j.run, j.fold);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          const Job &j = jobs[i];
          report.runs[j.run].folds[j.fold] =
              run_fold(trials, splits, mcfg, tcfg, j.run, j.fold);
        }
      });
    }
    for (auto &th : pool) th.join();
  }

  // Pool predictions per task within each run, then Fisher-z across tasks.
  std::vector<double> overalls;
  for (auto &run : report.runs) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_task;
    for (const auto &fold : run.folds)
      for (const auto &p : fold.predictions) {
        by_task[p.task_id].first.push_back(p.q);
        by_task[p.task_id].second.push_back(p.y);
      }
    std::vector<double> task_rhos;
    for (const auto &[task, qy] : by_task) {
      TaskCorrelation tc;
      tc.task_id = task;
      if (qy.first.size() < 2) {
        tc.degenerate = true;
      } else {
        const SroccResult r = srocc(qy.first, qy.second);
        tc.srocc_value = r.rho;
        tc.degenerate = r.degenerate;
      }
      task_rhos.push_back(tc.srocc_value);
      run.per_task.push_back(std::move(tc));
    }
    run.overall = fisher_z_average(task_rhos);
    overalls.push_back(run.overall);
  }
  report.overall_mean = mean(overalls);
  report.overall_std = stddev(overalls);
  return report;
}

double correlation_analysis(std::span<const ForwardTrace> traces,
                            std::span<const Tensor2D> features, int channel,
                            std::span<const PathId> included) {
  if (traces.size() != features.size())
    throw UsageError("correlation_analysis: traces and features must align");
  if (traces.empty()) throw UsageError("correlation_analysis: no trials");

  auto is_constant = [](const Tensor2D &t) {
    for (size_t i = 1; i < t.v.size(); ++i)
      if (t.v[i] != t.v[0]) return false;
    return true;
  };

  double total = 0.0;
  for (size_t i = 0; i < traces.size(); ++i) {
    const Tensor2D &feat = features[i];
    if (channel < 0 || channel >= feat.cols)
      throw UsageError("correlation_analysis: channel " + std::to_string(channel) +
                       " out of range (" + std::to_string(feat.cols) + " channels)");
    std::vector<double> chan(static_cast<size_t>(feat.rows));
    for (int t = 0; t < feat.rows; ++t) chan[static_cast<size_t>(t)] = feat.at(t, channel);

    double acc = 0.0;
    int used = 0;
    for (PathId id : included) {
      const auto *pt = traces[i].find(id);
      if (!pt) continue;
      const Tensor2D ws = pt->weighted_score();
      // The proxy's weighted score sequence is constant by construction
      // (identity score, uniform weights) and carries no temporal signal.
      if (id == PathId::P && is_constant(ws)) continue;
      const SroccResult r = srocc(std::span<const double>(ws.v), chan);
      acc += std::abs(r.rho);
      ++used;
    }
    if (used > 0) total += acc / static_cast<double>(used);
  }
  return total / static_cast<double>(traces.size());
}

}  // namespace umsa
