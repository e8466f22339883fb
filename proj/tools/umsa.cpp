#include <iostream>

#include <CLI11.hpp>

#include "umsa/commands.hpp"
#include "umsa/errors.hpp"

int main(int argc, char **argv) {
  CLI::App app{"umsa - multi-path temporal skill assessment"};
  app.require_subcommand(1);

  umsa::GenerateOpts gen;
  auto *cgen = app.add_subcommand("generate", "generate a synthetic dataset");
  cgen->add_option("--config", gen.config, "run configuration file")->required();
  cgen->add_option("--out", gen.out, "output directory")->required();
  cgen->add_flag("--force", gen.force, "overwrite a non-empty output directory");

  umsa::SplitsOpts spl;
  auto *cspl = app.add_subcommand("splits", "assign trials to cross-validation folds");
  cspl->add_option("--manifest", spl.manifest, "manifest.json path")->required();
  cspl->add_option("--scheme", spl.scheme, "kfold:<k> or louo")->required();
  uint64_t seed_arg = 0;
  auto *seed_opt = cspl->add_option("--seed", seed_arg, "shuffle seed (kfold)");
  cspl->add_option("--out", spl.out, "output splits.json path")->required();

  umsa::TrainOpts trn;
  auto *ctrn = app.add_subcommand("train", "train a model and write a checkpoint");
  ctrn->add_option("--config", trn.config, "run configuration file")->required();
  ctrn->add_option("--manifest", trn.manifest, "manifest.json path")->required();
  std::string trn_splits;
  auto *trn_splits_opt = ctrn->add_option("--splits", trn_splits, "splits.json path");
  ctrn->add_option("--fold", trn.fold, "held-out fold when --splits is given");
  ctrn->add_option("--out", trn.out, "output run directory")->required();
  std::string trn_paths;
  auto *trn_paths_opt = ctrn->add_option("--paths", trn_paths, "override active paths, e.g. VTP");

  umsa::EvalOpts evl;
  auto *cevl = app.add_subcommand("eval", "cross-validated evaluation");
  cevl->add_option("--config", evl.config, "run configuration file")->required();
  cevl->add_option("--manifest", evl.manifest, "manifest.json path")->required();
  cevl->add_option("--splits", evl.splits, "splits.json path")->required();
  cevl->add_option("--out", evl.out, "output run directory")->required();
  std::string evl_paths;
  auto *evl_paths_opt = cevl->add_option("--paths", evl_paths, "override active paths");

  umsa::AnalyzeOpts anl;
  auto *canl = app.add_subcommand("analyze", "correlate weighted scores with input channels");
  canl->add_option("--checkpoint", anl.checkpoint, "checkpoint.json path")->required();
  canl->add_option("--manifest", anl.manifest, "manifest.json path")->required();
  std::string feature_path = "E";
  canl->add_option("--feature-path", feature_path, "path whose channels to analyze (V/T/P/E)");
  canl->add_option("--channels", anl.channels, "channel indices")->delimiter(',');
  std::string anl_paths;
  auto *anl_paths_opt = canl->add_option("--paths", anl_paths, "included score paths");
  canl->add_option("--out", anl.out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cgen) return umsa::cmd_generate(gen);
    if (*cspl) {
      if (*seed_opt) spl.seed = seed_arg;
      return umsa::cmd_splits(spl);
    }
    if (*ctrn) {
      if (*trn_splits_opt) trn.splits = trn_splits;
      if (*trn_paths_opt) trn.paths = trn_paths;
      return umsa::cmd_train(trn);
    }
    if (*cevl) {
      if (*evl_paths_opt) evl.paths = evl_paths;
      return umsa::cmd_eval(evl);
    }
    if (*canl) {
      if (feature_path.size() != 1)
        throw umsa::ConfigError("--feature-path expects a single letter");
      anl.feature_path = feature_path[0];
      if (*anl_paths_opt) anl.paths = anl_paths;
      return umsa::cmd_analyze(anl);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
