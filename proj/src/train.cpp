#include "umsa/train.hpp"

#include <numeric>

#include "umsa/errors.hpp"

namespace umsa {

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (accumulation < 1) throw ConfigError("accumulation must be at least 1");
  if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (adam.lr <= 0.0) throw ConfigError("learning rate must be positive");
}

std::vector<EpochStats> train_model(Model &model, std::span<const Trial *const> trials,
                                    const TrainConfig &cfg, Rng &rng) {
  cfg.validate();
  std::vector<EpochStats> log;
  if (trials.empty()) return log;

  Adam opt(cfg.adam);
  std::vector<Param *> params = model.parameters();
  std::vector<size_t> order(trials.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    EpochStats stats;
    size_t done = 0;
    while (done < order.size()) {
      const size_t batch = std::min<size_t>(cfg.accumulation, order.size() - done);
      for (size_t i = 0; i < batch; ++i) {
        Tape tape;
        Model::Forward fw = model.build_loss(tape, *trials[order[done + i]]);
        tape.backward(fw.loss);
        stats.mse += tape.value(fw.mse).v[0];
        stats.con += tape.value(fw.con).v[0];
        stats.full += tape.value(fw.loss).v[0];
      }
      if (!params.empty()) opt.step(params, 1.0 / static_cast<double>(batch));
      done += batch;
    }
    const double n = static_cast<double>(order.size());
    stats.mse /= n;
    stats.con /= n;
    stats.full /= n;
    log.push_back(stats);
  }
  return log;
}

}  // namespace umsa
