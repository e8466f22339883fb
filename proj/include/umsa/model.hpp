#pragma once

#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "umsa/paths.hpp"
#include "umsa/rng.hpp"
#include "umsa/tape.hpp"
#include "umsa/trial.hpp"

namespace umsa {

struct ModelConfig {
  std::vector<PathId> active;        // canonical V,T,P,E order
  std::map<PathId, int> input_dims;  // feature dims per active path
  std::map<PathId, int> embed_dims;  // defaults 20/4/1/4
  int encoder_layers = 2;
  int kernel_size = 3;
  int hidden = 16;  // hidden units of score/weight/predictor MLPs
  bool contrastive = true;
  int contrastive_halfwidth = 8;

  static std::map<PathId, int> default_embed_dims();
  PathSpec spec_for(PathId id) const;
  int aggregated_dim() const;  // sum of active input dims
  void validate() const;
};

// Parameter groups of one path. Blocks are empty for functions the
// proxy specialization fixes (identity encode/score, uniform weights).
struct PathFunctions {
  PathSpec spec;
  ParamBlock encoder;    // w0,b0,w1,b1,... one pair per conv layer
  ParamBlock scorer;     // w1,b1,w2,b2
  ParamBlock weigher;    // w1,b1,w2,b2
  ParamBlock predictor;  // w1,b1,w2,b2
};

// Per-trial forward intermediates, copied out of the tape. Immutable
// once produced.
struct ForwardTrace {
  struct PathTrace {
    PathId id{};
    Tensor2D embedding;                  // X-bar, L x embed_dim
    Tensor2D score;                      // S, L x 1
    Tensor2D weight;                     // W, L x 1
    std::optional<Tensor2D> prediction;  // F, L x embed_dim
    Tensor2D weighted_score() const;     // S*W elementwise, L x 1
  };
  std::vector<PathTrace> paths;
  double q = 0.0;

  const PathTrace *find(PathId id) const;
};

struct LossParts {
  double full = 0.0;
  double mse = 0.0;
  double con = 0.0;
};

// The multi-path assessment model: per-path encode/score, aggregated
// temporal weighting, fused video-level score, MSE plus predictive
// contrastive training objective.
class Model {
 public:
  Model(ModelConfig cfg, Rng &rng);

  const ModelConfig &config() const { return cfg_; }
  std::vector<Param *> parameters();
  PathFunctions &path(PathId id);
  const PathFunctions &path(PathId id) const;

  // Graph builders. Tests drive these directly with hand-set params.
  Val encode_path(Tape &t, PathId id, Val x) const;
  Val score_path(Tape &t, PathId id, Val embedding) const;
  Val aggregate(Tape &t, const std::vector<std::pair<PathId, Val>> &features) const;
  Val compute_weights(Tape &t, PathId id, Val aggregated) const;
  Val predict_future(Tape &t, PathId id, Val embedding) const;

  struct Forward {
    Val loss, q, mse, con;
    std::vector<std::pair<PathId, Val>> embeddings, scores, weights;
    std::vector<std::pair<PathId, Val>> predictions;  // learned paths only
  };
  // Builds the full objective for one trial on the given tape.
  Forward build_loss(Tape &t, const Trial &trial) const;

  double predict(const Trial &trial) const;
  LossParts loss_parts(const Trial &trial) const;
  ForwardTrace trace(const Trial &trial) const;

 private:
  ModelConfig cfg_;
  std::deque<PathFunctions> paths_;

  void init_params(Rng &rng);
  Val mlp(Tape &t, const ParamBlock &block, Val x) const;
};

// Fresh model restricted to `active`: the fusion divisor becomes
// |active| and the weight heads see only the active concatenation.
Model ablate(const Model &model, const std::vector<PathId> &active, Rng &rng);

// Eq-style helpers on plain values.
double mse_loss(double q, double y);  // (y - q)^2, y must lie in [0, 1]
double fuse(const std::map<PathId, Tensor2D> &scores,
            const std::map<PathId, Tensor2D> &weights);

// CSV columns: t, path, score, weight, weighted_score. With a non-empty
// trial_id a leading trial_id column is added.
void write_trace_csv(const ForwardTrace &trace, std::ostream &out,
                     const std::string &trial_id = "", bool header = true);

}  // namespace umsa
