#include "umsa/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "umsa/errors.hpp"

namespace umsa {

std::map<PathId, int> ModelConfig::default_embed_dims() {
  return {{PathId::V, 20}, {PathId::T, 4}, {PathId::P, 1}, {PathId::E, 4}};
}

PathSpec ModelConfig::spec_for(PathId id) const {
  const int in = input_dims.at(id);
  if (id == PathId::P) return PathSpec::proxy(in);
  return PathSpec::learned(id, in, embed_dims.at(id), encoder_layers, kernel_size);
}

int ModelConfig::aggregated_dim() const {
  int total = 0;
  for (PathId id : active) total += input_dims.at(id);
  return total;
}

void ModelConfig::validate() const {
  if (active.empty()) throw ConfigError("model needs at least one active path");
  for (size_t i = 1; i < active.size(); ++i)
    if (static_cast<int>(active[i]) <= static_cast<int>(active[i - 1]))
      throw ConfigError("active paths must be unique and in V,T,P,E order");
  for (PathId id : active) {
    if (!input_dims.count(id))
      throw ConfigError(std::string("missing input dim for path ") + path_letter(id));
    if (id != PathId::P && !embed_dims.count(id))
      throw ConfigError(std::string("missing embed dim for path ") + path_letter(id));
    spec_for(id).validate();
  }
  if (hidden < 1) throw ConfigError("mlp hidden size must be positive");
  if (contrastive && contrastive_halfwidth < 1)
    throw ConfigError("contrastive halfwidth must be at least 1");
  if (std::find(active.begin(), active.end(), PathId::P) != active.end() &&
      input_dims.at(PathId::P) != 1)
    throw ConfigError("proxy path expects a single channel");
}

namespace {

Tensor2D uniform_init(int rows, int cols, int fan_in, Rng &rng) {
  const double a = std::sqrt(1.0 / static_cast<double>(fan_in));
  Tensor2D t(rows, cols);
  for (double &e : t.v) e = rng.uniform(-a, a);
  return t;
}

void init_mlp(ParamBlock &block, int in, int hidden, int out, Rng &rng) {
  block.add("w1", uniform_init(in, hidden, in, rng));
  block.add("b1", uniform_init(1, hidden, in, rng));
  block.add("w2", uniform_init(hidden, out, hidden, rng));
  block.add("b2", uniform_init(1, out, hidden, rng));
}

}  // namespace

Model::Model(ModelConfig cfg, Rng &rng) : cfg_(std::move(cfg)) {
  if (cfg_.embed_dims.empty()) cfg_.embed_dims = ModelConfig::default_embed_dims();
  cfg_.validate();
  init_params(rng);
}

void Model::init_params(Rng &rng) {
  const int agg = cfg_.aggregated_dim();
  for (PathId id : cfg_.active) {
    PathFunctions pf;
    pf.spec = cfg_.spec_for(id);
    const std::string prefix(1, path_letter(id));
    pf.encoder.name = prefix + ".encoder";
    pf.scorer.name = prefix + ".scorer";
    pf.weigher.name = prefix + ".weigher";
    pf.predictor.name = prefix + ".predictor";
    if (pf.spec.learned_encoder) {
      int in = pf.spec.input_dim;
      for (int layer = 0; layer < pf.spec.encoder_layers; ++layer) {
        const int fan_in = pf.spec.kernel_size * in;
        pf.encoder.add("w" + std::to_string(layer),
                       uniform_init(pf.spec.kernel_size * in, pf.spec.embed_dim, fan_in, rng));
        pf.encoder.add("b" + std::to_string(layer),
                       uniform_init(1, pf.spec.embed_dim, fan_in, rng));
        in = pf.spec.embed_dim;
      }
    }
    if (pf.spec.learned_scorer)
      init_mlp(pf.scorer, pf.spec.embed_dim, cfg_.hidden, 1, rng);
    if (pf.spec.learned_weigher) init_mlp(pf.weigher, agg, cfg_.hidden, 1, rng);
    if (pf.spec.has_predictor && cfg_.contrastive)
      init_mlp(pf.predictor, pf.spec.embed_dim, cfg_.hidden, pf.spec.embed_dim, rng);
    paths_.push_back(std::move(pf));
  }
}

std::vector<Param *> Model::parameters() {
  std::vector<Param *> out;
  for (auto &pf : paths_)
    for (ParamBlock *block : {&pf.encoder, &pf.scorer, &pf.weigher, &pf.predictor})
      for (auto &p : block->entries) out.push_back(&p);
  return out;
}

PathFunctions &Model::path(PathId id) {
  for (auto &pf : paths_)
    if (pf.spec.id == id) return pf;
  throw UsageError(std::string("path ") + path_letter(id) + " is not active");
}

const PathFunctions &Model::path(PathId id) const {
  return const_cast<Model *>(this)->path(id);
}

Val Model::mlp(Tape &t, const ParamBlock &block, Val x) const {
  auto *b = const_cast<ParamBlock *>(&block);
  Val h = t.affine(x, t.param(*b->find("w1")), t.param(*b->find("b1")));
  h = t.relu(h);
  return t.affine(h, t.param(*b->find("w2")), t.param(*b->find("b2")));
}

Val Model::encode_path(Tape &t, PathId id, Val x) const {
  const PathFunctions &pf = path(id);
  if (t.value(x).cols != pf.spec.input_dim)
    throw ShapeError(std::string("encode: path ") + path_letter(id) +
                     " expects " + std::to_string(pf.spec.input_dim) + " channels");
  if (!pf.spec.learned_encoder) return x;  // proxy: identity
  auto *enc = const_cast<ParamBlock *>(&pf.encoder);
  Val h = x;
  int dilation = 1;
  for (int layer = 0; layer < pf.spec.encoder_layers; ++layer) {
    if (layer > 0) h = t.relu(h);
    Val w = t.param(*enc->find("w" + std::to_string(layer)));
    Val b = t.param(*enc->find("b" + std::to_string(layer)));
    h = t.temporal_conv(h, w, b, dilation);
    dilation *= 2;
  }
  return h;
}

Val Model::score_path(Tape &t, PathId id, Val embedding) const {
  const PathFunctions &pf = path(id);
  if (!pf.spec.learned_scorer) {
    if (t.value(embedding).cols != 1)
      throw ConfigError("proxy scorer needs a single-channel embedding");
    return embedding;  // the proxy channel already is a skill signal
  }
  return t.sigmoid(mlp(t, pf.scorer, embedding));
}

Val Model::aggregate(Tape &t,
                     const std::vector<std::pair<PathId, Val>> &features) const {
  if (features.empty()) throw ConfigError("aggregate: no active paths");
  std::vector<Val> vals;
  vals.reserve(features.size());
  for (size_t i = 1; i < features.size(); ++i)
    if (static_cast<int>(features[i].first) <= static_cast<int>(features[i - 1].first))
      throw UsageError("aggregate: features must be in canonical path order");
  for (const auto &[id, v] : features) vals.push_back(v);
  return t.concat_cols(vals);
}

Val Model::compute_weights(Tape &t, PathId id, Val aggregated) const {
  const PathFunctions &pf = path(id);
  const int rows = t.value(aggregated).rows;
  if (!pf.spec.learned_weigher)
    return t.leaf(Tensor2D::full(rows, 1, 1.0 / static_cast<double>(rows)));
  return t.softmax_time(mlp(t, pf.weigher, aggregated));
}

Val Model::predict_future(Tape &t, PathId id, Val embedding) const {
  const PathFunctions &pf = path(id);
  if (!pf.spec.has_predictor)
    throw ConfigError(std::string("path ") + path_letter(id) + " has no predictor");
  if (!cfg_.contrastive)
    throw ConfigError("predictor disabled by configuration");
  return t.shift_down(mlp(t, pf.predictor, embedding));
}

Model::Forward Model::build_loss(Tape &t, const Trial &trial) const {
  Forward fw;
  const int len = trial.length();
  const double y = trial.y();

  std::vector<std::pair<PathId, Val>> inputs;
  for (const auto &pf : paths_) {
    auto it = trial.features.find(pf.spec.id);
    if (it == trial.features.end())
      throw DataError("trial '" + trial.trial_id + "' lacks features for path " +
                      std::string(1, path_letter(pf.spec.id)));
    inputs.emplace_back(pf.spec.id, t.leaf(it->second));
  }

  Val agg = aggregate(t, inputs);

  Val q{};
  bool first = true;
  for (size_t i = 0; i < paths_.size(); ++i) {
    const PathId id = paths_[i].spec.id;
    Val xbar = encode_path(t, id, inputs[i].second);
    Val s = score_path(t, id, xbar);
    Val w = compute_weights(t, id, agg);
    fw.embeddings.emplace_back(id, xbar);
    fw.scores.emplace_back(id, s);
    fw.weights.emplace_back(id, w);
    Val contrib = t.dot_all(s, w);
    q = first ? contrib : t.add(q, contrib);
    first = false;
  }
  q = t.scale(q, 1.0 / static_cast<double>(paths_.size()));
  fw.q = q;
  fw.mse = t.squared_error(q, y);

  Val con = t.leaf(Tensor2D::zeros(1, 1));
  for (size_t i = 0; i < paths_.size(); ++i) {
    const auto &pf = paths_[i];
    if (!pf.spec.has_predictor || !cfg_.contrastive || len < 2) continue;
    Val pred = predict_future(t, pf.spec.id, fw.embeddings[i].second);
    fw.predictions.emplace_back(pf.spec.id, pred);
    Val c = t.contrastive(pred, fw.embeddings[i].second, cfg_.contrastive_halfwidth);
    con = t.add(con, t.scale(c, 1.0 / static_cast<double>(len - 1)));
  }
  fw.con = con;
  fw.loss = t.add(fw.mse, con);
  return fw;
}

double Model::predict(const Trial &trial) const {
  Tape t;
  Forward fw = build_loss(t, trial);
  return t.value(fw.q).v[0];
}

LossParts Model::loss_parts(const Trial &trial) const {
  Tape t;
  Forward fw = build_loss(t, trial);
  return {t.value(fw.loss).v[0], t.value(fw.mse).v[0], t.value(fw.con).v[0]};
}

ForwardTrace Model::trace(const Trial &trial) const {
  Tape t;
  Forward fw = build_loss(t, trial);
  ForwardTrace tr;
  tr.q = t.value(fw.q).v[0];
  for (size_t i = 0; i < fw.embeddings.size(); ++i) {
    ForwardTrace::PathTrace pt;
    pt.id = fw.embeddings[i].first;
    pt.embedding = t.value(fw.embeddings[i].second);
    pt.score = t.value(fw.scores[i].second);
    pt.weight = t.value(fw.weights[i].second);
    for (const auto &[id, pv] : fw.predictions)
      if (id == pt.id) pt.prediction = t.value(pv);
    tr.paths.push_back(std::move(pt));
  }
  return tr;
}

Tensor2D ForwardTrace::PathTrace::weighted_score() const {
  Tensor2D out(score.rows, 1);
  for (int i = 0; i < score.rows; ++i) out.v[i] = score.v[i] * weight.v[i];
  return out;
}

const ForwardTrace::PathTrace *ForwardTrace::find(PathId id) const {
  for (const auto &p : paths)
    if (p.id == id) return &p;
  return nullptr;
}

Model ablate(const Model &model, const std::vector<PathId> &active, Rng &rng) {
  if (active.empty()) throw ConfigError("ablate: active path set must be non-empty");
  ModelConfig cfg = model.config();
  for (PathId id : active)
    if (std::find(cfg.active.begin(), cfg.active.end(), id) == cfg.active.end())
      throw ConfigError(std::string("ablate: path ") + path_letter(id) +
                        " is not part of the model");
  cfg.active = active;
  return Model(cfg, rng);
}

double mse_loss(double q, double y) {
  if (y < 0.0 || y > 1.0)
    throw DataError("mse target " + std::to_string(y) + " outside [0, 1]; GRS not normalized");
  return (y - q) * (y - q);
}

double fuse(const std::map<PathId, Tensor2D> &scores,
            const std::map<PathId, Tensor2D> &weights) {
  if (scores.empty()) throw ConfigError("fuse: empty path set");
  if (scores.size() != weights.size()) throw DataError("fuse: path sets disagree");
  double q = 0.0;
  for (const auto &[id, s] : scores) {
    auto it = weights.find(id);
    if (it == weights.end()) throw DataError("fuse: path sets disagree");
    const Tensor2D &w = it->second;
    if (!s.same_shape(w) || s.cols != 1) throw ShapeError("fuse: score/weight shape mismatch");
    for (int i = 0; i < s.rows; ++i) q += s.v[i] * w.v[i];
  }
  return q / static_cast<double>(scores.size());
}

void write_trace_csv(const ForwardTrace &trace, std::ostream &out,
                     const std::string &trial_id, bool header) {
  char buf[160];
  if (header) {
    if (!trial_id.empty()) out << "trial_id,";
    out << "t,path,score,weight,weighted_score\n";
  }
  for (const auto &p : trace.paths) {
    for (int t = 0; t < p.score.rows; ++t) {
      if (!trial_id.empty()) out << trial_id << ',';
      std::snprintf(buf, sizeof buf, "%d,%c,%.9g,%.9g,%.9g\n", t, path_letter(p.id),
                    p.score.v[t], p.weight.v[t], p.score.v[t] * p.weight.v[t]);
      out << buf;
    }
  }
}

}  // namespace umsa
