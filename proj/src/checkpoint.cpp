#include "umsa/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "umsa/errors.hpp"

namespace umsa {

using nlohmann::json;

namespace {

json model_config_to_json(const ModelConfig &cfg) {
  json dims = json::object(), embeds = json::object();
  for (PathId id : cfg.active) {
    dims[std::string(1, path_letter(id))] = cfg.input_dims.at(id);
    embeds[std::string(1, path_letter(id))] = cfg.embed_dims.at(id);
  }
  return json{{"paths", path_set_string(cfg.active)},
              {"input_dims", dims},
              {"embed_dims", embeds},
              {"encoder_layers", cfg.encoder_layers},
              {"kernel_size", cfg.kernel_size},
              {"hidden", cfg.hidden},
              {"contrastive", cfg.contrastive},
              {"contrastive_halfwidth", cfg.contrastive_halfwidth}};
}

ModelConfig model_config_from_json(const json &j) {
  ModelConfig cfg;
  cfg.active = parse_path_set(j.at("paths").get<std::string>());
  for (const auto &[key, val] : j.at("input_dims").items())
    cfg.input_dims[path_from_letter(key.at(0))] = val.get<int>();
  for (const auto &[key, val] : j.at("embed_dims").items())
    cfg.embed_dims[path_from_letter(key.at(0))] = val.get<int>();
  cfg.encoder_layers = j.at("encoder_layers").get<int>();
  cfg.kernel_size = j.at("kernel_size").get<int>();
  cfg.hidden = j.at("hidden").get<int>();
  cfg.contrastive = j.at("contrastive").get<bool>();
  cfg.contrastive_halfwidth = j.at("contrastive_halfwidth").get<int>();
  return cfg;
}

json tensor_to_json(const Tensor2D &t) {
  return json{{"rows", t.rows}, {"cols", t.cols}, {"values", t.v}};
}

Tensor2D tensor_from_json(const json &j) {
  Tensor2D t(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto vals = j.at("values").get<std::vector<double>>();
  if (vals.size() != t.v.size()) throw FormatError("checkpoint: tensor size mismatch");
  t.v = vals;
  return t;
}

}  // namespace

void save_checkpoint(Model &model, const std::string &config_hash,
                     const std::filesystem::path &path) {
  json params = json::object();
  for (const Param *p : model.parameters()) params[p->name] = tensor_to_json(p->value);
  json j{{"format", "umsa-checkpoint"},
         {"version", 1},
         {"config_hash", config_hash},
         {"model", model_config_to_json(model.config())},
         {"params", params}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint '" + path.string() + "'");
  out << j.dump(1) << '\n';
}

Model load_checkpoint(const std::filesystem::path &path, std::string *config_hash) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw FormatError("checkpoint '" + path.string() + "': " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "umsa-checkpoint")
      throw FormatError("checkpoint '" + path.string() + "': wrong format tag");
    if (config_hash) *config_hash = j.at("config_hash").get<std::string>();
    ModelConfig cfg = model_config_from_json(j.at("model"));
    Rng rng(0);  // values are overwritten below
    Model model(cfg, rng);
    const json &params = j.at("params");
    for (Param *p : model.parameters()) {
      if (!params.contains(p->name))
        throw FormatError("checkpoint: missing parameter '" + p->name + "'");
      Tensor2D t = tensor_from_json(params.at(p->name));
      if (!t.same_shape(p->value))
        throw FormatError("checkpoint: shape mismatch for parameter '" + p->name + "'");
      p->value = std::move(t);
    }
    return model;
  } catch (const json::exception &e) {
    throw FormatError("checkpoint '" + path.string() + "': " + e.what());
  }
}

}  // namespace umsa
