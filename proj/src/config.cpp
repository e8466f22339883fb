#include "umsa/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "umsa/errors.hpp"
#include "umsa/rng.hpp"

namespace umsa {

namespace {

std::string trim(const std::string &s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string &s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

int to_int(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

uint64_t to_u64(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    const uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

double to_double(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

RunConfig RunConfig::parse(const std::string &text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "paths" && section != "data" &&
          section != "model" && section != "train")
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    const std::string full = section + "." + key;

    if (full == "run.seed") cfg.seed = to_u64(full, value);
    else if (full == "run.n_runs") cfg.n_runs = to_int(full, value);
    else if (full == "run.jobs") cfg.jobs = to_int(full, value);
    else if (full == "paths.active") cfg.active = value;
    else if (full == "data.n_trials") cfg.data.n_trials = to_int(full, value);
    else if (full == "data.length_min") cfg.data.length_min = to_int(full, value);
    else if (full == "data.length_max") cfg.data.length_max = to_int(full, value);
    else if (full == "data.dim_visual") cfg.data.dim_visual = to_int(full, value);
    else if (full == "data.dim_tool") cfg.data.dim_tool = to_int(full, value);
    else if (full == "data.dim_proxy") cfg.data.dim_proxy = to_int(full, value);
    else if (full == "data.event_classes") cfg.data.event_classes = to_int(full, value);
    else if (full == "data.n_users") cfg.data.n_users = to_int(full, value);
    else if (full == "data.n_tasks") cfg.data.n_tasks = to_int(full, value);
    else if (full == "data.noise_event") cfg.data.noise_event = to_double(full, value);
    else if (full == "data.noise_tool") cfg.data.noise_tool = to_double(full, value);
    else if (full == "data.noise_proxy") cfg.data.noise_proxy = to_double(full, value);
    else if (full == "data.noise_visual") cfg.data.noise_visual = to_double(full, value);
    else if (full == "data.grs_noise") cfg.data.grs_noise = to_double(full, value);
    else if (full == "data.grs_min") cfg.data.grs_min = to_double(full, value);
    else if (full == "data.grs_max") cfg.data.grs_max = to_double(full, value);
    else if (full == "data.backward_jump") cfg.data.backward_jump = to_double(full, value);
    else if (full == "data.advance_prob") cfg.data.advance_prob = to_double(full, value);
    else if (full == "data.source_fps") cfg.source_fps = to_double(full, value);
    else if (full == "data.target_fps") cfg.target_fps = to_double(full, value);
    else if (full == "model.embed_visual") cfg.embed_visual = to_int(full, value);
    else if (full == "model.embed_tool") cfg.embed_tool = to_int(full, value);
    else if (full == "model.embed_proxy") cfg.embed_proxy = to_int(full, value);
    else if (full == "model.embed_event") cfg.embed_event = to_int(full, value);
    else if (full == "model.encoder_layers") cfg.encoder_layers = to_int(full, value);
    else if (full == "model.kernel_size") cfg.kernel_size = to_int(full, value);
    else if (full == "model.hidden") cfg.hidden = to_int(full, value);
    else if (full == "model.contrastive") cfg.contrastive = to_bool(full, value);
    else if (full == "model.contrastive_halfwidth")
      cfg.contrastive_halfwidth = to_int(full, value);
    else if (full == "train.epochs") cfg.epochs = to_int(full, value);
    else if (full == "train.learning_rate") cfg.learning_rate = to_double(full, value);
    else if (full == "train.beta1") cfg.beta1 = to_double(full, value);
    else if (full == "train.beta2") cfg.beta2 = to_double(full, value);
    else if (full == "train.epsilon") cfg.epsilon = to_double(full, value);
    else if (full == "train.accumulation") cfg.accumulation = to_int(full, value);
    else
      throw ConfigError("config: unknown key '" + full + "'");
  }
  cfg.validate();
  return cfg;
}

std::string RunConfig::canonical_string() const {
  std::ostringstream o;
  o << "[run]\n"
    << "seed = " << seed << "\n"
    << "n_runs = " << n_runs << "\n"
    << "jobs = " << jobs << "\n"
    << "[paths]\n"
    << "active = \"" << active << "\"\n"
    << "[data]\n"
    << "n_trials = " << data.n_trials << "\n"
    << "length_min = " << data.length_min << "\n"
    << "length_max = " << data.length_max << "\n"
    << "dim_visual = " << data.dim_visual << "\n"
    << "dim_tool = " << data.dim_tool << "\n"
    << "dim_proxy = " << data.dim_proxy << "\n"
    << "event_classes = " << data.event_classes << "\n"
    << "n_users = " << data.n_users << "\n"
    << "n_tasks = " << data.n_tasks << "\n"
    << "noise_event = " << fmt(data.noise_event) << "\n"
    << "noise_tool = " << fmt(data.noise_tool) << "\n"
    << "noise_proxy = " << fmt(data.noise_proxy) << "\n"
    << "noise_visual = " << fmt(data.noise_visual) << "\n"
    << "grs_noise = " << fmt(data.grs_noise) << "\n"
    << "grs_min = " << fmt(data.grs_min) << "\n"
    << "grs_max = " << fmt(data.grs_max) << "\n"
    << "backward_jump = " << fmt(data.backward_jump) << "\n"
    << "advance_prob = " << fmt(data.advance_prob) << "\n"
    << "source_fps = " << fmt(source_fps) << "\n"
    << "target_fps = " << fmt(target_fps) << "\n"
    << "[model]\n"
    << "embed_visual = " << embed_visual << "\n"
    << "embed_tool = " << embed_tool << "\n"
    << "embed_proxy = " << embed_proxy << "\n"
    << "embed_event = " << embed_event << "\n"
    << "encoder_layers = " << encoder_layers << "\n"
    << "kernel_size = " << kernel_size << "\n"
    << "hidden = " << hidden << "\n"
    << "contrastive = " << (contrastive ? "true" : "false") << "\n"
    << "contrastive_halfwidth = " << contrastive_halfwidth << "\n"
    << "[train]\n"
    << "epochs = " << epochs << "\n"
    << "learning_rate = " << fmt(learning_rate) << "\n"
    << "beta1 = " << fmt(beta1) << "\n"
    << "beta2 = " << fmt(beta2) << "\n"
    << "epsilon = " << fmt(epsilon) << "\n"
    << "accumulation = " << accumulation << "\n";
  return o.str();
}

std::string RunConfig::hash() const {
  const uint64_t h = Rng::hash_name(canonical_string());
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s = data;
  s.seed = seed;
  return s;
}

ModelConfig RunConfig::model_config() const { return model_config(active); }

ModelConfig RunConfig::model_config(const std::string &paths) const {
  ModelConfig m;
  m.active = parse_path_set(paths);
  if (m.active.empty()) throw ConfigError("active path set must be non-empty");
  m.input_dims = {{PathId::V, data.dim_visual},
                  {PathId::T, data.dim_tool},
                  {PathId::P, data.dim_proxy},
                  {PathId::E, data.event_classes}};
  m.embed_dims = {{PathId::V, embed_visual},
                  {PathId::T, embed_tool},
                  {PathId::P, embed_proxy},
                  {PathId::E, embed_event}};
  m.encoder_layers = encoder_layers;
  m.kernel_size = kernel_size;
  m.hidden = hidden;
  m.contrastive = contrastive;
  m.contrastive_halfwidth = contrastive_halfwidth;
  m.validate();
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.adam = {learning_rate, beta1, beta2, epsilon};
  t.accumulation = accumulation;
  t.n_runs = n_runs;
  t.seed = seed;
  t.jobs = jobs;
  t.validate();
  return t;
}

void RunConfig::validate() const {
  data.validate();
  if (source_fps <= 0.0 || target_fps <= 0.0) throw ConfigError("fps values must be positive");
  if (target_fps > source_fps) throw ConfigError("target_fps exceeds source_fps");
  model_config();   // validates paths/model fields
  train_config();   // validates train fields
}

}  // namespace umsa
