#include "umsa/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "umsa/errors.hpp"
#include "umsa/sequence_file.hpp"

namespace umsa {

using nlohmann::json;

Manifest read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  }
  Manifest m;
  m.dir = path.parent_path();
  if (!j.contains("trials") || !j["trials"].is_array())
    throw FormatError("manifest '" + path.string() + "': missing 'trials' array");
  std::set<std::string> seen;
  for (const auto &t : j["trials"]) {
    ManifestEntry e;
    try {
      e.trial_id = t.at("trial_id").get<std::string>();
      e.task_id = t.at("task_id").get<std::string>();
      e.user_id = t.at("user_id").get<std::string>();
      e.grs = t.at("grs").get<double>();
      e.grs_min = t.at("grs_range").at(0).get<double>();
      e.grs_max = t.at("grs_range").at(1).get<double>();
      for (const auto &[key, val] : t.at("sequences").items())
        e.sequence_files[path_from_letter(key.at(0))] = val.get<std::string>();
    } catch (const json::exception &ex) {
      throw FormatError("manifest '" + path.string() + "': malformed trial record: " +
                        ex.what());
    }
    if (!seen.insert(e.trial_id).second)
      throw DataError("manifest: duplicate trial id '" + e.trial_id + "'");
    if (!(e.grs_min < e.grs_max) || e.grs < e.grs_min || e.grs > e.grs_max)
      throw DataError("manifest: trial '" + e.trial_id + "' has grs outside its range");
    for (const auto &[id, file] : e.sequence_files) {
      const auto full = m.dir / file;
      if (!std::filesystem::exists(full))
        throw DataError("manifest: missing sequence file '" + full.string() + "'");
    }
    m.trials.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const Manifest &m, const std::filesystem::path &path) {
  json trials = json::array();
  for (const auto &e : m.trials) {
    json seqs = json::object();
    for (const auto &[id, file] : e.sequence_files)
      seqs[std::string(1, path_letter(id))] = file;
    trials.push_back(json{{"trial_id", e.trial_id},
                          {"task_id", e.task_id},
                          {"user_id", e.user_id},
                          {"grs", e.grs},
                          {"grs_range", json::array({e.grs_min, e.grs_max})},
                          {"sequences", seqs}});
  }
  json j{{"format", "umsa-manifest"}, {"version", 1}, {"trials", trials}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

Trial load_trial(const Manifest &m, const ManifestEntry &e, double source_fps,
                 double target_fps) {
  Trial t;
  t.trial_id = e.trial_id;
  t.task_id = e.task_id;
  t.user_id = e.user_id;
  t.grs = e.grs;
  t.grs_min = e.grs_min;
  t.grs_max = e.grs_max;
  for (const auto &[id, file] : e.sequence_files) {
    Tensor2D seq = read_sequence(m.dir / file);
    if (source_fps != target_fps) seq = resample(seq, source_fps, target_fps);
    t.features.emplace(id, std::move(seq));
  }
  t.length();  // validates consistency
  return t;
}

std::vector<Trial> load_trials(const Manifest &m, double source_fps, double target_fps) {
  std::vector<Trial> out;
  out.reserve(m.trials.size());
  for (const auto &e : m.trials) out.push_back(load_trial(m, e, source_fps, target_fps));
  return out;
}

}  // namespace umsa
