#include "umsa/splits.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "umsa/errors.hpp"
#include "umsa/rng.hpp"

namespace umsa {

using nlohmann::json;

std::string SplitPlan::scheme_string() const {
  if (scheme == SplitScheme::LOUO) return "louo";
  return "kfold:" + std::to_string(n_folds);
}

std::pair<SplitScheme, int> parse_scheme(const std::string &s) {
  if (s == "louo") return {SplitScheme::LOUO, 0};
  if (s.rfind("kfold:", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(s.substr(6));
    } catch (...) {
      throw ConfigError("bad split scheme '" + s + "'");
    }
    if (k < 1) throw ConfigError("kfold needs at least one fold");
    return {SplitScheme::KFold, k};
  }
  throw ConfigError("unknown split scheme '" + s + "' (expected kfold:<k> or louo)");
}

SplitPlan make_splits(const Manifest &m, SplitScheme scheme, int k, uint64_t seed) {
  SplitPlan plan;
  plan.scheme = scheme;
  plan.seed = seed;
  if (scheme == SplitScheme::KFold) {
    if (k < 1) throw ConfigError("kfold needs at least one fold");
    if (k > static_cast<int>(m.trials.size()))
      throw ConfigError("kfold: k=" + std::to_string(k) + " exceeds " +
                        std::to_string(m.trials.size()) + " trials");
    std::vector<std::string> ids;
    for (const auto &e : m.trials) ids.push_back(e.trial_id);
    Rng rng = Rng::derive(seed, "splits.kfold");
    rng.shuffle(ids);
    for (size_t i = 0; i < ids.size(); ++i)
      plan.assignment[ids[i]] = static_cast<int>(i % static_cast<size_t>(k));
    plan.n_folds = k;
  } else {
    std::set<std::string> users;
    for (const auto &e : m.trials) {
      if (e.user_id.empty())
        throw ConfigError("louo: trial '" + e.trial_id + "' has no user id");
      users.insert(e.user_id);
    }
    std::map<std::string, int> fold_of_user;
    int next = 0;
    for (const auto &u : users) fold_of_user[u] = next++;
    for (const auto &e : m.trials) plan.assignment[e.trial_id] = fold_of_user[e.user_id];
    plan.n_folds = next;
  }
  return plan;
}

void write_splits(const SplitPlan &plan, const std::filesystem::path &path) {
  json j{{"format", "umsa-splits"},
         {"scheme", plan.scheme_string()},
         {"seed", plan.seed},
         {"n_folds", plan.n_folds},
         {"assignment", plan.assignment}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write splits '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

SplitPlan read_splits(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open splits file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw FormatError("splits '" + path.string() + "': " + e.what());
  }
  SplitPlan plan;
  try {
    auto [scheme, k] = parse_scheme(j.at("scheme").get<std::string>());
    plan.scheme = scheme;
    plan.n_folds = j.at("n_folds").get<int>();
    plan.seed = j.at("seed").get<uint64_t>();
    for (const auto &[id, fold] : j.at("assignment").items())
      plan.assignment[id] = fold.get<int>();
    if (scheme == SplitScheme::KFold && plan.n_folds != k)
      throw FormatError("splits '" + path.string() + "': fold count disagrees with scheme");
  } catch (const json::exception &e) {
    throw FormatError("splits '" + path.string() + "': " + e.what());
  }
  return plan;
}

}  // namespace umsa
