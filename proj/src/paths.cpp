#include "umsa/paths.hpp"

#include <algorithm>

#include "umsa/errors.hpp"

namespace umsa {

char path_letter(PathId id) {
  switch (id) {
    case PathId::V: return 'V';
    case PathId::T: return 'T';
    case PathId::P: return 'P';
    case PathId::E: return 'E';
  }
  return '?';
}

PathId path_from_letter(char c) {
  switch (c) {
    case 'V': case 'v': return PathId::V;
    case 'T': case 't': return PathId::T;
    case 'P': case 'p': return PathId::P;
    case 'E': case 'e': return PathId::E;
    default:
      throw ConfigError(std::string("unknown path letter '") + c + "' (expected V, T, P or E)");
  }
}

std::vector<PathId> parse_path_set(std::string_view s) {
  bool seen[4] = {false, false, false, false};
  for (char c : s) seen[static_cast<int>(path_from_letter(c))] = true;
  std::vector<PathId> out;
  for (PathId id : kAllPaths)
    if (seen[static_cast<int>(id)]) out.push_back(id);
  return out;
}

std::string path_set_string(std::span<const PathId> paths) {
  std::string s;
  for (PathId id : paths) s += path_letter(id);
  return s;
}

PathSpec PathSpec::learned(PathId id, int input_dim, int embed_dim, int layers,
                           int kernel) {
  PathSpec s;
  s.id = id;
  s.input_dim = input_dim;
  s.embed_dim = embed_dim;
  s.encoder_layers = layers;
  s.kernel_size = kernel;
  s.validate();
  return s;
}

PathSpec PathSpec::proxy(int input_dim) {
  PathSpec s;
  s.id = PathId::P;
  s.input_dim = input_dim;
  s.embed_dim = input_dim;  // identity encoder
  s.learned_encoder = false;
  s.learned_scorer = false;
  s.learned_weigher = false;
  s.has_predictor = false;
  s.validate();
  return s;
}

void PathSpec::validate() const {
  if (input_dim < 1 || embed_dim < 1) throw ConfigError("path dims must be positive");
  if (encoder_layers < 1) throw ConfigError("encoder needs at least one layer");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw ConfigError("encoder kernel size must be odd and positive");
  if (!learned_encoder && embed_dim != input_dim)
    throw ConfigError("identity encoder requires embed_dim == input_dim");
}

}  // namespace umsa
