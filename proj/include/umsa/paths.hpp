#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace umsa {

// One skill aspect: visual, tool, proxy, event. Concatenation and
// reporting order is always V, T, P, E restricted to the active set.
enum class PathId { V = 0, T = 1, P = 2, E = 3 };

inline constexpr std::array<PathId, 4> kAllPaths{PathId::V, PathId::T, PathId::P,
                                                 PathId::E};

char path_letter(PathId id);
PathId path_from_letter(char c);  // throws ConfigError on unknown letter

// Parses "VTPE", "tp", ... into canonical order without duplicates.
std::vector<PathId> parse_path_set(std::string_view s);
std::string path_set_string(std::span<const PathId> paths);

// Per-path architecture and which functions are learned. The proxy path
// keeps identity encode/score, uniform weights, and no predictor.
struct PathSpec {
  PathId id = PathId::V;
  int input_dim = 1;
  int embed_dim = 1;
  int encoder_layers = 2;
  int kernel_size = 3;
  bool learned_encoder = true;
  bool learned_scorer = true;
  bool learned_weigher = true;
  bool has_predictor = true;

  static PathSpec learned(PathId id, int input_dim, int embed_dim, int layers,
                          int kernel);
  static PathSpec proxy(int input_dim);

  void validate() const;
};

}  // namespace umsa
