#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mgk/coalgebra.hpp"
#include "mgk/game.hpp"
#include "mgk/logic.hpp"

namespace mgk {

/// Everything a model file declares, validated eagerly. Kernels also appear
/// in `game` as kernel-generated effectivity functions unless a portfolio
/// with the same name is given.
struct ModelBundle {
  SpaceRef space;
  KripkeModel kripke;
  GameModel game;
  std::map<std::string, TransitionSystem> transitions;
};

/// InputError messages start with the offending key path, e.g. "kernels.g.a: ...".
ModelBundle parse_model(const std::string& json_text);
ModelBundle load_model(const std::filesystem::path& path);

/// {"domain": space, "codomain": space (defaults to domain),
///  "kernel": {a: {b: "p/q"}}, "legs": {"f1": {a: x}, "g1": {b: y}, "f2": ..., "g2": ...}}
StochasticSpan parse_span(const std::string& json_text, const MarkovKernel& k1, const MarkovKernel& k2);
StochasticSpan load_span(const std::filesystem::path& path, const MarkovKernel& k1, const MarkovKernel& k2);

std::string read_file(const std::filesystem::path& path);

}  // namespace mgk
