#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "mgk/coalgebra.hpp"
#include "mgk/effectivity.hpp"
#include "mgk/interval.hpp"
#include "mgk/logic.hpp"

namespace mgk {

struct Game;
using GamePtr = std::shared_ptr<const Game>;

struct Game {
  enum class Kind { atomic, epsilon, dual, cup, cap, seq, star, cross };

  Kind kind = Kind::epsilon;
  std::string name;
  GamePtr left;
  GamePtr right;
};

GamePtr make_atomic(std::string name);
GamePtr make_epsilon();
GamePtr make_dual(GamePtr g);
GamePtr make_cup(GamePtr a, GamePtr b);
GamePtr make_cap(GamePtr a, GamePtr b);
GamePtr make_seq(GamePtr a, GamePtr b);
GamePtr make_star(GamePtr g);
GamePtr make_cross(GamePtr g);

/// Postfix ^d, *, × (or ^x) bind tightest, then ";", then ∪ (|) and ∩ (&),
/// all infix operators right-associative. "ε" or "eps" is the empty game.
GamePtr parse_game(std::string_view text);
std::string to_string(const Game& g);
std::size_t game_size(const Game& g);
bool structurally_equal(const Game& a, const Game& b);
bool is_dual_free(const Game& g);

/// Removes cap, cross and double duals, pushes duals through composition,
/// distributes composition over choice in head position, right-nests
/// composition and sorts choice operands. Duals over a choice or an
/// iteration cannot be pushed further and are kept.
GamePtr normalize(const GamePtr& g);
bool is_normalized(const Game& g);

struct GameFormula;
using GameFormulaPtr = std::shared_ptr<const GameFormula>;

struct GameFormula {
  enum class Kind { top, prim, conj, modal };

  Kind kind = Kind::top;
  std::string name;
  Rational threshold;
  GamePtr game;
  GameFormulaPtr left;
  GameFormulaPtr right;
};

/// phi := "T" | ident | phi "&" phi | "<" game ">_" rational phi | "(" phi ")"
GameFormulaPtr parse_game_formula(std::string_view text);
std::string to_string(const GameFormula& phi);

struct GameModel {
  SpaceRef space;
  std::map<std::string, EffectivityFunction> effectivity;
  std::map<std::string, StateSet> valuations;

  void validate() const;
  const EffectivityFunction& at(const std::string& game) const;

  /// Each action becomes an atomic game with kernel-generated portfolios.
  static GameModel from_kripke(const KripkeModel& m);
};

inline constexpr std::size_t kDefaultStarDepth = 32;
/// MGK_STAR_DEPTH if set to a positive integer, else the default.
std::size_t star_depth_from_env();

struct EvalOptions {
  /// Iterations n = 0..star_depth of tau^n;tau0 are summed.
  std::size_t star_depth = kDefaultStarDepth;
  /// When the iterates become periodic with positive failure thresholds the
  /// series diverges; return the full interval instead of the truncated sum.
  bool extrapolate_cycles = false;
};

/// Per-atom intervals {q : s in [[tau]](A, q)}. tau must be normalized.
ThresholdFunction threshold_eval(const GameModel& m, const Game& tau, StateSet a, const EvalOptions& options = {});

/// Neighborhood semantics over one upper-closed coalgebra per atomic game.
StateSet qualitative_effect(const std::map<std::string, UpperClosedCoalgebra>& frame, const Game& tau, StateSet a);

StateSet eval_game_formula(const GameModel& m, const GameFormula& phi, const EvalOptions& options = {});

/// Literal evaluation of the set recursions: choice quantifies over grid
/// pairs with denominator `grid`, iteration over grid sequences of length
/// depth + 1, composition integrates over the midpoints of the grid.
StateSet oracle_eval(const GameModel& m, const Game& tau, StateSet a, const Rational& q, unsigned grid,
                     std::size_t depth);

}  // namespace mgk
