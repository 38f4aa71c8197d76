#include "mgk/game.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

#include "mgk/detail/cursor.hpp"
#include "mgk/errors.hpp"

namespace mgk {

namespace {

GamePtr node(Game::Kind kind, std::string name, GamePtr left, GamePtr right) {
  return std::make_shared<const Game>(Game{kind, std::move(name), std::move(left), std::move(right)});
}

bool is_choice(Game::Kind k) { return k == Game::Kind::cup || k == Game::Kind::cap; }

}  // namespace

GamePtr make_atomic(std::string name) {
  if (name.empty()) throw InputError("atomic game without a name");
  return node(Game::Kind::atomic, std::move(name), nullptr, nullptr);
}
GamePtr make_epsilon() { return node(Game::Kind::epsilon, "", nullptr, nullptr); }
GamePtr make_dual(GamePtr g) { return node(Game::Kind::dual, "", std::move(g), nullptr); }
GamePtr make_cup(GamePtr a, GamePtr b) { return node(Game::Kind::cup, "", std::move(a), std::move(b)); }
GamePtr make_cap(GamePtr a, GamePtr b) { return node(Game::Kind::cap, "", std::move(a), std::move(b)); }
GamePtr make_seq(GamePtr a, GamePtr b) { return node(Game::Kind::seq, "", std::move(a), std::move(b)); }
GamePtr make_star(GamePtr g) { return node(Game::Kind::star, "", std::move(g), nullptr); }
GamePtr make_cross(GamePtr g) { return node(Game::Kind::cross, "", std::move(g), nullptr); }

// ------------------------------------------------------------------ syntax

namespace {

GamePtr parse_choice(detail::Cursor& c);

GamePtr parse_primary(detail::Cursor& c) {
  if (c.consume("(")) {
    GamePtr inner = parse_choice(c);
    c.expect(")");
    return inner;
  }
  if (c.consume("ε")) return make_epsilon();
  std::string id = c.identifier();
  if (id == "eps") return make_epsilon();
  return make_atomic(std::move(id));
}

GamePtr parse_postfix(detail::Cursor& c) {
  GamePtr g = parse_primary(c);
  while (true) {
    if (c.consume("^d")) {
      g = make_dual(g);
    } else if (c.consume("*")) {
      g = make_star(g);
    } else if (c.consume("×") || c.consume("^x")) {
      g = make_cross(g);
    } else {
      return g;
    }
  }
}

GamePtr parse_seq(detail::Cursor& c) {
  GamePtr head = parse_postfix(c);
  if (c.consume(";")) return make_seq(head, parse_seq(c));
  return head;
}

GamePtr parse_choice(detail::Cursor& c) {
  GamePtr left = parse_seq(c);
  if (c.consume("∪") || c.consume("|")) return make_cup(left, parse_choice(c));
  if (c.consume("∩") || c.consume("&")) return make_cap(left, parse_choice(c));
  return left;
}

// Binding levels: 0 choice, 1 composition, 2 postfix and atoms.
int level(const Game& g) {
  if (is_choice(g.kind)) return 0;
  if (g.kind == Game::Kind::seq) return 1;
  return 2;
}

std::string wrapped(const Game& g, int min_level) {
  std::string s = to_string(g);
  return level(g) < min_level ? "(" + s + ")" : s;
}

}  // namespace

GamePtr parse_game(std::string_view text) {
  detail::Cursor c(text);
  GamePtr out = parse_choice(c);
  if (!c.at_end()) c.fail("unexpected input after game");
  return out;
}

std::string to_string(const Game& g) {
  switch (g.kind) {
    case Game::Kind::atomic:
      return g.name;
    case Game::Kind::epsilon:
      return "ε";
    case Game::Kind::dual:
      return wrapped(*g.left, 2) + "^d";
    case Game::Kind::star:
      return wrapped(*g.left, 2) + "*";
    case Game::Kind::cross:
      return wrapped(*g.left, 2) + "×";
    case Game::Kind::seq:
      return wrapped(*g.left, 2) + ";" + wrapped(*g.right, 1);
    case Game::Kind::cup:
    case Game::Kind::cap: {
      const std::string op = g.kind == Game::Kind::cup ? " ∪ " : " ∩ ";
      std::string right = to_string(*g.right);
      if (is_choice(g.right->kind) && g.right->kind != g.kind) right = "(" + right + ")";
      return wrapped(*g.left, 1) + op + right;
    }
  }
  return "";
}

std::size_t game_size(const Game& g) {
  std::size_t n = 1;
  if (g.left) n += game_size(*g.left);
  if (g.right) n += game_size(*g.right);
  return n;
}

bool structurally_equal(const Game& a, const Game& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (static_cast<bool>(a.left) != static_cast<bool>(b.left)) return false;
  if (static_cast<bool>(a.right) != static_cast<bool>(b.right)) return false;
  if (a.left && !structurally_equal(*a.left, *b.left)) return false;
  if (a.right && !structurally_equal(*a.right, *b.right)) return false;
  return true;
}

bool is_dual_free(const Game& g) {
  if (g.kind == Game::Kind::dual || g.kind == Game::Kind::cap || g.kind == Game::Kind::cross) return false;
  if (g.left && !is_dual_free(*g.left)) return false;
  if (g.right && !is_dual_free(*g.right)) return false;
  return true;
}

// ----------------------------------------------------------- normalization

namespace {

void flatten_cup(const GamePtr& g, std::vector<GamePtr>& out) {
  if (g->kind == Game::Kind::cup) {
    flatten_cup(g->left, out);
    flatten_cup(g->right, out);
  } else {
    out.push_back(g);
  }
}

// Operands are normal; result is a right-nested cup in printed order.
GamePtr choice_of(const GamePtr& a, const GamePtr& b) {
  std::vector<GamePtr> ops;
  flatten_cup(a, ops);
  flatten_cup(b, ops);
  std::vector<std::pair<std::string, GamePtr>> keyed;
  for (auto& g : ops) keyed.emplace_back(to_string(*g), g);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  GamePtr out = keyed.back().second;
  for (std::size_t i = keyed.size() - 1; i-- > 0;) out = make_cup(keyed[i].second, out);
  return out;
}

GamePtr compose(const GamePtr& head, const GamePtr& rest) {
  if (head->kind == Game::Kind::cup) return choice_of(compose(head->left, rest), compose(head->right, rest));
  if (head->kind == Game::Kind::seq) return compose(head->left, compose(head->right, rest));
  return make_seq(head, rest);
}

GamePtr push_dual(const GamePtr& g) {
  if (g->kind == Game::Kind::dual) return g->left;
  if (g->kind == Game::Kind::seq) return compose(push_dual(g->left), push_dual(g->right));
  return make_dual(g);
}

}  // namespace

GamePtr normalize(const GamePtr& g) {
  switch (g->kind) {
    case Game::Kind::atomic:
    case Game::Kind::epsilon:
      return g;
    case Game::Kind::dual:
      return push_dual(normalize(g->left));
    case Game::Kind::cup:
      return choice_of(normalize(g->left), normalize(g->right));
    case Game::Kind::cap:
      return push_dual(choice_of(push_dual(normalize(g->left)), push_dual(normalize(g->right))));
    case Game::Kind::seq:
      return compose(normalize(g->left), normalize(g->right));
    case Game::Kind::star:
      return make_star(normalize(g->left));
    case Game::Kind::cross:
      return push_dual(make_star(push_dual(normalize(g->left))));
  }
  return g;
}

bool is_normalized(const Game& g) {
  auto copy = std::make_shared<const Game>(g);
  return structurally_equal(*normalize(copy), g);
}

// --------------------------------------------------------------- formulas

namespace {

GameFormulaPtr formula(GameFormula::Kind kind, std::string name, Rational q, GamePtr game, GameFormulaPtr l,
                       GameFormulaPtr r) {
  return std::make_shared<const GameFormula>(
      GameFormula{kind, std::move(name), std::move(q), std::move(game), std::move(l), std::move(r)});
}

GameFormulaPtr parse_gconj(detail::Cursor& c);

GameFormulaPtr parse_gunary(detail::Cursor& c) {
  if (c.consume("(")) {
    GameFormulaPtr inner = parse_gconj(c);
    c.expect(")");
    return inner;
  }
  if (c.consume("<")) {
    GamePtr game = parse_choice(c);
    c.expect(">_");
    Rational q = c.unit_rational();
    return formula(GameFormula::Kind::modal, "", std::move(q), std::move(game), parse_gunary(c), nullptr);
  }
  std::string id = c.identifier();
  if (id == "T") return formula(GameFormula::Kind::top, "", Rational(0), nullptr, nullptr, nullptr);
  return formula(GameFormula::Kind::prim, std::move(id), Rational(0), nullptr, nullptr, nullptr);
}

GameFormulaPtr parse_gconj(detail::Cursor& c) {
  GameFormulaPtr out = parse_gunary(c);
  while (c.consume("&")) out = formula(GameFormula::Kind::conj, "", Rational(0), nullptr, out, parse_gunary(c));
  return out;
}

}  // namespace

GameFormulaPtr parse_game_formula(std::string_view text) {
  detail::Cursor c(text);
  GameFormulaPtr out = parse_gconj(c);
  if (!c.at_end()) c.fail("unexpected input after formula");
  return out;
}

std::string to_string(const GameFormula& phi) {
  switch (phi.kind) {
    case GameFormula::Kind::top:
      return "T";
    case GameFormula::Kind::prim:
      return phi.name;
    case GameFormula::Kind::conj: {
      std::string right = to_string(*phi.right);
      if (phi.right->kind == GameFormula::Kind::conj) right = "(" + right + ")";
      return to_string(*phi.left) + " & " + right;
    }
    case GameFormula::Kind::modal: {
      std::string body = to_string(*phi.left);
      if (phi.left->kind == GameFormula::Kind::conj) body = "(" + body + ")";
      return "<" + to_string(*phi.game) + ">_" + to_string(phi.threshold) + " " + body;
    }
  }
  return "";
}

// ------------------------------------------------------------------ models

void GameModel::validate() const {
  if (!space) throw InputError("model without a space");
  for (const auto& [g, eff] : effectivity) {
    if (!same_space(eff.space(), space)) throw InputError("effectivity function " + g + " lives on another space");
  }
  for (const auto& [p, v] : valuations) {
    if (!space->is_measurable(v)) throw InputError("valuation " + p + " is not measurable");
  }
}

const EffectivityFunction& GameModel::at(const std::string& game) const {
  auto it = effectivity.find(game);
  if (it == effectivity.end()) throw InputError("unknown atomic game '" + game + "'");
  return it->second;
}

GameModel GameModel::from_kripke(const KripkeModel& m) {
  GameModel out{m.space, {}, m.valuations};
  for (const auto& [a, k] : m.kernels) out.effectivity.emplace(a, eff_from_kernel(k));
  return out;
}

std::size_t star_depth_from_env() {
  const char* raw = std::getenv("MGK_STAR_DEPTH");
  if (raw == nullptr) return kDefaultStarDepth;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) return kDefaultStarDepth;
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------- interval semantics

namespace {

class Evaluator {
 public:
  Evaluator(const GameModel& m, const EvalOptions& options) : m_(m), space_(m.space), options_(options) {}

  ThresholdFunction eval(const Game& g, StateSet a) const {
    switch (g.kind) {
      case Game::Kind::atomic:
        return atomic(g.name, a);
      case Game::Kind::epsilon:
        return epsilon(a);
      case Game::Kind::dual:
        return eval(*g.left, space_->full() & ~a).complement();
      case Game::Kind::cup:
        return choice(eval(*g.left, a), eval(*g.right, a));
      case Game::Kind::seq:
        return prefix(*g.left, eval(*g.right, a));
      case Game::Kind::star:
        return prefix(g, epsilon(a));
      case Game::Kind::cap:
      case Game::Kind::cross:
        break;
    }
    throw PreconditionError("game is not normalized: " + to_string(g));
  }

 private:
  std::size_t atoms() const { return space_->atom_count(); }
  std::size_t rep(std::size_t k) const { return lowest(space_->atom(k)); }

  ThresholdFunction atomic(const std::string& name, StateSet a) const {
    const EffectivityFunction& eff = m_.at(name);
    std::vector<QInterval> out;
    for (std::size_t k = 0; k < atoms(); ++k) {
      out.push_back(QInterval::down_closed(eff.at(rep(k)).min_value(beta(space_, a, Rational(0)))));
    }
    return {space_, std::move(out)};
  }

  ThresholdFunction epsilon(StateSet a) const {
    std::vector<QInterval> out;
    for (std::size_t k = 0; k < atoms(); ++k) {
      out.push_back(subset_of(space_->atom(k), a) ? QInterval::full() : QInterval::down_closed(Rational(0)));
    }
    return {space_, std::move(out)};
  }

  static QInterval choice(const QInterval& x, const QInterval& y) {
    const auto gx = x.failure_infimum();
    const auto gy = y.failure_infimum();
    if (gx.infinite || gy.infinite) return QInterval::full();
    return from_failure_sum(Rational(gx.value + gy.value), gx.attained && gy.attained);
  }

  ThresholdFunction choice(const ThresholdFunction& x, const ThresholdFunction& y) const {
    std::vector<QInterval> out;
    std::vector<bool> approx;
    for (std::size_t k = 0; k < atoms(); ++k) {
      out.push_back(choice(x.at_atom(k), y.at_atom(k)));
      approx.push_back(x.approximate()[k] || y.approximate()[k]);
    }
    return {space_, std::move(out), std::move(approx)};
  }

  // Intervals of head;rest at A given the intervals of rest at A.
  ThresholdFunction prefix(const Game& head, const ThresholdFunction& cont) const {
    switch (head.kind) {
      case Game::Kind::atomic:
        return through_portfolio(m_.at(head.name), cont);
      case Game::Kind::epsilon: {
        std::vector<QInterval> out;
        for (std::size_t k = 0; k < atoms(); ++k) out.push_back(QInterval::down_open(cont.at_atom(k).length()));
        return {space_, std::move(out), cont.approximate()};
      }
      case Game::Kind::dual:
        // h^d;r equals (h;r^d)^d.
        return prefix(*head.left, cont.complement()).complement();
      case Game::Kind::cup:
        return choice(prefix(*head.left, cont), prefix(*head.right, cont));
      case Game::Kind::seq:
        return prefix(*head.left, prefix(*head.right, cont));
      case Game::Kind::star:
        return iterate(*head.left, cont);
      case Game::Kind::cap:
      case Game::Kind::cross:
        break;
    }
    throw PreconditionError("game is not normalized: " + to_string(head));
  }

  // Expected interval length under each generator; membership needs more than q.
  ThresholdFunction through_portfolio(const EffectivityFunction& eff, const ThresholdFunction& cont) const {
    std::vector<Rational> lengths;
    for (std::size_t j = 0; j < atoms(); ++j) lengths.push_back(cont.at_atom(j).length());
    const LinPred expectation{space_, lengths, Rational(0), true};
    std::vector<QInterval> out;
    std::vector<bool> approx;
    for (std::size_t k = 0; k < atoms(); ++k) {
      const Portfolio& p = eff.at(rep(k));
      out.push_back(QInterval::down_open(p.min_value(expectation)));
      bool a = false;
      for (const auto& nu : p.measures()) {
        for (std::size_t j = 0; j < atoms(); ++j) a = a || (nu.weight(j) > 0 && cont.approximate()[j]);
      }
      approx.push_back(a);
    }
    return {space_, std::move(out), std::move(approx)};
  }

  // tau*;tau0: fails at q iff the failure infima of tau^n;tau0 sum to at most q.
  ThresholdFunction iterate(const Game& body, const ThresholdFunction& cont) const {
    const std::size_t n_atoms = atoms();
    std::vector<Rational> sum(n_atoms);
    std::vector<bool> attained(n_atoms, true);
    std::vector<bool> infinite(n_atoms, false);
    std::vector<bool> inherited(n_atoms, false);
    // Per-term failure infima, kept to inspect a detected cycle.
    std::vector<std::vector<QInterval::Gap>> gaps;
    std::vector<std::vector<QInterval>> seen;
    std::optional<std::size_t> cycle_start;

    auto saturated = [&](std::size_t k) { return infinite[k] || sum[k] > 1 || (sum[k] == 1 && !attained[k]); };

    ThresholdFunction term = cont;
    for (std::size_t n = 0;; ++n) {
      std::vector<QInterval::Gap> row;
      for (std::size_t k = 0; k < n_atoms; ++k) {
        row.push_back(term.at_atom(k).failure_infimum());
        inherited[k] = inherited[k] || term.approximate()[k];
        if (row[k].infinite) {
          infinite[k] = true;
        } else {
          sum[k] += row[k].value;
          attained[k] = attained[k] && row[k].attained;
        }
      }
      gaps.push_back(std::move(row));
      if (!cycle_start) seen.push_back(term.intervals());
      bool all_saturated = true;
      for (std::size_t k = 0; k < n_atoms; ++k) all_saturated = all_saturated && saturated(k);
      if (all_saturated || n == options_.star_depth) break;
      term = prefix(body, term);
      if (!cycle_start) {
        auto hit = std::find(seen.begin(), seen.end(), term.intervals());
        if (hit != seen.end()) cycle_start = static_cast<std::size_t>(hit - seen.begin());
      }
    }

    std::vector<QInterval> out;
    std::vector<bool> approx;
    for (std::size_t k = 0; k < n_atoms; ++k) {
      bool exact = saturated(k);
      bool diverges = false;
      if (!exact && cycle_start) {
        // Terms repeat from cycle_start on; zero tails change nothing.
        bool zero_tail = true;
        for (std::size_t i = *cycle_start; i < seen.size(); ++i) {
          zero_tail = zero_tail && !gaps[i][k].infinite && gaps[i][k].value == 0;
        }
        exact = zero_tail;
        diverges = !zero_tail;
      }
      if (infinite[k] || (diverges && options_.extrapolate_cycles)) {
        out.push_back(QInterval::full());
        approx.push_back(false);
      } else {
        out.push_back(from_failure_sum(sum[k], attained[k]));
        approx.push_back(!exact || (inherited[k] && !saturated(k)));
      }
    }
    return {space_, std::move(out), std::move(approx)};
  }

  const GameModel& m_;
  const SpaceRef& space_;
  const EvalOptions& options_;
};

}  // namespace

ThresholdFunction threshold_eval(const GameModel& m, const Game& tau, StateSet a, const EvalOptions& options) {
  if (!m.space->is_measurable(a)) throw InputError("target set " + m.space->format(a) + " is not measurable");
  if (!is_normalized(tau)) throw PreconditionError("game is not normalized: " + to_string(tau));
  return Evaluator(m, options).eval(tau, a);
}

StateSet eval_game_formula(const GameModel& m, const GameFormula& phi, const EvalOptions& options) {
  switch (phi.kind) {
    case GameFormula::Kind::top:
      return m.space->full();
    case GameFormula::Kind::prim: {
      auto it = m.valuations.find(phi.name);
      if (it == m.valuations.end()) throw InputError("unknown primitive '" + phi.name + "'");
      return it->second;
    }
    case GameFormula::Kind::conj:
      return eval_game_formula(m, *phi.left, options) & eval_game_formula(m, *phi.right, options);
    case GameFormula::Kind::modal: {
      const StateSet inner = eval_game_formula(m, *phi.left, options);
      const StateSet out = threshold_eval(m, *normalize(phi.game), inner, options).evaluate(phi.threshold);
      if (!m.space->is_measurable(out)) throw InvariantViolation("validity set is not measurable");
      return out;
    }
  }
  return 0;
}

// ------------------------------------------------------ neighborhood semantics

StateSet qualitative_effect(const std::map<std::string, UpperClosedCoalgebra>& frame, const Game& tau, StateSet a) {
  if (frame.empty()) throw InputError("empty game frame");
  const std::size_t n = frame.begin()->second.size();
  for (const auto& [name, c] : frame) {
    if (c.size() != n) throw InputError("frame coalgebra " + name + " has a different carrier");
  }
  const StateSet all = full_set(n);
  std::function<StateSet(const Game&, StateSet)> go = [&](const Game& g, StateSet x) -> StateSet {
    switch (g.kind) {
      case Game::Kind::atomic: {
        auto it = frame.find(g.name);
        if (it == frame.end()) throw InputError("unknown atomic game '" + g.name + "'");
        StateSet out = 0;
        for (std::size_t s = 0; s < n; ++s) {
          if (it->second.structure[s].contains(x)) out |= singleton(s);
        }
        return out;
      }
      case Game::Kind::epsilon:
        return x;
      case Game::Kind::dual:
        return all & ~go(*g.left, all & ~x);
      case Game::Kind::cup:
        return go(*g.left, x) | go(*g.right, x);
      case Game::Kind::cap:
        return go(*g.left, x) & go(*g.right, x);
      case Game::Kind::seq:
        return go(*g.left, go(*g.right, x));
      case Game::Kind::star: {
        StateSet acc = x;
        StateSet cur = x;
        std::vector<StateSet> visited{x};
        while (true) {
          cur = go(*g.left, cur);
          if (std::find(visited.begin(), visited.end(), cur) != visited.end()) return acc;
          visited.push_back(cur);
          acc |= cur;
        }
      }
      case Game::Kind::cross: {
        const Game inner{Game::Kind::dual, "", g.left, nullptr};
        const Game iterated{Game::Kind::star, "", std::make_shared<const Game>(inner), nullptr};
        return all & ~go(iterated, all & ~x);
      }
    }
    return 0;
  };
  return go(tau, a & all);
}

}  // namespace mgk
