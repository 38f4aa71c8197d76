#include <map>

#include "mgk/errors.hpp"
#include "mgk/game.hpp"

// Literal evaluation of the set-valued recursions. Deliberately shares no
// code with the interval evaluator beyond the model types.

namespace mgk {

namespace {

class Oracle {
 public:
  Oracle(const GameModel& m, unsigned grid, std::size_t depth) : m_(m), grid_(grid), depth_(depth) {}

  StateSet eval(const GamePtr& g, StateSet a, const Rational& q) {
    std::string key = to_string(*g) + "|" + std::to_string(a) + "|" + to_string(q);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    StateSet out = compute(g, a, q);
    memo_.emplace(std::move(key), out);
    return out;
  }

 private:
  StateSet all() const { return m_.space->full(); }
  Rational point(unsigned i) const { return fraction(i, grid_); }
  Rational midpoint(unsigned k) const { return fraction(2 * k + 1, 2UL * grid_); }

  StateSet compute(const GamePtr& g, StateSet a, const Rational& q) {
    switch (g->kind) {
      case Game::Kind::atomic: {
        const EffectivityFunction& eff = m_.at(g->name);
        StateSet out = 0;
        for (std::size_t s = 0; s < m_.space->size(); ++s) {
          if (eff.at(s).contains(beta(m_.space, a, q))) out |= singleton(s);
        }
        return out;
      }
      case Game::Kind::epsilon: {
        StateSet out = 0;
        for (std::size_t s = 0; s < m_.space->size(); ++s) {
          if (contains(a, s) ? Rational(1) >= q : Rational(0) >= q) out |= singleton(s);
        }
        return out;
      }
      case Game::Kind::dual:
        return all() & ~eval(g->left, all() & ~a, q);
      case Game::Kind::cup: {
        StateSet out = all();
        for (unsigned i = 0; i <= grid_; ++i) {
          for (unsigned j = 0; i + j <= grid_ && point(i + j) <= q; ++j) {
            out &= eval(g->left, a, point(i)) | eval(g->right, a, point(j));
          }
        }
        return out;
      }
      case Game::Kind::cap:
        return eval(make_dual(make_cup(make_dual(g->left), make_dual(g->right))), a, q);
      case Game::Kind::cross:
        return eval(make_dual(make_star(make_dual(g->left))), a, q);
      case Game::Kind::star:
        return eval(make_seq(g, make_epsilon()), a, q);
      case Game::Kind::seq:
        return sequential(g->left, g->right, a, q);
    }
    return 0;
  }

  // Grid estimate of the Lebesgue measure of {r : x in [[rest]](A, r)}.
  std::vector<Rational> lengths(const GamePtr& rest, StateSet a) {
    std::vector<Rational> len(m_.space->size());
    for (unsigned k = 0; k < grid_; ++k) {
      const StateSet hit = eval(rest, a, midpoint(k));
      for_each_member(hit, [&](std::size_t x) { len[x] += Rational(1, grid_); });
    }
    return len;
  }

  StateSet sequential(const GamePtr& head, const GamePtr& rest, StateSet a, const Rational& q) {
    const auto& space = m_.space;
    switch (head->kind) {
      case Game::Kind::atomic: {
        const std::vector<Rational> len = lengths(rest, a);
        std::vector<Rational> coefficients;
        for (std::size_t k = 0; k < space->atom_count(); ++k) coefficients.push_back(len[lowest(space->atom(k))]);
        const LinPred g_tau{space, coefficients, q, true};
        const EffectivityFunction& eff = m_.at(head->name);
        StateSet out = 0;
        for (std::size_t s = 0; s < space->size(); ++s) {
          if (eff.at(s).contains(g_tau)) out |= singleton(s);
        }
        return out;
      }
      case Game::Kind::epsilon: {
        const std::vector<Rational> len = lengths(rest, a);
        StateSet out = 0;
        for (std::size_t s = 0; s < space->size(); ++s) {
          if (len[s] > q) out |= singleton(s);
        }
        return out;
      }
      case Game::Kind::dual:
        return all() & ~eval(make_seq(head->left, make_dual(rest)), all() & ~a, q);
      case Game::Kind::cup:
        return eval(make_cup(make_seq(head->left, rest), make_seq(head->right, rest)), a, q);
      case Game::Kind::cap:
        return eval(make_seq(make_dual(make_cup(make_dual(head->left), make_dual(head->right))), rest), a, q);
      case Game::Kind::cross:
        return eval(make_seq(make_dual(make_star(make_dual(head->left))), rest), a, q);
      case Game::Kind::seq:
        return eval(make_seq(head->left, make_seq(head->right, rest)), a, q);
      case Game::Kind::star:
        return iterated(head->left, rest, a, q);
    }
    return 0;
  }

  // A grid sequence with sum at most q defeats s iff the smallest defeating
  // grid values of tau^n;rest, n = 0..depth, sum to at most q.
  StateSet iterated(const GamePtr& body, const GamePtr& rest, StateSet a, const Rational& q) {
    const std::size_t n_states = m_.space->size();
    std::vector<Rational> total(n_states);
    std::vector<bool> undefeated(n_states, false);
    GamePtr term = rest;
    for (std::size_t n = 0; n <= depth_; ++n) {
      for (std::size_t s = 0; s < n_states; ++s) {
        if (undefeated[s]) continue;
        bool found = false;
        for (unsigned i = 0; i <= grid_ && !found; ++i) {
          if (!contains(eval(term, a, point(i)), s)) {
            total[s] += point(i);
            found = true;
          }
        }
        if (!found) undefeated[s] = true;
      }
      term = make_seq(body, term);
    }
    StateSet out = 0;
    for (std::size_t s = 0; s < n_states; ++s) {
      if (undefeated[s] || total[s] > q) out |= singleton(s);
    }
    return out;
  }

  const GameModel& m_;
  unsigned grid_;
  std::size_t depth_;
  std::map<std::string, StateSet> memo_;
};

}  // namespace

StateSet oracle_eval(const GameModel& m, const Game& tau, StateSet a, const Rational& q, unsigned grid,
                     std::size_t depth) {
  if (grid == 0) throw InputError("grid denominator must be positive");
  if (!m.space->is_measurable(a)) throw InputError("target set " + m.space->format(a) + " is not measurable");
  if (q < 0 || q > 1) throw InputError("threshold " + to_string(q) + " outside [0,1]");
  Oracle oracle(m, grid, depth);
  return oracle.eval(std::make_shared<const Game>(tau), a, q);
}

}  // namespace mgk
