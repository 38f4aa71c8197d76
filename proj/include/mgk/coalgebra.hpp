#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgk/monad.hpp"
#include "mgk/prob.hpp"
#include "mgk/space.hpp"

namespace mgk {

// Coalgebras for the three functors. The functor is part of the C++ type, so
// a functor mismatch between two coalgebras does not compile. A Giry
// coalgebra is a MarkovKernel whose domain and codomain coincide.

struct TransitionSystem {
  std::vector<std::string> states;
  std::vector<StateSet> succ;

  std::size_t size() const { return states.size(); }
};

struct UpperClosedCoalgebra {
  std::vector<std::string> states;
  std::vector<UpperClosedFamily> structure;

  std::size_t size() const { return states.size(); }
};

/// Sorted set of pairs in left x right.
class Relation {
 public:
  Relation(std::size_t left, std::size_t right, std::vector<std::pair<std::size_t, std::size_t>> pairs);

  static Relation graph(const std::vector<std::size_t>& f, std::size_t right);
  /// Bit (s * right + t) of `mask` selects the pair (s, t).
  static Relation from_mask(std::size_t left, std::size_t right, std::uint64_t mask);

  std::size_t left_size() const noexcept { return left_; }
  std::size_t right_size() const noexcept { return right_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool contains(std::size_t s, std::size_t t) const;
  StateSet left_projection() const;
  StateSet right_projection() const;
  bool has_full_projections() const;

 private:
  std::size_t left_;
  std::size_t right_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

struct Verdict {
  bool ok = true;
  /// First violation, empty when ok.
  std::string witness;

  explicit operator bool() const { return ok; }
};

/// f2(phi(a)) = phi[f1(a)] for all a.
Verdict check_morphism(const std::vector<std::size_t>& phi, const TransitionSystem& c1, const TransitionSystem& c2);
/// The two bounded-morphism (zig and zag) conditions.
Verdict check_bounded_morphism(const std::vector<std::size_t>& phi, const TransitionSystem& c1,
                               const TransitionSystem& c2);
/// f2(phi(a)) = {H : phi^{-1} H in f1(a)} for all a.
Verdict check_morphism(const std::vector<std::size_t>& phi, const UpperClosedCoalgebra& c1,
                       const UpperClosedCoalgebra& c2);
/// phi measurable and L(phi(x))(B) = K(x)(phi^{-1} B) for all x and measurable B.
Verdict check_morphism(const MeasurableMap& phi, const MarkovKernel& k, const MarkovKernel& l);

/// Morphism, surjective, and the codomain carries the final sigma-algebra of phi.
Verdict check_strong_morphism(const MeasurableMap& phi, const MarkovKernel& k, const MarkovKernel& l);

Verdict check_bisimulation(const Relation& b, const TransitionSystem& c1, const TransitionSystem& c2);
Verdict check_bisimulation(const Relation& b, const UpperClosedCoalgebra& c1, const UpperClosedCoalgebra& c2);
/// Relational bisimulation is not defined for the Giry functor; always throws
/// UnsupportedError. Use check_stochastic_span instead.
Verdict check_bisimulation(const Relation& b, const MarkovKernel& c1, const MarkovKernel& c2);

template <class C>
struct Mediator {
  /// Carrier is the relation, states labelled "(s,t)".
  C coalgebra;
  std::vector<std::size_t> pi_left;
  std::vector<std::size_t> pi_right;
};

/// h(s,t) = {(s',t') in B : s -> s' and t -> t'}. PreconditionError unless B
/// is a bisimulation.
Mediator<TransitionSystem> mediator_structure(const Relation& b, const TransitionSystem& c1,
                                              const TransitionSystem& c2);
/// h(s,t) = {D subset of B : pi_S[D] in f(s) and pi_T[D] in g(t)}. Requires a
/// bisimulation with full projections and |B| <= 12.
Mediator<UpperClosedCoalgebra> mediator_structure(const Relation& b, const UpperClosedCoalgebra& c1,
                                                  const UpperClosedCoalgebra& c2);

inline constexpr std::size_t kMaxUpperClosedMediator = 12;

struct CongruenceResult {
  bool ok = false;
  /// "x ~ x' differ on A" when not a congruence.
  std::string witness;
  std::optional<FactorResult> factor;
  /// K_tau on the factor space.
  std::optional<MarkovKernel> factor_kernel;
};

/// tau is a congruence iff K(x)(A) = K(x')(A) whenever x tau x' and A is a
/// measurable tau-invariant set. On success also builds K_tau and verifies that
/// rho_tau is a strong morphism (InvariantViolation if not).
CongruenceResult check_congruence(const EquivRelation& tau, const MarkovKernel& k);

struct SubsystemResult {
  bool ok = false;
  std::string witness;
  /// The kernel on the coarser sigma-algebra.
  std::optional<MarkovKernel> restricted;
};

/// `sub_atoms` must be coarser than the atoms of k's space (InputError otherwise).
SubsystemResult check_subsystem(const Partition& sub_atoms, const MarkovKernel& k);

/// K_i : X_i ~> Y_i related through a mediator M : A ~> B and legs
/// (f_i : A -> X_i, g_i : B -> Y_i).
struct StochasticSpan {
  MarkovKernel k1;
  MarkovKernel k2;
  MarkovKernel mediator;
  MeasurableMap f1;
  MeasurableMap g1;
  MeasurableMap f2;
  MeasurableMap g2;
};

enum class SpanVerdict { not_span, trivial_common_events, bisimilar };

std::string to_string(SpanVerdict v);

struct SpanReport {
  SpanVerdict verdict = SpanVerdict::not_span;
  std::string reason;
  /// Atoms of g1^{-1}B1 intersected with g2^{-1}B2, when the legs are morphisms.
  std::optional<Partition> common_events;
};

SpanReport check_stochastic_span(const StochasticSpan& span);

/// A = X1 x X2, B = Y1 x Y2, M(x1,x2) = K1(x1) (x) K2(x2), projection legs.
StochasticSpan product_mediator(const MarkovKernel& k1, const MarkovKernel& k2);

/// Best-effort search for two coalgebras: tries relations R with full
/// projections (|X1|*|X2| <= max_pairs), mediators on R with the initial
/// sigma-algebra of the projections and couplings found by exact max-flow.
/// Returns the first span with nontrivial common events. Incomplete: a
/// nullopt answer does not prove the systems are not bisimilar.
std::optional<StochasticSpan> search_stochastic_span(const MarkovKernel& k1, const MarkovKernel& k2,
                                                     std::size_t max_pairs = 16);

// Exhaustive checks of the relational bisimulation theorems.

struct SweepStats {
  std::size_t cases = 0;
  std::size_t bisimulations = 0;
  /// Cases inside the theorem's hypothesis (all cases for transition systems).
  std::size_t in_scope = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;

  bool operator==(const SweepStats&) const = default;
};

/// All pairs of n-state transition systems and all relations B: B is a
/// bisimulation iff some structure on B makes both projections morphisms, and
/// then the canonical mediator does so too. Parallel over system pairs.
SweepStats aczel_sweep(std::size_t n);
SweepStats aczel_sweep_serial(std::size_t n);

/// Same scheme for n-state upper-closed coalgebras whose families have at most
/// `max_generators` generators, over relations with full projections.
SweepStats upper_closed_sweep(std::size_t n, std::size_t max_generators);
SweepStats upper_closed_sweep_serial(std::size_t n, std::size_t max_generators);

/// Every upper-closed family on {0..n-1}, n <= 4.
std::vector<UpperClosedFamily> all_upper_closed_families(std::size_t n);

}  // namespace mgk
