#include "mgk/cli.hpp"

#include <CLI11.hpp>
#include <sstream>

#include "mgk/effectivity.hpp"
#include "mgk/errors.hpp"
#include "mgk/game.hpp"
#include "mgk/logic.hpp"
#include "mgk/model_io.hpp"
#include "mgk/monad.hpp"

namespace mgk::cli {

namespace {

struct Options {
  std::vector<std::string> models;
  std::string formula;
  bool game_formula = false;
  bool behavioral = false;
  std::string span;
  bool product = false;
  bool search = false;
  std::string action;
  std::string monad;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string game;
  std::string set;
  std::string q;
  unsigned denominator = 16;
  std::size_t depth = 8;
};

std::string format_map(const MeasurableMap& f) {
  std::string out;
  for (std::size_t x = 0; x < f.dom()->size(); ++x) {
    out += "  " + f.dom()->label(x) + " -> " + f.cod()->label(f(x)) + "\n";
  }
  return out;
}

std::string format_kernel(const MarkovKernel& k) {
  std::string out;
  for (std::size_t x = 0; x < k.dom()->size(); ++x) out += "  " + k.dom()->label(x) + ": " + k.row(x).format() + "\n";
  return out;
}

const MarkovKernel& pick_kernel(const ModelBundle& b, const std::string& action, const std::string& which) {
  if (action.empty()) {
    if (b.kripke.kernels.size() != 1) {
      throw InputError(which + " declares " + std::to_string(b.kripke.kernels.size()) +
                       " kernels; choose one with --action");
    }
    return b.kripke.kernels.begin()->second;
  }
  auto it = b.kripke.kernels.find(action);
  if (it == b.kripke.kernels.end()) throw InputError(which + " has no kernel '" + action + "'");
  return it->second;
}

int cmd_check(const Options& o, std::ostream& out) {
  const ModelBundle b = load_model(o.models.at(0));
  StateSet result = 0;
  if (o.game_formula) {
    EvalOptions eo;
    eo.star_depth = star_depth_from_env();
    result = eval_game_formula(b.game, *parse_game_formula(o.formula), eo);
  } else {
    result = validity_set(b.kripke, *parse_formula(o.formula));
  }
  out << b.space->format(result) << "\n";
  return kOk;
}

int cmd_equiv(const Options& o, std::ostream& out) {
  if (o.models.size() != 2) throw InputError("equiv needs exactly two --model options");
  const ModelBundle m1 = load_model(o.models[0]);
  const ModelBundle m2 = load_model(o.models[1]);
  if (!o.behavioral) {
    const bool eq = logically_equivalent(m1.kripke, m2.kripke);
    out << (eq ? "equivalent" : "not equivalent") << "\n";
    return eq ? kOk : kFalse;
  }
  const auto w = behavioral_witness(m1.kripke, m2.kripke);
  if (!w) {
    out << "not equivalent: no cospan\n";
    return kFalse;
  }
  out << "equivalent: cospan through " << w->mediator.space->size() << " classes\n";
  out << "mediator states: ";
  for (std::size_t i = 0; i < w->mediator.space->size(); ++i) out << (i ? ", " : "") << w->mediator.space->label(i);
  out << "\nleft:\n" << format_map(w->left) << "right:\n" << format_map(w->right);
  return kOk;
}

int cmd_bisim(const Options& o, std::ostream& out) {
  if (o.models.size() != 2) throw InputError("bisim needs exactly two --model options");
  const int modes = static_cast<int>(!o.span.empty()) + static_cast<int>(o.product) + static_cast<int>(o.search);
  if (modes != 1) throw InputError("bisim needs exactly one of --span, --product, --search");
  const ModelBundle m1 = load_model(o.models[0]);
  const ModelBundle m2 = load_model(o.models[1]);
  const MarkovKernel& k1 = pick_kernel(m1, o.action, o.models[0]);
  const MarkovKernel& k2 = pick_kernel(m2, o.action, o.models[1]);
  std::optional<StochasticSpan> span;
  if (!o.span.empty()) {
    span.emplace(load_span(o.span, k1, k2));
  } else if (o.product) {
    span.emplace(product_mediator(k1, k2));
  } else {
    span = search_stochastic_span(k1, k2);
    if (!span) {
      out << "no span found (the search is incomplete)\n";
      return kFalse;
    }
  }
  const SpanReport r = check_stochastic_span(*span);
  out << to_string(r.verdict);
  if (!r.reason.empty()) out << ": " << r.reason;
  out << "\n";
  if (r.common_events) {
    out << "common events:";
    for (StateSet blk : r.common_events->blocks()) out << " " << span->mediator.dom()->format(blk);
    out << "\n";
  }
  return r.verdict == SpanVerdict::bisimilar ? kOk : kFalse;
}

int cmd_laws(const Options& o, std::ostream& out) {
  const LawReport r = check_monad_laws(o.monad, o.trials, o.seed);
  out << r.format();
  return r.passed() ? kOk : kFalse;
}

int cmd_eff2kernel(const Options& o, std::ostream& out) {
  const ModelBundle b = load_model(o.models.at(0));
  const KernelRecovery r = kernel_from_eff(b.game.at(o.game), o.seed);
  if (!r.kernel) {
    out << "no kernel\n";
    for (const auto& d : r.diagnostics) out << "  " << d << "\n";
    return kFalse;
  }
  out << "kernel\n" << format_kernel(*r.kernel);
  return kOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const ModelBundle b = load_model(o.models.at(0));
  const GamePtr game = parse_game(o.game);
  StateSet a = 0;
  std::stringstream names(o.set);
  for (std::string label; std::getline(names, label, ',');) {
    if (label.empty()) continue;
    if (!b.space->has_label(label)) throw InputError("--set: unknown state '" + label + "'");
    a |= singleton(b.space->index_of(label));
  }
  const Rational q = parse_rational(o.q);
  if (q < 0 || q > 1) throw InputError("--q: threshold outside [0,1]");
  const StateSet brute = oracle_eval(b.game, *game, a, q, o.denominator, o.depth);
  EvalOptions eo;
  eo.star_depth = o.depth;
  const ThresholdFunction t = threshold_eval(b.game, *normalize(game), a, eo);
  const StateSet exact = t.evaluate(q);
  out << "oracle: " << b.space->format(brute) << "\n";
  out << "threshold: " << b.space->format(exact) << (t.any_approximate() ? " (approximate)" : "") << "\n";
  out << "agree: " << (brute == exact ? "yes" : "no") << "\n";
  return brute == exact ? kOk : kFalse;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-instance workbench for stochastic coalgebras, modal logic and game logic", "mgk"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "validity set of a formula");
  check->add_option("--model", o.models, "model file")->required()->expected(1);
  check->add_option("--formula", o.formula, "formula")->required();
  check->add_flag("--game", o.game_formula, "the formula uses game modalities");

  auto* equiv = app.add_subcommand("equiv", "logical equivalence of two models");
  equiv->add_option("--model", o.models, "model file (twice)")->required();
  equiv->add_flag("--behavioral", o.behavioral, "produce a verified cospan");

  auto* bisim = app.add_subcommand("bisim", "stochastic bisimulation through a span");
  bisim->add_option("--model", o.models, "model file (twice)")->required();
  bisim->add_option("--span", o.span, "span file");
  bisim->add_flag("--product", o.product, "use the product mediator");
  bisim->add_flag("--search", o.search, "search for a span (incomplete)");
  bisim->add_option("--action", o.action, "kernel to compare when a model has several");

  auto* laws = app.add_subcommand("laws", "randomized monad-law check");
  laws->add_option("--monad", o.monad, "powerset | upper_closed | discrete_prob")->required();
  laws->add_option("--trials", o.trials, "number of trials");
  laws->add_option("--seed", o.seed, "random seed");

  auto* eff = app.add_subcommand("eff2kernel", "recover a kernel from an effectivity function");
  eff->add_option("--model", o.models, "model file")->required()->expected(1);
  eff->add_option("--game", o.game, "atomic game")->required();
  eff->add_option("--seed", o.seed, "seed for the random probes");

  auto* oracle = app.add_subcommand("oracle", "brute-force game evaluation against the interval semantics");
  oracle->add_option("--model", o.models, "model file")->required()->expected(1);
  oracle->add_option("--game", o.game, "game")->required();
  oracle->add_option("--set", o.set, "target set, comma-separated states")->required();
  oracle->add_option("--q", o.q, "threshold")->required();
  oracle->add_option("--denominator", o.denominator, "grid denominator");
  oracle->add_option("--depth", o.depth, "iteration depth");

  std::vector<const char*> argv{"mgk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (check->parsed()) return cmd_check(o, out);
    if (equiv->parsed()) return cmd_equiv(o, out);
    if (bisim->parsed()) return cmd_bisim(o, out);
    if (laws->parsed()) return cmd_laws(o, out);
    if (eff->parsed()) return cmd_eff2kernel(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace mgk::cli
