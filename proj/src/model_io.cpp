#include "mgk/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mgk/errors.hpp"

namespace mgk {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw InputError(path + ": " + reason);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(join(path, key), "missing");
  return *it;
}

const json& object_at(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::size_t state_at(const SpaceRef& space, const std::string& label, const std::string& path) {
  if (!space->has_label(label)) fail(path, "unknown state '" + label + "'");
  return space->index_of(label);
}

Rational rational_at(const json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return parse_rational(string_at(j, path));
  } catch (const InputError& e) {
    if (std::string(e.what()).rfind(path, 0) == 0) throw;
    fail(path, e.what());
  }
}

StateSet state_list(const SpaceRef& space, const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of states");
  StateSet out = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out |= singleton(state_at(space, string_at(j[i], path), path));
  }
  return out;
}

SpaceRef space_from(const json& j, const std::string& path) {
  const json& states = member(j, "states", path);
  if (!states.is_array() || states.empty()) fail(join(path, "states"), "expected a nonempty list");
  std::vector<std::string> labels;
  for (const auto& s : states) labels.push_back(string_at(s, join(path, "states")));
  if (labels.size() > kMaxStates) fail(join(path, "states"), "at most 64 states are supported");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (labels[i] == labels[k]) fail(join(path, "states"), "duplicate state '" + labels[i] + "'");
    }
  }
  auto discrete = share(FinMeasurableSpace::discrete(labels));
  if (!j.contains("atoms")) return discrete;
  const std::string apath = join(path, "atoms");
  const json& atoms = j.at("atoms");
  if (!atoms.is_array()) fail(apath, "expected a list of state lists");
  std::vector<StateSet> blocks;
  for (const auto& block : atoms) blocks.push_back(state_list(discrete, block, apath));
  try {
    return share(FinMeasurableSpace(labels, Partition(labels.size(), blocks)));
  } catch (const InputError& e) {
    fail(apath, e.what());
  }
}

FinMeasure measure_from(const SpaceRef& space, const json& j, const std::string& path) {
  object_at(j, path);
  std::vector<Rational> weights(space->size());
  for (const auto& [label, value] : j.items()) {
    const std::string p = join(path, label);
    weights[state_at(space, label, p)] = rational_at(value, p);
  }
  try {
    return FinMeasure::from_state_weights(space, weights);
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

MarkovKernel kernel_from(const SpaceRef& dom, const SpaceRef& cod, const json& j, const std::string& path) {
  object_at(j, path);
  std::vector<std::optional<FinMeasure>> rows(dom->size());
  for (const auto& [label, row] : j.items()) {
    const std::string p = join(path, label);
    rows[state_at(dom, label, p)].emplace(measure_from(cod, row, p));
  }
  std::vector<FinMeasure> full;
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (!rows[x]) fail(join(path, dom->label(x)), "missing row");
    full.push_back(*rows[x]);
  }
  try {
    return MarkovKernel(dom, cod, std::move(full));
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

Portfolio portfolio_from(const SpaceRef& space, const json& j, const std::string& path) {
  const std::string kind = string_at(member(j, "kind", path), join(path, "kind"));
  const json& ms = member(j, "measures", path);
  const std::string mpath = join(path, "measures");
  if (!ms.is_array() || ms.empty()) fail(mpath, "expected a nonempty list of measures");
  std::vector<FinMeasure> measures;
  for (std::size_t i = 0; i < ms.size(); ++i) measures.push_back(measure_from(space, ms[i], join(mpath, std::to_string(i))));
  if (kind == "kernel") {
    if (measures.size() != 1) fail(mpath, "a kernel portfolio has exactly one measure");
    return Portfolio::kernel_generated(measures.front());
  }
  if (kind == "generators") return Portfolio::finitely_generated(std::move(measures));
  fail(join(path, "kind"), "expected \"kernel\" or \"generators\"");
}

MeasurableMap map_from(const SpaceRef& dom, const SpaceRef& cod, const json& j, const std::string& path) {
  object_at(j, path);
  std::vector<std::optional<std::size_t>> table(dom->size());
  for (const auto& [label, target] : j.items()) {
    const std::string p = join(path, label);
    table[state_at(dom, label, p)] = state_at(cod, string_at(target, p), p);
  }
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < table.size(); ++x) {
    if (!table[x]) fail(join(path, dom->label(x)), "missing image");
    out.push_back(*table[x]);
  }
  MeasurableMap f(dom, cod, std::move(out));
  if (!check_measurable(f)) fail(path, "map is not measurable");
  return f;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ModelBundle parse_model(const std::string& json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) fail("(root)", "expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "space" && key != "kernels" && key != "valuations" && key != "portfolios" && key != "transitions") {
      fail(key, "unknown key");
    }
  }
  ModelBundle out;
  out.space = space_from(member(doc, "space", ""), "space");
  out.kripke.space = out.space;
  out.game.space = out.space;

  if (doc.contains("kernels")) {
    for (const auto& [name, rows] : object_at(doc["kernels"], "kernels").items()) {
      out.kripke.kernels.emplace(name, kernel_from(out.space, out.space, rows, join("kernels", name)));
    }
  }
  if (doc.contains("valuations")) {
    for (const auto& [name, states] : object_at(doc["valuations"], "valuations").items()) {
      const std::string p = join("valuations", name);
      const StateSet v = state_list(out.space, states, p);
      if (!out.space->is_measurable(v)) fail(p, "set " + out.space->format(v) + " is not measurable");
      out.kripke.valuations.emplace(name, v);
    }
  }
  out.game.valuations = out.kripke.valuations;
  if (doc.contains("portfolios")) {
    for (const auto& [name, per_state] : object_at(doc["portfolios"], "portfolios").items()) {
      const std::string p = join("portfolios", name);
      std::vector<std::optional<Portfolio>> ports(out.space->size());
      for (const auto& [label, spec] : object_at(per_state, p).items()) {
        const std::string sp = join(p, label);
        ports[state_at(out.space, label, sp)].emplace(portfolio_from(out.space, spec, sp));
      }
      std::vector<Portfolio> full;
      for (std::size_t s = 0; s < ports.size(); ++s) {
        if (!ports[s]) fail(join(p, out.space->label(s)), "missing portfolio");
        full.push_back(*ports[s]);
      }
      try {
        out.game.effectivity.emplace(name, EffectivityFunction(out.space, std::move(full)));
      } catch (const InputError& e) {
        fail(p, e.what());
      }
    }
  }
  for (const auto& [name, k] : out.kripke.kernels) {
    if (!out.game.effectivity.contains(name)) out.game.effectivity.emplace(name, eff_from_kernel(k));
  }
  if (doc.contains("transitions")) {
    for (const auto& [name, succ] : object_at(doc["transitions"], "transitions").items()) {
      const std::string p = join("transitions", name);
      TransitionSystem ts{out.space->labels(), std::vector<StateSet>(out.space->size(), 0)};
      for (const auto& [label, targets] : object_at(succ, p).items()) {
        const std::string sp = join(p, label);
        ts.succ[state_at(out.space, label, sp)] = state_list(out.space, targets, sp);
      }
      out.transitions.emplace(name, std::move(ts));
    }
  }
  out.kripke.validate();
  out.game.validate();
  return out;
}

ModelBundle load_model(const std::filesystem::path& path) {
  try {
    return parse_model(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

StochasticSpan parse_span(const std::string& json_text, const MarkovKernel& k1, const MarkovKernel& k2) {
  const json doc = parse_json(json_text);
  const SpaceRef dom = space_from(member(doc, "domain", ""), "domain");
  const SpaceRef cod = doc.contains("codomain") ? space_from(doc["codomain"], "codomain") : dom;
  MarkovKernel mediator = kernel_from(dom, cod, member(doc, "kernel", ""), "kernel");
  const json& legs = member(doc, "legs", "");
  return StochasticSpan{k1,
                        k2,
                        std::move(mediator),
                        map_from(dom, k1.dom(), member(legs, "f1", "legs"), "legs.f1"),
                        map_from(cod, k1.cod(), member(legs, "g1", "legs"), "legs.g1"),
                        map_from(dom, k2.dom(), member(legs, "f2", "legs"), "legs.f2"),
                        map_from(cod, k2.cod(), member(legs, "g2", "legs"), "legs.g2")};
}

StochasticSpan load_span(const std::filesystem::path& path, const MarkovKernel& k1, const MarkovKernel& k2) {
  try {
    return parse_span(read_file(path), k1, k2);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace mgk
