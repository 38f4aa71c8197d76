#include "mgk/prob.hpp"

#include "mgk/errors.hpp"

namespace mgk {

namespace {

void require_same(const SpaceRef& a, const SpaceRef& b, const char* what) {
  if (!same_space(a, b)) throw InputError(std::string("space mismatch: ") + what);
}

std::vector<Rational> compose_row(const MarkovKernel& l, const FinMeasure& kx) {
  const auto& mid = *l.dom();
  std::vector<Rational> out(l.cod()->atom_count(), Rational(0));
  for (std::size_t k = 0; k < mid.atom_count(); ++k) {
    const Rational& w = kx.weight(k);
    if (w == 0) continue;
    const FinMeasure& ly = l.row(lowest(mid.atom(k)));
    for (std::size_t z = 0; z < out.size(); ++z) out[z] += w * ly.weight(z);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- FinMeasure

FinMeasure::FinMeasure(SpaceRef space, std::vector<Rational> atom_weights)
    : space_(std::move(space)), weights_(std::move(atom_weights)) {
  if (!space_) throw InputError("measure without a space");
  if (weights_.size() != space_->atom_count()) throw InputError("measure needs one weight per atom");
  Rational total(0);
  for (const auto& w : weights_) {
    if (w < 0) throw InputError("negative weight " + to_string(w));
    total += w;
  }
  if (total != 1) throw InputError("weights sum to " + to_string(total) + ", not 1");
}

FinMeasure FinMeasure::from_state_weights(SpaceRef space, const std::vector<Rational>& state_weights) {
  if (state_weights.size() != space->size()) throw InputError("measure needs one weight per state");
  std::vector<Rational> atoms(space->atom_count(), Rational(0));
  for (std::size_t x = 0; x < state_weights.size(); ++x) atoms[space->atom_of(x)] += state_weights[x];
  return FinMeasure(std::move(space), std::move(atoms));
}

Rational FinMeasure::operator()(StateSet a) const {
  if (!space_->is_measurable(a)) throw InputError("measure applied to non-measurable set " + space_->format(a));
  Rational out(0);
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if ((space_->atom(k) & a) != 0) out += weights_[k];
  }
  return out;
}

std::string FinMeasure::format() const {
  std::string out = "{";
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (k > 0) out += ", ";
    out += space_->format(space_->atom(k)) + ": " + to_string(weights_[k]);
  }
  return out + "}";
}

bool FinMeasure::operator==(const FinMeasure& other) const {
  return same_space(space_, other.space_) && weights_ == other.weights_;
}

// ----------------------------------------------------------- BoundedFunction

BoundedFunction::BoundedFunction(SpaceRef space, std::vector<Rational> atom_values)
    : space_(std::move(space)), values_(std::move(atom_values)) {
  if (!space_ || values_.size() != space_->atom_count()) {
    throw InputError("bounded function needs one value per atom");
  }
}

BoundedFunction BoundedFunction::constant(SpaceRef space, const Rational& value) {
  const std::size_t n = space->atom_count();
  return BoundedFunction(std::move(space), std::vector<Rational>(n, value));
}

BoundedFunction BoundedFunction::indicator(SpaceRef space, StateSet a) {
  if (!space->is_measurable(a)) throw InputError("indicator of non-measurable set " + space->format(a));
  std::vector<Rational> v(space->atom_count());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (space->atom(k) & a) != 0 ? 1 : 0;
  return BoundedFunction(std::move(space), std::move(v));
}

BoundedFunction BoundedFunction::operator+(const BoundedFunction& other) const {
  require_same(space_, other.space_, "sum of bounded functions");
  std::vector<Rational> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] + other.values_[k];
  return BoundedFunction(space_, std::move(v));
}

BoundedFunction BoundedFunction::scaled(const Rational& c) const {
  std::vector<Rational> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = c * values_[k];
  return BoundedFunction(space_, std::move(v));
}

bool BoundedFunction::operator==(const BoundedFunction& other) const {
  return same_space(space_, other.space_) && values_ == other.values_;
}

// ------------------------------------------------------------------ LinPred

Rational LinPred::lhs(const FinMeasure& mu) const {
  require_same(space, mu.space(), "linear predicate");
  Rational out(0);
  for (std::size_t k = 0; k < coefficients.size(); ++k) out += coefficients[k] * mu.weight(k);
  return out;
}

bool LinPred::operator()(const FinMeasure& mu) const {
  const Rational v = lhs(mu);
  return strict ? v > bound : v >= bound;
}

std::string LinPred::format() const {
  std::string out;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (coefficients[k] == 0) continue;
    if (!out.empty()) out += " + ";
    out += to_string(coefficients[k]) + "*mu" + space->format(space->atom(k));
  }
  if (out.empty()) out = "0";
  return out + (strict ? " > " : " >= ") + to_string(bound);
}

LinPred beta(const SpaceRef& space, StateSet a, const Rational& q, bool strict) {
  return LinPred{space, BoundedFunction::indicator(space, a).values(), q, strict};
}

FinMeasure dirac(const SpaceRef& space, std::size_t x) {
  if (x >= space->size()) throw InputError("unknown state index " + std::to_string(x));
  std::vector<Rational> w(space->atom_count(), Rational(0));
  w[space->atom_of(x)] = 1;
  return FinMeasure(space, std::move(w));
}

// ------------------------------------------------------------- MarkovKernel

MarkovKernel::MarkovKernel(SpaceRef dom, SpaceRef cod, std::vector<FinMeasure> rows)
    : dom_(std::move(dom)), cod_(std::move(cod)), rows_(std::move(rows)) {
  if (!dom_ || !cod_) throw InputError("kernel without domain or codomain");
  if (rows_.size() != dom_->size()) throw InputError("kernel needs one row per state");
  for (std::size_t x = 0; x < rows_.size(); ++x) {
    if (!same_space(rows_[x].space(), cod_)) throw InputError("kernel row " + dom_->label(x) + " on the wrong space");
    const std::size_t rep = lowest(dom_->atom(dom_->atom_of(x)));
    if (!(rows_[x] == rows_[rep])) {
      throw InputError("kernel rows of " + dom_->label(rep) + " and " + dom_->label(x) +
                       " differ inside one atom (kernel not measurable)");
    }
  }
}

FinMeasure MarkovKernel::lift(const FinMeasure& mu) const {
  require_same(dom_, mu.space(), "kernel lift");
  std::vector<Rational> out(cod_->atom_count(), Rational(0));
  for (std::size_t k = 0; k < dom_->atom_count(); ++k) {
    const Rational& w = mu.weight(k);
    if (w == 0) continue;
    const FinMeasure& r = rows_[lowest(dom_->atom(k))];
    for (std::size_t z = 0; z < out.size(); ++z) out[z] += w * r.weight(z);
  }
  return FinMeasure(cod_, std::move(out));
}

bool MarkovKernel::operator==(const MarkovKernel& other) const {
  return same_space(dom_, other.dom_) && same_space(cod_, other.cod_) && rows_ == other.rows_;
}

MarkovKernel dirac_kernel(const SpaceRef& space) {
  std::vector<FinMeasure> rows;
  rows.reserve(space->size());
  for (std::size_t x = 0; x < space->size(); ++x) rows.push_back(dirac(space, x));
  return MarkovKernel(space, space, std::move(rows));
}

MarkovKernel deterministic_kernel(const MeasurableMap& f) {
  if (!check_measurable(f)) throw InputError("deterministic kernel of a non-measurable map");
  std::vector<FinMeasure> rows;
  rows.reserve(f.dom()->size());
  for (std::size_t x = 0; x < f.dom()->size(); ++x) rows.push_back(dirac(f.cod(), f(x)));
  return MarkovKernel(f.dom(), f.cod(), std::move(rows));
}

FinMeasure image_measure(const MeasurableMap& f, const FinMeasure& mu) {
  require_same(f.dom(), mu.space(), "image measure");
  const auto& cod = *f.cod();
  std::vector<Rational> out(cod.atom_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const StateSet pre = f.preimage(cod.atom(k));
    if (!f.dom()->is_measurable(pre)) throw InputError("image measure along a non-measurable map");
    out[k] = mu(pre);
  }
  return FinMeasure(f.cod(), std::move(out));
}

Rational integrate(const BoundedFunction& f, const FinMeasure& mu) {
  require_same(f.space(), mu.space(), "integral");
  Rational out(0);
  for (std::size_t k = 0; k < f.values().size(); ++k) out += f.values()[k] * mu.weight(k);
  return out;
}

std::function<FinMeasure(const FinMeasure&)> lift_kernel(const MarkovKernel& k) {
  return [k](const FinMeasure& mu) { return k.lift(mu); };
}

TransportResult integral_transport(const BoundedFunction& f, const MarkovKernel& k, const FinMeasure& mu) {
  require_same(f.space(), k.cod(), "integrand against kernel codomain");
  require_same(mu.space(), k.dom(), "measure against kernel domain");
  std::vector<Rational> inner(k.dom()->atom_count());
  for (std::size_t a = 0; a < inner.size(); ++a) inner[a] = integrate(f, k.row(lowest(k.dom()->atom(a))));
  BoundedFunction g(k.dom(), std::move(inner));
  return TransportResult{integrate(f, k.lift(mu)), integrate(g, mu), std::move(g)};
}

MarkovKernel kleisli_compose(const MarkovKernel& l, const MarkovKernel& k) {
  require_same(k.cod(), l.dom(), "Kleisli composition");
  const auto n = static_cast<std::ptrdiff_t>(k.dom()->size());
  std::vector<std::vector<Rational>> weights(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t x = 0; x < n; ++x) {
    weights[static_cast<std::size_t>(x)] = compose_row(l, k.row(static_cast<std::size_t>(x)));
  }
  std::vector<FinMeasure> rows;
  rows.reserve(weights.size());
  for (auto& w : weights) rows.emplace_back(l.cod(), std::move(w));
  return MarkovKernel(k.dom(), l.cod(), std::move(rows));
}

MarkovKernel kleisli_compose_serial(const MarkovKernel& l, const MarkovKernel& k) {
  require_same(k.cod(), l.dom(), "Kleisli composition");
  std::vector<FinMeasure> rows;
  rows.reserve(k.dom()->size());
  for (std::size_t x = 0; x < k.dom()->size(); ++x) rows.emplace_back(l.cod(), compose_row(l, k.row(x)));
  return MarkovKernel(k.dom(), l.cod(), std::move(rows));
}

}  // namespace mgk
