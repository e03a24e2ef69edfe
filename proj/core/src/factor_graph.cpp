#include "hogibbs/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hogibbs/errors.hpp"

namespace hogibbs {

void FactorFunction::local_energies(std::span<int> scope_values, std::size_t pos,
                                    std::span<double> out) const {
  const int saved = scope_values[pos];
  for (std::size_t z = 0; z < out.size(); ++z) {
    scope_values[pos] = static_cast<int>(z);
    out[z] = energy(scope_values);
  }
  scope_values[pos] = saved;
}

TableFactor::TableFactor(std::vector<int> scope_domain_sizes,
                         std::vector<double> table, std::string builtin,
                         std::map<std::string, double> params)
    : domain_sizes_(std::move(scope_domain_sizes)),
      table_(std::move(table)),
      builtin_(std::move(builtin)),
      params_(std::move(params)) {
  std::size_t expected = 1;
  strides_.assign(domain_sizes_.size(), 1);
  for (std::size_t k = domain_sizes_.size(); k-- > 0;) {
    if (domain_sizes_[k] < 2) {
      throw ConfigError("table factor domain sizes must be >= 2");
    }
    strides_[k] = expected;
    expected *= static_cast<std::size_t>(domain_sizes_[k]);
  }
  if (table_.size() != expected) {
    throw ConfigError("table has " + std::to_string(table_.size()) +
                      " entries, scope needs " + std::to_string(expected));
  }
  for (double e : table_) {
    if (!std::isfinite(e)) throw ConfigError("factor energies must be finite");
  }
}

double TableFactor::energy(std::span<const int> scope_values) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < strides_.size(); ++k) {
    idx += strides_[k] * static_cast<std::size_t>(scope_values[k]);
  }
  return table_[idx];
}

void TableFactor::local_energies(std::span<int> scope_values, std::size_t pos,
                                 std::span<double> out) const {
  std::size_t base = 0;
  for (std::size_t k = 0; k < strides_.size(); ++k) {
    if (k != pos) base += strides_[k] * static_cast<std::size_t>(scope_values[k]);
  }
  const std::size_t stride = strides_[pos];
  for (std::size_t z = 0; z < out.size(); ++z) out[z] = table_[base + z * stride];
}

FactorDescriptor TableFactor::descriptor() const {
  FactorDescriptor d;
  d.builtin = builtin_;
  d.params = params_;
  if (builtin_.empty()) d.table = table_;
  return d;
}

FactorGraph::FactorGraph(std::vector<VariableSpec> variables,
                         std::vector<Factor> factors)
    : variables_(std::move(variables)), factors_(std::move(factors)) {
  const std::size_t n = variables_.size();
  std::sort(variables_.begin(), variables_.end(),
            [](const VariableSpec& a, const VariableSpec& b) { return a.id < b.id; });
  domain_sizes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (variables_[i].id != i) {
      throw ConfigError("variable ids must be exactly 0..n-1");
    }
    if (variables_[i].domain_size < 2) {
      throw ConfigError("variable " + std::to_string(i) + " has domain size < 2");
    }
    domain_sizes_[i] = variables_[i].domain_size;
    max_domain_ = std::max(max_domain_, domain_sizes_[i]);
  }

  std::vector<std::size_t> degree(n, 0);
  for (const Factor& f : factors_) {
    if (!f.function) throw ConfigError("factor without an energy function");
    std::vector<VarId> sorted = f.scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("factor scope has repeated variables");
    }
    for (VarId v : f.scope) {
      if (v >= n) throw ConfigError("factor scope references unknown variable");
      ++degree[v];
    }
    if (auto* table = dynamic_cast<const TableFactor*>(f.function.get())) {
      const auto& ds = table->scope_domain_sizes();
      if (ds.size() != f.scope.size()) {
        throw ConfigError("table arity does not match scope length");
      }
      for (std::size_t k = 0; k < ds.size(); ++k) {
        if (ds[k] != domain_sizes_[f.scope[k]]) {
          throw ConfigError("table domain does not match variable domain");
        }
      }
    }
    max_scope_ = std::max(max_scope_, f.scope.size());
  }

  incidence_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    incidence_offsets_[i + 1] = incidence_offsets_[i] + degree[i];
  }
  incidence_.resize(incidence_offsets_[n]);
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
    const auto& scope = factors_[fi].scope;
    for (std::size_t k = 0; k < scope.size(); ++k) {
      incidence_[fill[scope[k]]++] = {static_cast<std::uint32_t>(fi),
                                      static_cast<std::uint32_t>(k)};
    }
  }

  blanket_offsets_.assign(n + 1, 0);
  std::vector<VarId> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.clear();
    for (const Incidence& inc : incidences(static_cast<VarId>(i))) {
      for (VarId v : factors_[inc.factor].scope) {
        if (v != i) scratch.push_back(v);
      }
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    blanket_.insert(blanket_.end(), scratch.begin(), scratch.end());
    blanket_offsets_[i + 1] = blanket_.size();
    max_blanket_ = std::max(max_blanket_, scratch.size());
  }
}

bool FactorGraph::is_valid_state(std::span<const int> values) const {
  if (values.size() != num_variables()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0 || values[i] >= domain_sizes_[i]) return false;
  }
  return true;
}

void FactorGraph::validate_state(std::span<const int> values) const {
  if (values.size() != num_variables()) {
    throw ConfigError("state has " + std::to_string(values.size()) +
                      " entries, graph has " + std::to_string(num_variables()));
  }
  if (!is_valid_state(values)) throw ConfigError("state value out of domain");
}

std::uint64_t FactorGraph::joint_state_count() const {
  std::uint64_t total = 1;
  for (int d : domain_sizes_) {
    if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(d)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= static_cast<std::uint64_t>(d);
  }
  return total;
}

JointIndexer::JointIndexer(std::vector<int> domain_sizes)
    : domain_sizes_(std::move(domain_sizes)), strides_(domain_sizes_.size(), 1) {
  size_ = 1;
  for (std::size_t k = domain_sizes_.size(); k-- > 0;) {
    strides_[k] = size_;
    const auto d = static_cast<std::uint64_t>(domain_sizes_[k]);
    if (size_ > std::numeric_limits<std::uint64_t>::max() / d) {
      throw StateSpaceTooLarge("joint index overflows 64 bits");
    }
    size_ *= d;
  }
}

std::uint64_t JointIndexer::index(std::span<const int> values) const {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < strides_.size(); ++k) {
    idx += strides_[k] * static_cast<std::uint64_t>(values[k]);
  }
  return idx;
}

void JointIndexer::decode(std::uint64_t index, std::span<int> values) const {
  for (std::size_t k = 0; k < strides_.size(); ++k) {
    values[k] = static_cast<int>(index / strides_[k]);
    index %= strides_[k];
  }
}

std::vector<int> JointIndexer::decode(std::uint64_t index) const {
  std::vector<int> values(domain_sizes_.size());
  decode(index, values);
  return values;
}

std::uint64_t EmpiricalDistribution::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

JointDistribution EmpiricalDistribution::normalized() const {
  JointDistribution out{domain_sizes, std::vector<double>(counts.size(), 0.0)};
  const double t = static_cast<double>(total());
  if (t == 0) return out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out.probabilities[k] = static_cast<double>(counts[k]) / t;
  }
  return out;
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
  if (counts.empty()) {
    *this = other;
    return;
  }
  if (other.domain_sizes != domain_sizes) {
    throw DimensionMismatch("cannot merge histograms over different spaces");
  }
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
}

ConditionalWorkspace::ConditionalWorkspace(const FactorGraph& graph)
    : scope_values(graph.max_scope()),
      energies(static_cast<std::size_t>(std::max(graph.max_domain_size(), 2))),
      summary(4) {}

void softmax_in_place(std::span<double> log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double sum = 0.0;
  for (double& w : log_weights) {
    w = std::exp(w - top);
    sum += w;
  }
  for (double& w : log_weights) w /= sum;
}

int sample_categorical(std::span<const double> probabilities, double u) {
  double acc = 0.0;
  const int last = static_cast<int>(probabilities.size()) - 1;
  for (int z = 0; z < last; ++z) {
    acc += probabilities[z];
    if (u < acc) return z;
  }
  return last;
}

double energy(const FactorGraph& graph, std::span<const int> state) {
  std::vector<int> scratch(graph.max_scope());
  double total = 0.0;
  for (const Factor& f : graph.factors()) {
    for (std::size_t k = 0; k < f.scope.size(); ++k) scratch[k] = state[f.scope[k]];
    total += f.energy(std::span<const int>(scratch.data(), f.scope.size()));
  }
  return total;
}

void conditional_into(const FactorGraph& graph, std::span<const int> view, VarId i,
                      ConditionalWorkspace& ws, std::span<double> out) {
  const std::size_t d = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (ws.energies.size() < d) ws.energies.resize(d);
  std::span<double> local(ws.energies.data(), d);
  for (const Incidence& inc : graph.incidences(i)) {
    const Factor& f = graph.factors()[inc.factor];
    const FactorFunction& fn = *f.function;
    const std::size_t m = fn.summary_size();
    if (m > 0) {
      if (ws.summary.size() < m) ws.summary.resize(m);
      std::span<std::int64_t> summary(ws.summary.data(), m);
      std::fill(summary.begin(), summary.end(), 0);
      for (std::size_t k = 0; k < f.scope.size(); ++k) {
        if (k != inc.position) fn.add_to_summary(k, view[f.scope[k]], 1, summary);
      }
      for (std::size_t z = 0; z < d; ++z) {
        fn.add_to_summary(inc.position, static_cast<int>(z), 1, summary);
        out[z] += fn.energy_from_summary(summary);
        fn.add_to_summary(inc.position, static_cast<int>(z), -1, summary);
      }
    } else {
      std::span<int> scope_values(ws.scope_values.data(), f.scope.size());
      for (std::size_t k = 0; k < f.scope.size(); ++k) scope_values[k] = view[f.scope[k]];
      fn.local_energies(scope_values, inc.position, local);
      for (std::size_t z = 0; z < d; ++z) out[z] += local[z];
    }
  }
  softmax_in_place(out);
}

std::vector<double> conditional_distribution(const FactorGraph& graph,
                                             std::span<const int> state, VarId i) {
  graph.validate_state(state);
  if (i >= graph.num_variables()) throw ConfigError("variable id out of range");
  ConditionalWorkspace ws(graph);
  std::vector<double> out(static_cast<std::size_t>(graph.domain_size(i)));
  conditional_into(graph, state, i, ws, out);
  return out;
}

ExactDistribution exact_distribution(const FactorGraph& graph, std::uint64_t cap) {
  const std::uint64_t count = graph.joint_state_count();
  if (count > cap) {
    throw StateSpaceTooLarge(std::to_string(count) + " joint states exceed cap " +
                             std::to_string(cap));
  }
  ExactDistribution dist{graph.domain_sizes(), std::vector<double>(count)};
  const JointIndexer indexer(graph.domain_sizes());
  std::vector<int> values(graph.num_variables());
  for (std::uint64_t k = 0; k < count; ++k) {
    indexer.decode(k, values);
    dist.probabilities[k] = energy(graph, values);
  }
  softmax_in_place(dist.probabilities);
  return dist;
}

namespace {

template <typename Mass>
std::vector<Mass> marginalize(const std::vector<int>& domain_sizes,
                              const std::vector<Mass>& mass,
                              std::span<const VarId> subset,
                              std::vector<int>& out_domains) {
  if (subset.size() > 16) throw ConfigError("marginal subsets are limited to 16 variables");
  out_domains.clear();
  for (VarId v : subset) {
    if (v >= domain_sizes.size()) throw ConfigError("marginal subset id out of range");
    out_domains.push_back(domain_sizes[v]);
  }
  const JointIndexer full(domain_sizes);
  const JointIndexer part(out_domains);
  std::vector<Mass> out(part.size(), Mass{});
  std::vector<int> values(domain_sizes.size());
  std::vector<int> sub(subset.size());
  for (std::uint64_t k = 0; k < full.size(); ++k) {
    if (mass[k] == Mass{}) continue;
    full.decode(k, values);
    for (std::size_t s = 0; s < subset.size(); ++s) sub[s] = values[subset[s]];
    out[part.index(sub)] += mass[k];
  }
  return out;
}

}  // namespace

JointDistribution marginal(const JointDistribution& dist,
                           std::span<const VarId> subset) {
  JointDistribution out;
  out.probabilities =
      marginalize(dist.domain_sizes, dist.probabilities, subset, out.domain_sizes);
  return out;
}

EmpiricalDistribution marginal(const EmpiricalDistribution& dist,
                               std::span<const VarId> subset) {
  EmpiricalDistribution out;
  out.counts = marginalize(dist.domain_sizes, dist.counts, subset, out.domain_sizes);
  return out;
}

}  // namespace hogibbs
