#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hogibbs {

using VarId = std::uint32_t;

/// Joint state spaces larger than this are refused by the enumeration oracles.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

struct VariableSpec {
  VarId id = 0;
  int domain_size = 2;
};

/// An assignment of a value to every variable of a graph.
struct State {
  std::vector<int> values;

  State() = default;
  explicit State(std::vector<int> v) : values(std::move(v)) {}
  State(std::size_t n, int fill) : values(n, fill) {}

  std::size_t size() const { return values.size(); }
  int operator[](std::size_t i) const { return values[i]; }
  int& operator[](std::size_t i) { return values[i]; }
  std::span<const int> view() const { return values; }

  friend bool operator==(const State&, const State&) = default;
};

/// How a factor serializes: either a dense table or a named builtin.
struct FactorDescriptor {
  std::string builtin;  // empty for a plain table factor
  std::map<std::string, double> params;
  std::vector<double> table;  // populated for plain tables only
};

/// Energy function of one factor over an ordered scope. Energies are natural-log
/// unnormalized weights and must be finite.
class FactorFunction {
 public:
  virtual ~FactorFunction() = default;

  virtual double energy(std::span<const int> scope_values) const = 0;

  /// out[z] = energy(scope_values with scope_values[pos] := z). scope_values is
  /// restored before returning.
  virtual void local_energies(std::span<int> scope_values, std::size_t pos,
                              std::span<double> out) const;

  /// Factors whose energy depends on the scope only through additive integer
  /// statistics expose them here so chains can update them in O(1) per write.
  virtual std::size_t summary_size() const { return 0; }
  virtual void add_to_summary(std::size_t /*pos*/, int /*value*/,
                              std::int64_t /*sign*/,
                              std::span<std::int64_t> /*summary*/) const {}
  virtual double energy_from_summary(
      std::span<const std::int64_t> /*summary*/) const {
    return 0.0;
  }

  virtual FactorDescriptor descriptor() const = 0;
};

/// Dense row-major table; the last scope variable varies fastest.
class TableFactor final : public FactorFunction {
 public:
  TableFactor(std::vector<int> scope_domain_sizes, std::vector<double> table,
              std::string builtin = {}, std::map<std::string, double> params = {});

  double energy(std::span<const int> scope_values) const override;
  void local_energies(std::span<int> scope_values, std::size_t pos,
                      std::span<double> out) const override;
  FactorDescriptor descriptor() const override;

  const std::vector<int>& scope_domain_sizes() const { return domain_sizes_; }
  const std::vector<double>& table() const { return table_; }

 private:
  std::vector<int> domain_sizes_;
  std::vector<std::size_t> strides_;
  std::vector<double> table_;
  std::string builtin_;
  std::map<std::string, double> params_;
};

struct Factor {
  std::vector<VarId> scope;
  std::shared_ptr<const FactorFunction> function;

  double energy(std::span<const int> scope_values) const {
    return function->energy(scope_values);
  }
};

/// Where a variable appears: factor index and position inside that scope.
struct Incidence {
  std::uint32_t factor = 0;
  std::uint32_t position = 0;
};

/// Discrete factor graph defining pi(x) proportional to exp(sum_f energy_f(x)).
/// Immutable after construction.
class FactorGraph {
 public:
  FactorGraph() = default;
  FactorGraph(std::vector<VariableSpec> variables, std::vector<Factor> factors);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_factors() const { return factors_.size(); }
  const std::vector<VariableSpec>& variables() const { return variables_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const std::vector<int>& domain_sizes() const { return domain_sizes_; }
  int domain_size(VarId i) const { return domain_sizes_[i]; }
  int max_domain_size() const { return max_domain_; }
  std::size_t max_scope() const { return max_scope_; }

  std::span<const Incidence> incidences(VarId i) const {
    return {incidence_.data() + incidence_offsets_[i],
            incidence_offsets_[i + 1] - incidence_offsets_[i]};
  }

  /// Union of the scopes of factors containing i, minus i. Sorted.
  std::span<const VarId> markov_blanket(VarId i) const {
    return {blanket_.data() + blanket_offsets_[i],
            blanket_offsets_[i + 1] - blanket_offsets_[i]};
  }

  std::size_t max_blanket_size() const { return max_blanket_; }

  bool is_valid_state(std::span<const int> values) const;
  /// Throws ConfigError when values is not a state of this graph.
  void validate_state(std::span<const int> values) const;

  /// Number of joint states, saturating at UINT64_MAX.
  std::uint64_t joint_state_count() const;

 private:
  std::vector<VariableSpec> variables_;
  std::vector<Factor> factors_;
  std::vector<int> domain_sizes_;
  std::vector<std::size_t> incidence_offsets_;
  std::vector<Incidence> incidence_;
  std::vector<std::size_t> blanket_offsets_;
  std::vector<VarId> blanket_;
  int max_domain_ = 0;
  std::size_t max_scope_ = 0;
  std::size_t max_blanket_ = 0;
};

/// Mixed-radix index over a product of finite domains; the first variable is
/// the most significant digit.
class JointIndexer {
 public:
  JointIndexer() = default;
  explicit JointIndexer(std::vector<int> domain_sizes);

  std::uint64_t size() const { return size_; }
  const std::vector<int>& domain_sizes() const { return domain_sizes_; }
  std::uint64_t index(std::span<const int> values) const;
  void decode(std::uint64_t index, std::span<int> values) const;
  std::vector<int> decode(std::uint64_t index) const;

 private:
  std::vector<int> domain_sizes_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 1;
};

/// Probability table over a product space (joint or marginal).
struct JointDistribution {
  std::vector<int> domain_sizes;
  std::vector<double> probabilities;

  JointIndexer indexer() const { return JointIndexer(domain_sizes); }
  double probability(std::span<const int> values) const {
    return probabilities[indexer().index(values)];
  }
};

using ExactDistribution = JointDistribution;

/// Sample counts over a product space.
struct EmpiricalDistribution {
  std::vector<int> domain_sizes;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
  JointDistribution normalized() const;
  void merge(const EmpiricalDistribution& other);
};

/// Scratch buffers for conditional evaluation. One per thread.
struct ConditionalWorkspace {
  std::vector<int> scope_values;
  std::vector<double> energies;
  std::vector<std::int64_t> summary;

  explicit ConditionalWorkspace(const FactorGraph& graph);
};

/// In place: turns log-weights into a probability vector (max-subtracted).
void softmax_in_place(std::span<double> log_weights);

/// Index of the first z with u < p[0] + ... + p[z].
int sample_categorical(std::span<const double> probabilities, double u);

double energy(const FactorGraph& graph, std::span<const int> state);

/// Conditional of variable i given the other entries of view. Only factors
/// touching i are evaluated. out must have graph.domain_size(i) entries.
void conditional_into(const FactorGraph& graph, std::span<const int> view, VarId i,
                      ConditionalWorkspace& ws, std::span<double> out);

std::vector<double> conditional_distribution(const FactorGraph& graph,
                                             std::span<const int> state, VarId i);

ExactDistribution exact_distribution(const FactorGraph& graph,
                                     std::uint64_t cap = kDefaultEnumerationCap);

/// Marginal over subset, in subset order. At most 16 variables.
JointDistribution marginal(const JointDistribution& dist,
                           std::span<const VarId> subset);
EmpiricalDistribution marginal(const EmpiricalDistribution& dist,
                               std::span<const VarId> subset);

}  // namespace hogibbs
