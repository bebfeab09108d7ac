#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace exch {

using NodeSet = std::set<std::string>;
using Edge = std::pair<std::string, std::string>;

/*!
 * Immutable directed acyclic graph over case-sensitive string labels.
 *
 * Construction validates the node list (distinct labels), the edge list (no
 * self-loops, no duplicates, endpoints declared) and acyclicity. Nodes keep
 * their declaration order; queries are pure.
 */
class Dag {
 public:
  Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::vector<Edge> edges() const;
  std::size_t size() const noexcept { return nodes_.size(); }

  bool contains(std::string_view label) const noexcept;
  bool has_edge(std::string_view parent, std::string_view child) const;
  /// Index of a label; throws unknown-node.
  std::size_t index_of(std::string_view label) const;

  const std::vector<std::size_t>& parents(std::size_t v) const { return parents_[v]; }
  const std::vector<std::size_t>& children(std::size_t v) const { return children_[v]; }

  /// Nodes in a topological order (parents before children).
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

  /// Strict descendants of `label`.
  NodeSet descendants(std::string_view label) const;
  /// Nodes of `seeds` together with all their ancestors.
  std::vector<bool> ancestral_closure(const std::vector<std::size_t>& seeds) const;

  /// Copy without the listed edges; edges that are absent are ignored.
  Dag without_edges(const std::vector<Edge>& removed) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

inline Dag dag_new(std::vector<std::string> nodes, const std::vector<Edge>& edges) {
  return Dag(std::move(nodes), edges);
}

/// Names accepted by builtin_figure.
std::vector<std::string> builtin_figure_names();

/*!
 * Causal diagrams from the point-treatment and two-time-point examples.
 *
 *   fig1_E        X -> Y, U -> X, U -> Y, Z -> Y (treatment effect)
 *   fig1_O        fig1_E plus X -> Z
 *   fig2_E        Z1 -> X, Z1 -> Z2, U -> X, U -> Y, and the treatment-effect
 *                 arrows Z1 -> Y, Z2 -> Y, X -> Y
 *   fig2_O        fig2_E plus X -> Z2
 *   fig2_null_alt fig2_E without Z1 -> X; X -> Y is not a treatment-effect
 *                 arrow here and survives `under_null`
 *
 * With `under_null` the treatment-effect arrows are dropped.
 */
Dag builtin_figure(std::string_view name, bool under_null = false);

/// True iff `given` d-separates `a` from `b`, decided on the moralized
/// ancestral graph of a ∪ b ∪ given.
bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& given);

struct BackdoorVerdict {
  bool satisfied = false;
  /// Empty when satisfied; otherwise a one-line explanation.
  std::string reason;
};

BackdoorVerdict backdoor_check(const Dag& g, std::string_view treatment, std::string_view outcome,
                               const NodeSet& adjust);

inline bool backdoor_satisfied(const Dag& g, std::string_view treatment,
                               std::string_view outcome, const NodeSet& adjust) {
  return backdoor_check(g, treatment, outcome, adjust).satisfied;
}

/// Parses the line-oriented `parent -> child` format. `#` starts a comment;
/// a line holding a single label declares an isolated node. Node order is
/// first appearance. Throws parse-error with the line number.
Dag parse_dag_text(std::string_view text);

}  // namespace exch
