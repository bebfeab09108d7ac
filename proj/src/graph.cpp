#include "exch/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "exch/error.hpp"

namespace exch {

Dag::Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges)
    : nodes_(std::move(nodes)), parents_(nodes_.size()), children_(nodes_.size()) {
  {
    std::set<std::string_view> seen;
    for (const auto& n : nodes_) {
      if (n.empty()) throw Error(ErrorCode::InvalidParameter, "empty node label");
      if (!seen.insert(n).second) {
        throw Error(ErrorCode::InvalidParameter, "duplicate node label '" + n + "'");
      }
    }
  }
  for (const auto& [p, c] : edges) {
    const std::size_t pi = index_of(p);
    const std::size_t ci = index_of(c);
    if (pi == ci) throw Error(ErrorCode::CycleDetected, "self-loop on '" + p + "'");
    if (std::find(children_[pi].begin(), children_[pi].end(), ci) != children_[pi].end()) {
      throw Error(ErrorCode::DuplicateEdge, "duplicate edge " + p + " -> " + c);
    }
    children_[pi].push_back(ci);
    parents_[ci].push_back(pi);
  }

  // Kahn's algorithm, lowest declared index first so the order is stable.
  std::vector<std::size_t> indegree(nodes_.size());
  for (std::size_t v = 0; v < nodes_.size(); ++v) indegree[v] = parents_[v].size();
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (indegree[v] == 0) ready.insert(v);
  }
  while (!ready.empty()) {
    const std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(v);
    for (std::size_t c : children_[v]) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (topo_.size() != nodes_.size()) {
    std::string msg = "cycle detected among:";
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      if (indegree[v] > 0) msg += " " + nodes_[v];
    }
    throw Error(ErrorCode::CycleDetected, msg);
  }
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    for (std::size_t c : children_[p]) out.emplace_back(nodes_[p], nodes_[c]);
  }
  return out;
}

bool Dag::contains(std::string_view label) const noexcept {
  return std::find(nodes_.begin(), nodes_.end(), label) != nodes_.end();
}

std::size_t Dag::index_of(std::string_view label) const {
  const auto it = std::find(nodes_.begin(), nodes_.end(), label);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool Dag::has_edge(std::string_view parent, std::string_view child) const {
  const auto& ch = children_[index_of(parent)];
  return std::find(ch.begin(), ch.end(), index_of(child)) != ch.end();
}

NodeSet Dag::descendants(std::string_view label) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<std::size_t> queue{index_of(label)};
  NodeSet out;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t c : children_[v]) {
      if (!seen[c]) {
        seen[c] = true;
        out.insert(nodes_[c]);
        queue.push_back(c);
      }
    }
  }
  return out;
}

std::vector<bool> Dag::ancestral_closure(const std::vector<std::size_t>& seeds) const {
  std::vector<bool> in(nodes_.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t s : seeds) {
    if (!in[s]) {
      in[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t p : parents_[v]) {
      if (!in[p]) {
        in[p] = true;
        queue.push_back(p);
      }
    }
  }
  return in;
}

Dag Dag::without_edges(const std::vector<Edge>& removed) const {
  std::vector<Edge> kept;
  for (auto& e : edges()) {
    if (std::find(removed.begin(), removed.end(), e) == removed.end()) kept.push_back(e);
  }
  return Dag(nodes_, kept);
}

namespace {

struct FigureSpec {
  std::vector<std::string> nodes;
  std::vector<Edge> structural;
  std::vector<Edge> effect;  // dropped under the null
};

FigureSpec figure_spec(std::string_view name) {
  if (name == "fig1_E" || name == "fig1_O") {
    FigureSpec f{{"X", "Z", "U", "Y"}, {{"U", "X"}, {"X", "Y"}, {"U", "Y"}}, {{"Z", "Y"}}};
    if (name == "fig1_O") f.structural.emplace_back("X", "Z");
    return f;
  }
  if (name == "fig2_E" || name == "fig2_O") {
    FigureSpec f{{"Z1", "X", "Z2", "U", "Y"},
                 {{"Z1", "X"}, {"Z1", "Z2"}, {"U", "X"}, {"U", "Y"}},
                 {{"Z1", "Y"}, {"Z2", "Y"}, {"X", "Y"}}};
    if (name == "fig2_O") f.structural.emplace_back("X", "Z2");
    return f;
  }
  if (name == "fig2_null_alt") {
    return {{"Z1", "X", "Z2", "U", "Y"},
            {{"Z1", "Z2"}, {"U", "X"}, {"U", "Y"}, {"X", "Y"}},
            {{"Z1", "Y"}, {"Z2", "Y"}}};
  }
  std::string known;
  for (const auto& n : builtin_figure_names()) known += " " + n;
  throw Error(ErrorCode::UnknownName, "unknown figure '" + std::string(name) + "'; expected one of" + known);
}

void check_labels(const Dag& g, const NodeSet& s) {
  for (const auto& l : s) g.index_of(l);
}

std::string join(const NodeSet& s) {
  std::string out;
  for (const auto& l : s) out += (out.empty() ? "" : ",") + l;
  return out;
}

}  // namespace

std::vector<std::string> builtin_figure_names() {
  return {"fig1_E", "fig1_O", "fig2_E", "fig2_O", "fig2_null_alt"};
}

Dag builtin_figure(std::string_view name, bool under_null) {
  FigureSpec f = figure_spec(name);
  std::vector<Edge> edges = f.structural;
  if (!under_null) edges.insert(edges.end(), f.effect.begin(), f.effect.end());
  return Dag(std::move(f.nodes), edges);
}

bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& given) {
  check_labels(g, a);
  check_labels(g, b);
  check_labels(g, given);
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::InvalidParameter, "d-separation needs nonempty node sets");
  }
  for (const auto& l : a) {
    if (b.count(l) || given.count(l)) throw Error(ErrorCode::OverlappingSets, "'" + l + "' appears in more than one set");
  }
  for (const auto& l : b) {
    if (given.count(l)) throw Error(ErrorCode::OverlappingSets, "'" + l + "' appears in more than one set");
  }

  const std::size_t n = g.size();
  std::vector<std::size_t> seeds;
  for (const auto* s : {&a, &b, &given}) {
    for (const auto& l : *s) seeds.push_back(g.index_of(l));
  }
  const std::vector<bool> keep = g.ancestral_closure(seeds);

  // Moral graph of the ancestral set: parent-child links plus married parents.
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& ps = g.parents(v);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      adj[v][ps[i]] = adj[ps[i]][v] = true;
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        adj[ps[i]][ps[j]] = adj[ps[j]][ps[i]] = true;
      }
    }
  }

  std::vector<bool> blocked(n, false);
  for (const auto& l : given) blocked[g.index_of(l)] = true;
  std::vector<bool> target(n, false);
  for (const auto& l : b) target[g.index_of(l)] = true;

  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue;
  for (const auto& l : a) {
    const std::size_t v = g.index_of(l);
    seen[v] = true;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (target[v]) return false;
    for (std::size_t w = 0; w < n; ++w) {
      if (adj[v][w] && keep[w] && !blocked[w] && !seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return true;
}

BackdoorVerdict backdoor_check(const Dag& g, std::string_view treatment, std::string_view outcome,
                               const NodeSet& adjust) {
  const std::size_t t = g.index_of(treatment);
  g.index_of(outcome);
  check_labels(g, adjust);
  if (treatment == outcome) {
    throw Error(ErrorCode::InvalidParameter, "treatment and outcome must differ");
  }
  if (adjust.count(std::string(treatment)) || adjust.count(std::string(outcome))) {
    throw Error(ErrorCode::OverlappingSets, "adjustment set must exclude treatment and outcome");
  }

  const NodeSet desc = g.descendants(treatment);
  for (const auto& l : adjust) {
    if (desc.count(l)) {
      return {false, l + " is a descendant of " + std::string(treatment)};
    }
  }

  // With the treatment's outgoing edges removed, the remaining connections
  // between treatment and outcome are exactly the back-door paths.
  std::vector<Edge> outgoing;
  for (std::size_t c : g.children(t)) outgoing.emplace_back(std::string(treatment), g.nodes()[c]);
  const Dag pruned = g.without_edges(outgoing);
  if (d_separated(pruned, {std::string(treatment)}, {std::string(outcome)}, adjust)) {
    return {true, {}};
  }
  return {false, "a back-door path from " + std::string(treatment) + " to " + std::string(outcome) +
                     " is open given {" + join(adjust) + "}"};
}

Dag parse_dag_text(std::string_view text) {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  auto declare = [&](const std::string& l) {
    if (std::find(nodes.begin(), nodes.end(), l) == nodes.end()) nodes.push_back(l);
  };

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream toks(line);
    std::vector<std::string> words;
    for (std::string w; toks >> w;) words.push_back(w);
    if (words.empty()) continue;
    if (words.size() == 1 && words[0].find("->") == std::string::npos) {
      declare(words[0]);
      continue;
    }
    // Accept both "A -> B" and "A->B".
    std::string joined;
    for (const auto& w : words) joined += w;
    const auto arrow = joined.find("->");
    if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= joined.size() ||
        joined.find("->", arrow + 2) != std::string::npos || words.size() > 3) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected 'parent -> child'");
    }
    std::string parent = joined.substr(0, arrow);
    std::string child = joined.substr(arrow + 2);
    declare(parent);
    declare(child);
    edges.emplace_back(std::move(parent), std::move(child));
  }
  return Dag(std::move(nodes), edges);
}

}  // namespace exch
