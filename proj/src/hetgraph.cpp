#include "hgrec/hetgraph.hpp"

#include <algorithm>
#include <set>

#include "hgrec/errors.hpp"
#include "hgrec/tsv.hpp"

namespace hgrec {

NodeTypeId TypeRegistry::add_node_type(const std::string& name) {
  if (auto it = node_by_name_.find(name); it != node_by_name_.end()) return it->second;
  const NodeTypeId id = static_cast<NodeTypeId>(node_names_.size());
  node_names_.push_back(name);
  node_by_name_[name] = id;
  return id;
}

EdgeTypeId TypeRegistry::add_edge_type(const std::string& name, NodeTypeId a, NodeTypeId b) {
  if (auto it = edge_by_name_.find(name); it != edge_by_name_.end()) {
    const auto [ea, eb] = edge_ends_[it->second];
    if (!((ea == a && eb == b) || (ea == b && eb == a)))
      throw GraphError("edge type '" + name + "' redeclared with different endpoint types");
    return it->second;
  }
  const EdgeTypeId id = static_cast<EdgeTypeId>(edge_names_.size());
  edge_names_.push_back(name);
  edge_ends_.emplace_back(a, b);
  edge_by_name_[name] = id;
  return id;
}

NodeTypeId TypeRegistry::node_type(const std::string& name) const {
  auto it = node_by_name_.find(name);
  if (it == node_by_name_.end()) throw GraphError("unknown node type name '" + name + "'");
  return it->second;
}

EdgeTypeId TypeRegistry::edge_type(const std::string& name) const {
  auto it = edge_by_name_.find(name);
  if (it == edge_by_name_.end()) throw GraphError("unknown edge type name '" + name + "'");
  return it->second;
}

std::optional<NodeTypeId> TypeRegistry::find_node_type(const std::string& name) const {
  auto it = node_by_name_.find(name);
  if (it == node_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeTypeId> TypeRegistry::find_edge_type(const std::string& name) const {
  auto it = edge_by_name_.find(name);
  if (it == edge_by_name_.end()) return std::nullopt;
  return it->second;
}

MetaPath make_metapath(const TypeRegistry& reg, const std::string& name,
                       const std::vector<std::string>& node_type_names,
                       const std::vector<std::string>& edge_type_names) {
  if (node_type_names.size() != edge_type_names.size() + 1 || edge_type_names.empty())
    throw GraphError("meta-path '" + name + "': need n+1 node types for n edge types");
  MetaPath p;
  p.name = name;
  for (const auto& n : node_type_names) p.node_types.push_back(reg.node_type(n));
  for (const auto& e : edge_type_names) p.edge_types.push_back(reg.edge_type(e));
  for (size_t i = 0; i < p.edge_types.size(); ++i) {
    const auto [a, b] = reg.edge_endpoints(p.edge_types[i]);
    const NodeTypeId s = p.node_types[i], d = p.node_types[i + 1];
    if (!((a == s && b == d) || (a == d && b == s)))
      throw GraphError("meta-path '" + name + "': edge type '" + edge_type_names[i] +
                       "' does not connect '" + reg.node_type_name(s) + "' and '" +
                       reg.node_type_name(d) + "'");
  }
  return p;
}

int HeteroGraph::total_nodes() const {
  int n = 0;
  for (const auto& ids : external_ids_) n += static_cast<int>(ids.size());
  return n;
}

std::optional<NodeRef> HeteroGraph::find_node(const std::string& external_id) const {
  auto it = node_lookup_.find(external_id);
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

const std::vector<int>& HeteroGraph::neighbors(EdgeTypeId e, NodeTypeId from_type, int idx) const {
  const EdgeAdjacency& adj = adjacency_[e];
  if (from_type == adj.src) return adj.fwd[idx];
  if (from_type == adj.dst) return adj.bwd[idx];
  throw GraphError("edge type '" + registry_.edge_type_name(e) + "' does not touch node type '" +
                   registry_.node_type_name(from_type) + "'");
}

int HeteroGraph::edge_count(EdgeTypeId e) const {
  const EdgeAdjacency& adj = adjacency_[e];
  size_t n = 0;
  for (const auto& v : adj.fwd) n += v.size();
  if (adj.src == adj.dst) n /= 2;  // stored in both directions within fwd
  return static_cast<int>(n);
}

void HeteroGraph::validate() const {
  if (registry_.num_node_types() + registry_.num_edge_types() <= 1)
    throw GraphError("graph is not heterogeneous: |node types| + |edge types| must exceed 1");
  for (EdgeTypeId e = 0; e < registry_.num_edge_types(); ++e) {
    const EdgeAdjacency& adj = adjacency_[e];
    for (int i = 0; i < static_cast<int>(adj.fwd.size()); ++i)
      for (int j : adj.fwd[i]) {
        if (j < 0 || j >= node_count(adj.dst))
          throw GraphError("edge endpoint index out of range for edge type '" +
                           registry_.edge_type_name(e) + "'");
        const auto& back = adj.src == adj.dst ? adj.fwd[j] : adj.bwd[j];
        if (!std::binary_search(back.begin(), back.end(), i))
          throw GraphError("adjacency for edge type '" + registry_.edge_type_name(e) +
                           "' is not symmetric");
      }
  }
  for (NodeTypeId t = 0; t < registry_.num_node_types(); ++t) {
    if (features_[t].size() > 0 && features_[t].rows != node_count(t))
      throw GraphError("feature matrix for type '" + registry_.node_type_name(t) + "' has " +
                       std::to_string(features_[t].rows) + " rows, expected " +
                       std::to_string(node_count(t)));
  }
}

void GraphBuilder::restrict_node_types(std::vector<std::string> allowed) {
  allowed_nodes_ = std::move(allowed);
}

void GraphBuilder::restrict_edge_types(std::vector<std::string> allowed) {
  allowed_edges_ = std::move(allowed);
}

void GraphBuilder::add_node(const std::string& type_name, const std::string& external_id,
                            const std::string& context) {
  nodes_.push_back({type_name, external_id, context});
}

void GraphBuilder::add_edge(const std::string& type_name, const std::string& src_id,
                            const std::string& dst_id, const std::string& context) {
  edges_.push_back({type_name, src_id, dst_id, context});
}

void GraphBuilder::add_feature_row(const std::string& type_name, const std::string& external_id,
                                   std::vector<double> values, const std::string& context) {
  feats_.push_back({type_name, external_id, context, std::move(values)});
}

namespace {

std::string at(const std::string& ctx) { return ctx.empty() ? "" : ctx + ": "; }

}  // namespace

HeteroGraph GraphBuilder::build() {
  HeteroGraph g;

  for (const auto& n : nodes_) {
    if (!allowed_nodes_.empty() &&
        std::find(allowed_nodes_.begin(), allowed_nodes_.end(), n.type) == allowed_nodes_.end())
      throw GraphError(at(n.ctx) + "unknown type name '" + n.type + "'");
    g.registry_.add_node_type(n.type);
  }
  g.external_ids_.resize(g.registry_.num_node_types());
  g.features_.resize(g.registry_.num_node_types());

  // deterministic indexing: sort external ids within each type
  for (const auto& n : nodes_) g.external_ids_[g.registry_.node_type(n.type)].push_back(n.id);
  for (auto& ids : g.external_ids_) std::sort(ids.begin(), ids.end());
  for (NodeTypeId t = 0; t < g.registry_.num_node_types(); ++t)
    for (int i = 0; i < g.node_count(t); ++i) {
      auto [it, inserted] = g.node_lookup_.emplace(g.external_ids_[t][i], NodeRef{t, i});
      (void)it;
      if (!inserted) {
        // recover the declaring line for the message
        std::string ctx;
        for (const auto& n : nodes_)
          if (n.id == g.external_ids_[t][i]) ctx = n.ctx;
        throw GraphError(at(ctx) + "duplicate node id '" + g.external_ids_[t][i] + "'");
      }
    }

  std::vector<std::set<std::pair<int, int>>> edge_sets;
  for (const auto& e : edges_) {
    if (!allowed_edges_.empty() &&
        std::find(allowed_edges_.begin(), allowed_edges_.end(), e.type) == allowed_edges_.end())
      throw GraphError(at(e.ctx) + "unknown type name '" + e.type + "'");
    auto s = g.find_node(e.src);
    if (!s) throw GraphError(at(e.ctx) + "edge references undeclared node id '" + e.src + "'");
    auto d = g.find_node(e.dst);
    if (!d) throw GraphError(at(e.ctx) + "edge references undeclared node id '" + e.dst + "'");

    EdgeTypeId et;
    if (auto found = g.registry_.find_edge_type(e.type)) {
      et = *found;
      const auto [a, b] = g.registry_.edge_endpoints(et);
      if (!((a == s->type && b == d->type) || (a == d->type && b == s->type)))
        throw GraphError(at(e.ctx) + "edge type '" + e.type + "' connects '" +
                         g.registry_.node_type_name(a) + "'-'" + g.registry_.node_type_name(b) +
                         "' but endpoints are '" + g.registry_.node_type_name(s->type) + "'-'" +
                         g.registry_.node_type_name(d->type) + "'");
    } else {
      et = g.registry_.add_edge_type(e.type, s->type, d->type);
      edge_sets.resize(g.registry_.num_edge_types());
    }

    const auto [a, b] = g.registry_.edge_endpoints(et);
    int si = s->index, di = d->index;
    if (s->type != a) std::swap(si, di);  // normalize orientation to (src=a, dst=b)
    edge_sets[et].insert({si, di});
    if (a == b) edge_sets[et].insert({di, si});  // same-type edges stored symmetrically
  }

  g.adjacency_.resize(g.registry_.num_edge_types());
  for (EdgeTypeId et = 0; et < g.registry_.num_edge_types(); ++et) {
    auto& adj = g.adjacency_[et];
    std::tie(adj.src, adj.dst) = g.registry_.edge_endpoints(et);
    adj.fwd.resize(g.node_count(adj.src));
    adj.bwd.resize(g.node_count(adj.dst));
    for (const auto& [si, di] : edge_sets[et]) {
      adj.fwd[si].push_back(di);
      if (adj.src != adj.dst) adj.bwd[di].push_back(si);
    }
    for (auto& v : adj.fwd) std::sort(v.begin(), v.end());
    for (auto& v : adj.bwd) std::sort(v.begin(), v.end());
    if (adj.src == adj.dst) adj.bwd = adj.fwd;
  }

  // feature matrices: every node of a covered type needs exactly one row
  std::vector<std::vector<char>> seen(g.registry_.num_node_types());
  for (NodeTypeId t = 0; t < g.registry_.num_node_types(); ++t)
    seen[t].assign(g.node_count(t), 0);
  for (const auto& f : feats_) {
    auto tid = g.registry_.find_node_type(f.type);
    if (!tid) throw GraphError(at(f.ctx) + "unknown type name '" + f.type + "'");
    auto ref = g.find_node(f.id);
    if (!ref || ref->type != *tid)
      throw GraphError(at(f.ctx) + "feature row for unknown node id '" + f.id + "' of type '" +
                       f.type + "'");
    Tensor& m = g.features_[*tid];
    if (m.size() == 0) m = Tensor(g.node_count(*tid), static_cast<int>(f.values.size()));
    if (static_cast<int>(f.values.size()) != m.cols)
      throw GraphError(at(f.ctx) + "feature dimension mismatch for type '" + f.type + "': got " +
                       std::to_string(f.values.size()) + ", expected " + std::to_string(m.cols));
    if (seen[*tid][ref->index])
      throw GraphError(at(f.ctx) + "duplicate feature row for node id '" + f.id + "'");
    seen[*tid][ref->index] = 1;
    std::copy(f.values.begin(), f.values.end(), m.row(ref->index).begin());
  }
  for (NodeTypeId t = 0; t < g.registry_.num_node_types(); ++t) {
    if (g.features_[t].size() == 0) continue;
    for (int i = 0; i < g.node_count(t); ++i)
      if (!seen[t][i])
        throw GraphError("feature row-count mismatch for type '" + g.registry_.node_type_name(t) +
                         "': node id '" + g.external_id(t, i) + "' has no feature row");
  }

  g.validate();
  return g;
}

HeteroGraph load_graph(const GraphSources& sources, const LoadOptions& opts) {
  GraphBuilder b;
  b.restrict_node_types(opts.allowed_node_types);
  b.restrict_edge_types(opts.allowed_edge_types);

  for (const auto& rec : read_tsv(sources.nodes, 2))
    b.add_node(rec.fields[1], rec.fields[0],
               sources.nodes.string() + ":" + std::to_string(rec.line));
  for (const auto& rec : read_tsv(sources.edges, 3))
    b.add_edge(rec.fields[2], rec.fields[0], rec.fields[1],
               sources.edges.string() + ":" + std::to_string(rec.line));
  for (const auto& [type_name, path] : sources.features) {
    for (const auto& rec : read_tsv(path, 2))
      b.add_feature_row(type_name, rec.fields[0], parse_double_list(rec.fields[1], path, rec.line),
                        path.string() + ":" + std::to_string(rec.line));
  }
  return b.build();
}

std::vector<int> metapath_neighbors(const HeteroGraph& g, NodeRef v, const MetaPath& rho) {
  if (v.type != rho.start_type())
    throw GraphError("node type '" + g.registry().node_type_name(v.type) +
                     "' does not match meta-path '" + rho.name + "' start type '" +
                     g.registry().node_type_name(rho.start_type()) + "'");
  std::set<int> frontier{v.index};
  for (size_t step = 0; step < rho.edge_types.size(); ++step) {
    std::set<int> next;
    for (int u : frontier)
      for (int w : g.neighbors(rho.edge_types[step], rho.node_types[step], u)) next.insert(w);
    frontier = std::move(next);
  }
  if (rho.start_type() == rho.end_type()) frontier.insert(v.index);  // self-inclusion
  return {frontier.begin(), frontier.end()};
}

SparseMask metapath_adjacency(const HeteroGraph& g, const MetaPath& rho) {
  const NodeTypeId t = rho.start_type();
  const int n = g.node_count(t);
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = metapath_neighbors(g, {t, i}, rho);
  const int cols = g.node_count(rho.end_type());
  return SparseMask::from_rows(cols, rows);
}

}  // namespace hgrec
