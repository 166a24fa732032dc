#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hgrec/tensor.hpp"

namespace hgrec {

using NodeTypeId = int;
using EdgeTypeId = int;

// Names and identities of node/edge types. Edge types carry the unordered
// pair of endpoint node types they connect.
class TypeRegistry {
 public:
  NodeTypeId add_node_type(const std::string& name);
  EdgeTypeId add_edge_type(const std::string& name, NodeTypeId a, NodeTypeId b);

  NodeTypeId node_type(const std::string& name) const;  // throws GraphError
  EdgeTypeId edge_type(const std::string& name) const;  // throws GraphError
  std::optional<NodeTypeId> find_node_type(const std::string& name) const;
  std::optional<EdgeTypeId> find_edge_type(const std::string& name) const;

  int num_node_types() const { return static_cast<int>(node_names_.size()); }
  int num_edge_types() const { return static_cast<int>(edge_names_.size()); }
  const std::string& node_type_name(NodeTypeId t) const { return node_names_[t]; }
  const std::string& edge_type_name(EdgeTypeId t) const { return edge_names_[t]; }
  std::pair<NodeTypeId, NodeTypeId> edge_endpoints(EdgeTypeId t) const { return edge_ends_[t]; }

 private:
  std::vector<std::string> node_names_;
  std::vector<std::string> edge_names_;
  std::vector<std::pair<NodeTypeId, NodeTypeId>> edge_ends_;
  std::map<std::string, NodeTypeId> node_by_name_;
  std::map<std::string, EdgeTypeId> edge_by_name_;
};

// Ordered node-type / edge-type sequence, e.g. author-writes-paper-writes-author.
struct MetaPath {
  std::string name;
  std::vector<NodeTypeId> node_types;  // length l+1
  std::vector<EdgeTypeId> edge_types;  // length l

  NodeTypeId start_type() const { return node_types.front(); }
  NodeTypeId end_type() const { return node_types.back(); }
};

MetaPath make_metapath(const TypeRegistry& reg, const std::string& name,
                       const std::vector<std::string>& node_type_names,
                       const std::vector<std::string>& edge_type_names);

struct NodeRef {
  NodeTypeId type = -1;
  int index = -1;
};

// Immutable typed graph: per-type dense node indexing with external-id side
// tables, per-edge-type symmetric adjacency lists, optional per-type feature
// matrices. Safe for concurrent reads once built.
class HeteroGraph {
 public:
  const TypeRegistry& registry() const { return registry_; }
  int node_count(NodeTypeId t) const { return static_cast<int>(external_ids_[t].size()); }
  int total_nodes() const;

  const std::string& external_id(NodeTypeId t, int idx) const { return external_ids_[t][idx]; }
  const std::vector<std::string>& external_ids(NodeTypeId t) const { return external_ids_[t]; }
  std::optional<NodeRef> find_node(const std::string& external_id) const;

  // Neighbors of node (from_type, idx) across edge type e. The edge type must
  // touch from_type; returns the opposite-endpoint indices, sorted.
  const std::vector<int>& neighbors(EdgeTypeId e, NodeTypeId from_type, int idx) const;

  bool has_features(NodeTypeId t) const { return features_[t].size() > 0; }
  const Tensor& features(NodeTypeId t) const { return features_[t]; }
  int edge_count(EdgeTypeId e) const;  // undirected edge count

  void validate() const;  // throws GraphError on violated invariants

 private:
  friend class GraphBuilder;

  struct EdgeAdjacency {
    NodeTypeId src = -1, dst = -1;
    std::vector<std::vector<int>> fwd;  // indexed by src-type node
    std::vector<std::vector<int>> bwd;  // indexed by dst-type node
  };

  TypeRegistry registry_;
  std::vector<std::vector<std::string>> external_ids_;  // per type, index -> id
  std::unordered_map<std::string, NodeRef> node_lookup_;
  std::vector<EdgeAdjacency> adjacency_;  // per edge type
  std::vector<Tensor> features_;          // per node type, possibly 0x0
};

// Collects raw node/edge/feature records and produces a validated graph with
// deterministic indexing (nodes sorted by external id within each type).
// Both the TSV loader and the synthetic generator go through this.
class GraphBuilder {
 public:
  void add_node(const std::string& type_name, const std::string& external_id,
                const std::string& context = {});
  void add_edge(const std::string& type_name, const std::string& src_id,
                const std::string& dst_id, const std::string& context = {});
  void add_feature_row(const std::string& type_name, const std::string& external_id,
                       std::vector<double> values, const std::string& context = {});

  // When set, node/edge type names outside these lists are load errors.
  void restrict_node_types(std::vector<std::string> allowed);
  void restrict_edge_types(std::vector<std::string> allowed);

  HeteroGraph build();

 private:
  struct NodeRec { std::string type, id, ctx; };
  struct EdgeRec { std::string type, src, dst, ctx; };
  struct FeatRec { std::string type, id, ctx; std::vector<double> values; };
  std::vector<NodeRec> nodes_;
  std::vector<EdgeRec> edges_;
  std::vector<FeatRec> feats_;
  std::vector<std::string> allowed_nodes_, allowed_edges_;
};

struct GraphSources {
  std::filesystem::path nodes;
  std::filesystem::path edges;
  // type name -> features file for that type
  std::vector<std::pair<std::string, std::filesystem::path>> features;
};

struct LoadOptions {
  std::vector<std::string> allowed_node_types;  // empty = any
  std::vector<std::string> allowed_edge_types;
};

HeteroGraph load_graph(const GraphSources& sources, const LoadOptions& opts = {});

// Meta-path neighbors of node v (which must have the start type of rho),
// including v itself. Sorted, no duplicates.
std::vector<int> metapath_neighbors(const HeteroGraph& g, NodeRef v, const MetaPath& rho);

// Batched form: row i holds the neighbor set of start-type node i, diagonal
// forced to one. Reachability is binary; path multiplicity is discarded.
SparseMask metapath_adjacency(const HeteroGraph& g, const MetaPath& rho);

}  // namespace hgrec
