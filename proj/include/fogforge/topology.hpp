#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fogforge/rng.hpp"

namespace fogforge {

using NodeId = int;

enum class NodeRole { Cloud, Fog, SourceCluster };

const char* role_name(NodeRole r);
NodeRole role_from_name(const std::string& s);

struct NodeSpec {
  NodeId id = 0;
  NodeRole role = NodeRole::Fog;
  double ipt = 1.0;          // instructions per simulated time unit
  std::uint64_t ram = 0;     // bytes; recorded per node, unused by queue dynamics

  bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
  NodeId a = 0, b = 0;  // bidirectional, stored with a < b
  double bw = 1.0;      // bytes per simulated time unit
  double pr = 0.0;      // propagation delay, simulated time units

  bool operator==(const LinkSpec&) const = default;
};

// Undirected graph on vertices 0..n-1, before roles and resources.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // each with first < second

  std::vector<std::vector<int>> adjacency() const;  // sorted neighbor lists
  bool connected() const;
};

struct FogTopology {
  std::vector<NodeSpec> nodes;  // node ids are 0..n-1 and index this vector
  std::vector<LinkSpec> links;
  std::vector<std::vector<int>> adj;  // derived; rebuild_adjacency()

  void rebuild_adjacency();
  const NodeSpec& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
  const LinkSpec& link_between(NodeId a, NodeId b) const;

  std::vector<NodeId> fog_ids() const;      // ascending
  std::vector<NodeId> cluster_ids() const;  // ascending
  NodeId cloud_id() const;
  NodeId gateway_of(NodeId cluster) const;  // the cluster's single neighbor
};

// Scale-free preferential-attachment generator; n == 1 is a single vertex,
// otherwise requires 1 <= m < n. Identical inputs give identical graphs.
Graph generate_graph(std::uint64_t seed, int n, int m);

// Normalized betweenness centrality in [0, 1] (unordered pair count as the
// normalizer); throws on disconnected graphs.
std::vector<double> betweenness(const Graph& g);

// Highest betweenness (ties to lowest id) -> Cloud; remaining degree-1
// vertices -> SourceCluster; rest -> Fog. Throws if fewer than 2 Fog result.
std::vector<NodeRole> assign_roles(const Graph& g, const std::vector<double>& scores);

struct ResourceRanges {
  std::pair<double, double> ipt{50.0, 150.0};
  std::pair<std::uint64_t, std::uint64_t> ram{1ULL << 30, 4ULL << 30};
  std::pair<double, double> bw{1000.0, 1000.0};
  std::pair<double, double> pr{1.0, 1.0};
};

// Samples node/link attributes and re-attaches source clusters round-robin
// starting at the weakest Fog node so cluster counts are inverse to IPT.
FogTopology attach_resources(const Graph& g, const std::vector<NodeRole>& roles,
                             std::uint64_t seed, const ResourceRanges& ranges);

// Full pipeline: generate, score, assign, attach.
FogTopology build_topology(std::uint64_t seed, int n, int m, const ResourceRanges& ranges);

// Throws std::invalid_argument describing the first violated invariant.
void validate_topology(const FogTopology& t);

std::string topology_to_json(const FogTopology& t);
FogTopology topology_from_json(const std::string& text);
void save_topology(const FogTopology& t, const std::string& path);
FogTopology load_topology(const std::string& path);

}  // namespace fogforge
