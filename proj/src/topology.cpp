#include "fogforge/topology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fogforge/log.hpp"

namespace fogforge {

const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Cloud: return "cloud";
    case NodeRole::Fog: return "fog";
    case NodeRole::SourceCluster: return "cluster";
  }
  return "?";
}

NodeRole role_from_name(const std::string& s) {
  if (s == "cloud") return NodeRole::Cloud;
  if (s == "fog") return NodeRole::Fog;
  if (s == "cluster") return NodeRole::SourceCluster;
  throw std::invalid_argument("unknown node role: " + s);
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

bool Graph::connected() const {
  if (n <= 1) return true;
  const auto adj = adjacency();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<int> work{0};
  seen[0] = 1;
  int count = 1;
  while (!work.empty()) {
    const int v = work.front();
    work.pop_front();
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        ++count;
        work.push_back(u);
      }
    }
  }
  return count == n;
}

Graph generate_graph(std::uint64_t seed, int n, int m) {
  if (n < 1) throw std::invalid_argument("generate_graph: n must be >= 1");
  if (n == 1) return Graph{1, {}};
  if (m < 1 || m >= n) {
    throw std::invalid_argument("generate_graph: need 1 <= m < n");
  }
  RngStream rng(mix_seed(seed, stream::kTopology));
  Graph g;
  g.n = n;
  g.edges.reserve(static_cast<std::size_t>(n - m) * static_cast<std::size_t>(m));
  // One endpoint entry per incident edge; sampling an element uniformly picks a
  // vertex with probability proportional to its degree.
  std::vector<int> repeated;
  repeated.reserve(2 * g.edges.capacity());
  for (int v = m; v < n; ++v) {
    std::set<int> targets;
    if (v == m) {
      for (int u = 0; u < m; ++u) targets.insert(u);
    } else {
      while (static_cast<int>(targets.size()) < m) {
        targets.insert(repeated[rng.uniform_int(repeated.size())]);
      }
    }
    for (int u : targets) {
      g.edges.emplace_back(std::min(u, v), std::max(u, v));
      repeated.push_back(u);
      repeated.push_back(v);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::vector<double> betweenness(const Graph& g) {
  if (!g.connected()) throw std::invalid_argument("betweenness: graph is disconnected");
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::vector<double> bc(n, 0.0);
  if (g.n < 3) return bc;
  const auto adj = g.adjacency();
  std::vector<int> dist(n), order;
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<int>> preds(n);
  order.reserve(n);
  for (int s = 0; s < g.n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();
    std::deque<int> work{s};
    dist[static_cast<std::size_t>(s)] = 0;
    sigma[static_cast<std::size_t>(s)] = 1.0;
    while (!work.empty()) {
      const int v = work.front();
      work.pop_front();
      order.push_back(v);
      for (int u : adj[static_cast<std::size_t>(v)]) {
        const auto ui = static_cast<std::size_t>(u);
        const auto vi = static_cast<std::size_t>(v);
        if (dist[ui] < 0) {
          dist[ui] = dist[vi] + 1;
          work.push_back(u);
        }
        if (dist[ui] == dist[vi] + 1) {
          sigma[ui] += sigma[vi];
          preds[ui].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto wi = static_cast<std::size_t>(*it);
      for (int v : preds[wi]) {
        const auto vi = static_cast<std::size_t>(v);
        delta[vi] += sigma[vi] / sigma[wi] * (1.0 + delta[wi]);
      }
      if (*it != s) bc[wi] += delta[wi];
    }
  }
  // Each unordered (s, t) pair is visited from both endpoints; fold that into
  // the pair-count normalizer (n-1)(n-2)/2.
  const double norm = static_cast<double>(g.n - 1) * static_cast<double>(g.n - 2);
  for (double& v : bc) v /= norm;
  return bc;
}

std::vector<NodeRole> assign_roles(const Graph& g, const std::vector<double>& scores) {
  if (scores.size() != static_cast<std::size_t>(g.n)) {
    throw std::invalid_argument("assign_roles: scores must cover every vertex");
  }
  if (g.n < 4) throw std::invalid_argument("assign_roles: need at least 4 vertices");
  int cloud = 0;
  for (int v = 1; v < g.n; ++v) {
    if (scores[static_cast<std::size_t>(v)] > scores[static_cast<std::size_t>(cloud)]) cloud = v;
  }
  const auto adj = g.adjacency();
  std::vector<NodeRole> roles(static_cast<std::size_t>(g.n), NodeRole::Fog);
  int fog_count = 0;
  for (int v = 0; v < g.n; ++v) {
    if (v == cloud) {
      roles[static_cast<std::size_t>(v)] = NodeRole::Cloud;
    } else if (adj[static_cast<std::size_t>(v)].size() == 1) {
      roles[static_cast<std::size_t>(v)] = NodeRole::SourceCluster;
    } else {
      ++fog_count;
    }
  }
  if (fog_count < 2) {
    throw std::invalid_argument("assign_roles: topology too small, fewer than 2 fog nodes");
  }
  return roles;
}

namespace {

double sample_range(RngStream& rng, double lo, double hi, const char* what) {
  if (!(lo <= hi) || !(lo > 0.0) || lo != lo) {
    throw std::invalid_argument(std::string("attach_resources: invalid ") + what + " range");
  }
  return lo == hi ? lo : rng.uniform(lo, hi);
}

std::uint64_t sample_range_u64(RngStream& rng, std::uint64_t lo, std::uint64_t hi, const char* what) {
  if (lo > hi || lo == 0) {
    throw std::invalid_argument(std::string("attach_resources: invalid ") + what + " range");
  }
  return lo == hi ? lo : lo + rng.uniform_int(hi - lo + 1);
}

}  // namespace

FogTopology attach_resources(const Graph& g, const std::vector<NodeRole>& roles,
                             std::uint64_t seed, const ResourceRanges& ranges) {
  if (roles.size() != static_cast<std::size_t>(g.n)) {
    throw std::invalid_argument("attach_resources: roles must cover every vertex");
  }
  // Propagation delay may be zero, so it is validated separately from the
  // strictly positive ranges handled by sample_range.
  if (!(ranges.pr.first <= ranges.pr.second) || !(ranges.pr.first >= 0.0)) {
    throw std::invalid_argument("attach_resources: invalid pr range");
  }
  RngStream rng(mix_seed(seed, stream::kTopology + 1));
  FogTopology t;
  t.nodes.resize(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v) {
    auto& node = t.nodes[static_cast<std::size_t>(v)];
    node.id = v;
    node.role = roles[static_cast<std::size_t>(v)];
    node.ipt = sample_range(rng, ranges.ipt.first, ranges.ipt.second, "ipt");
    node.ram = sample_range_u64(rng, ranges.ram.first, ranges.ram.second, "ram");
  }

  std::vector<NodeId> fog, clusters;
  for (const auto& n : t.nodes) {
    if (n.role == NodeRole::Fog) fog.push_back(n.id);
    if (n.role == NodeRole::SourceCluster) clusters.push_back(n.id);
  }
  if (fog.size() < 2) {
    throw std::invalid_argument("attach_resources: fewer than 2 fog nodes");
  }
  // Round-robin clusters over fog nodes ordered weakest first, so slower nodes
  // never end up with fewer direct clusters than faster ones.
  std::sort(fog.begin(), fog.end(), [&](NodeId a, NodeId b) {
    const double ia = t.node(a).ipt, ib = t.node(b).ipt;
    return ia != ib ? ia < ib : a < b;
  });

  std::set<std::pair<int, int>> edge_set(g.edges.begin(), g.edges.end());
  const auto adj = g.adjacency();
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const NodeId c = clusters[k];
    const NodeId target = fog[k % fog.size()];
    const auto& nb = adj[static_cast<std::size_t>(c)];
    if (nb.size() != 1) {
      throw std::invalid_argument("attach_resources: source cluster is not degree-1");
    }
    edge_set.erase({std::min(c, nb[0]), std::max(c, nb[0])});
    edge_set.insert({std::min(c, target), std::max(c, target)});
  }

  t.links.reserve(edge_set.size());
  for (const auto& [a, b] : edge_set) {
    LinkSpec link;
    link.a = a;
    link.b = b;
    link.bw = sample_range(rng, ranges.bw.first, ranges.bw.second, "bw");
    link.pr = ranges.pr.first == ranges.pr.second ? ranges.pr.first
                                                  : rng.uniform(ranges.pr.first, ranges.pr.second);
    t.links.push_back(link);
  }
  t.rebuild_adjacency();
  validate_topology(t);
  return t;
}

FogTopology build_topology(std::uint64_t seed, int n, int m, const ResourceRanges& ranges) {
  const Graph g = generate_graph(seed, n, m);
  const auto scores = betweenness(g);
  const auto roles = assign_roles(g, scores);
  return attach_resources(g, roles, seed, ranges);
}

void FogTopology::rebuild_adjacency() {
  adj.assign(nodes.size(), {});
  for (const auto& l : links) {
    adj.at(static_cast<std::size_t>(l.a)).push_back(l.b);
    adj.at(static_cast<std::size_t>(l.b)).push_back(l.a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
}

const LinkSpec& FogTopology::link_between(NodeId a, NodeId b) const {
  const NodeId lo = std::min(a, b), hi = std::max(a, b);
  for (const auto& l : links) {
    if (l.a == lo && l.b == hi) return l;
  }
  throw std::out_of_range("link_between: no such link");
}

std::vector<NodeId> FogTopology::fog_ids() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes) {
    if (n.role == NodeRole::Fog) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> FogTopology::cluster_ids() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes) {
    if (n.role == NodeRole::SourceCluster) out.push_back(n.id);
  }
  return out;
}

NodeId FogTopology::cloud_id() const {
  for (const auto& n : nodes) {
    if (n.role == NodeRole::Cloud) return n.id;
  }
  throw std::out_of_range("cloud_id: no cloud node");
}

NodeId FogTopology::gateway_of(NodeId cluster) const {
  const auto& nb = adj.at(static_cast<std::size_t>(cluster));
  if (node(cluster).role != NodeRole::SourceCluster || nb.size() != 1) {
    throw std::invalid_argument("gateway_of: node is not a degree-1 source cluster");
  }
  return nb[0];
}

void validate_topology(const FogTopology& t) {
  const int n = static_cast<int>(t.nodes.size());
  if (n < 4) throw std::invalid_argument("topology: need at least 4 nodes");
  int clouds = 0, fog = 0;
  for (int v = 0; v < n; ++v) {
    const auto& node = t.nodes[static_cast<std::size_t>(v)];
    if (node.id != v) {
      throw std::invalid_argument("topology: node ids must be 0..n-1 in order");
    }
    if (!(node.ipt > 0.0)) throw std::invalid_argument("topology: node ipt must be positive");
    if (node.role == NodeRole::Cloud) ++clouds;
    if (node.role == NodeRole::Fog) ++fog;
  }
  if (clouds != 1) throw std::invalid_argument("topology: exactly one cloud node required");
  if (fog < 2) throw std::invalid_argument("topology: at least 2 fog nodes required");

  std::set<std::pair<int, int>> seen;
  for (const auto& l : t.links) {
    if (l.a >= l.b) throw std::invalid_argument("topology: links must be stored with a < b");
    if (l.a < 0 || l.b >= n) throw std::invalid_argument("topology: link endpoint out of range");
    if (!seen.insert({l.a, l.b}).second) {
      throw std::invalid_argument("topology: duplicate link");
    }
    if (!(l.bw > 0.0)) throw std::invalid_argument("topology: link bw must be positive");
    if (!(l.pr >= 0.0)) throw std::invalid_argument("topology: link pr must be non-negative");
  }

  if (t.adj.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("topology: adjacency out of date; call rebuild_adjacency");
  }
  for (int v = 0; v < n; ++v) {
    const auto& node = t.nodes[static_cast<std::size_t>(v)];
    const auto& nb = t.adj[static_cast<std::size_t>(v)];
    if (node.role == NodeRole::SourceCluster) {
      if (nb.size() != 1) {
        throw std::invalid_argument("topology: source cluster must have exactly one link");
      }
      if (t.node(nb[0]).role != NodeRole::Fog) {
        throw std::invalid_argument("topology: source cluster must attach to a fog node");
      }
    }
  }

  Graph g;
  g.n = n;
  for (const auto& l : t.links) g.edges.emplace_back(l.a, l.b);
  if (!g.connected()) throw std::invalid_argument("topology: graph is disconnected");
}

namespace {
constexpr int kTopologyFormatVersion = 1;
}

std::string topology_to_json(const FogTopology& t) {
  nlohmann::ordered_json j;
  j["format_version"] = kTopologyFormatVersion;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : t.nodes) {
    j["nodes"].push_back({{"id", n.id},
                          {"role", role_name(n.role)},
                          {"ipt", n.ipt},
                          {"ram", n.ram}});
  }
  j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : t.links) {
    j["links"].push_back({{"a", l.a}, {"b", l.b}, {"bw", l.bw}, {"pr", l.pr}});
  }
  return j.dump(2) + "\n";
}

FogTopology topology_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("topology: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version")) {
    throw std::invalid_argument("topology: missing format_version");
  }
  if (j["format_version"] != kTopologyFormatVersion) {
    throw std::invalid_argument("topology: unsupported format_version");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "format_version" && key != "nodes" && key != "links") {
      throw std::invalid_argument("topology: unknown key: " + key);
    }
  }
  FogTopology t;
  for (const auto& jn : j.at("nodes")) {
    NodeSpec n;
    n.id = jn.at("id").get<int>();
    n.role = role_from_name(jn.at("role").get<std::string>());
    n.ipt = jn.at("ipt").get<double>();
    n.ram = jn.at("ram").get<std::uint64_t>();
    t.nodes.push_back(n);
  }
  for (const auto& jl : j.at("links")) {
    LinkSpec l;
    l.a = jl.at("a").get<int>();
    l.b = jl.at("b").get<int>();
    l.bw = jl.at("bw").get<double>();
    l.pr = jl.at("pr").get<double>();
    t.links.push_back(l);
  }
  t.rebuild_adjacency();
  validate_topology(t);
  return t;
}

void save_topology(const FogTopology& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << topology_to_json(t);
  if (!out) throw std::runtime_error("failed writing: " + path);
}

FogTopology load_topology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return topology_from_json(buf.str());
}

}  // namespace fogforge
