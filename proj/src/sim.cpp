#include "fogforge/sim.hpp"

#include <algorithm>
#include <stdexcept>

#include "fogforge/log.hpp"

namespace fogforge {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::JobCreated: return "created";
    case EventKind::ArrivalAtNode: return "arrival";
    case EventKind::ServiceComplete: return "service";
    case EventKind::ResponseDelivered: return "response";
  }
  return "?";
}

RouteInfo compute_route(const FogTopology& t, NodeId from, NodeId to) {
  const int n = static_cast<int>(t.nodes.size());
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw std::out_of_range("compute_route: endpoint out of range");
  }
  RouteInfo r;
  r.path.push_back(from);
  if (from == to) return r;

  // Distance-to-target labels, then a greedy walk that always steps to the
  // smallest-id neighbor one hop closer: that is the lexicographically
  // smallest node-id sequence among all minimum-hop paths.
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> work{to};
  dist[static_cast<std::size_t>(to)] = 0;
  while (!work.empty()) {
    const int v = work.front();
    work.pop_front();
    for (int u : t.adj[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        work.push_back(u);
      }
    }
  }
  if (dist[static_cast<std::size_t>(from)] < 0) {
    throw std::invalid_argument("compute_route: no path between endpoints");
  }
  NodeId v = from;
  while (v != to) {
    NodeId next = -1;
    for (int u : t.adj[static_cast<std::size_t>(v)]) {  // adj is sorted ascending
      if (dist[static_cast<std::size_t>(u)] == dist[static_cast<std::size_t>(v)] - 1) {
        next = u;
        break;
      }
    }
    const auto& link = t.link_between(v, next);
    r.inv_bw_sum += 1.0 / link.bw;
    r.pr_sum += link.pr;
    r.path.push_back(next);
    v = next;
  }
  return r;
}

double transit_delay(const RouteInfo& r, double bytes) {
  if (!(bytes >= 0.0)) throw std::invalid_argument("transit_delay: bytes must be non-negative");
  return bytes * r.inv_bw_sum + r.pr_sum;
}

SimEngine::SimEngine(const FogTopology& topology, std::vector<WorkloadCategory> categories,
                     const GenerationConfig& generation, std::uint64_t workload_seed)
    : topology_(&topology), categories_(std::move(categories)) {
  validate_topology(topology);
  validate_categories(categories_);
  validate_generation(generation, categories_.size());
  node_states_.resize(topology.nodes.size());
  const std::uint64_t base = mix_seed(workload_seed, stream::kWorkload);
  for (NodeId c : topology.cluster_ids()) {
    sources_.emplace_back(c, generation, categories_,
                          mix_seed(base, static_cast<std::uint64_t>(c)));
    push_event(sources_.back().first_gap(), EventKind::JobCreated, 0, c);
  }
}

void SimEngine::push_event(double time, EventKind kind, JobId job, NodeId node) {
  events_.push(Event{time, next_seq_++, kind, job, node});
}

void SimEngine::touch_queue(NodeId node) {
  auto& st = node_states_[static_cast<std::size_t>(node)];
  st.q_integral += static_cast<double>(queued_at(node)) * (now_ - st.q_last_time);
  st.q_last_time = now_;
}

std::uint64_t SimEngine::queued_at(NodeId node) const {
  const auto& st = node_states_.at(static_cast<std::size_t>(node));
  return st.waiting.size() + (st.in_service ? 1 : 0);
}

double SimEngine::time_avg_queue(NodeId node) const {
  if (now_ <= 0.0) return 0.0;
  return node_states_.at(static_cast<std::size_t>(node)).q_integral / now_;
}

double SimEngine::time_avg_queue_total() const {
  if (now_ <= 0.0) return 0.0;
  return total_q_integral_ / now_;
}

void SimEngine::start_service(NodeId node, JobId id) {
  auto& st = node_states_[static_cast<std::size_t>(node)];
  auto& job = jobs_.at(id);
  st.in_service = id;
  job.t_service_start = now_;
  const double service = job.instructions / topology_->node(node).ipt;
  push_event(now_ + service, EventKind::ServiceComplete, id, node);
}

const RouteInfo& SimEngine::route(NodeId from, NodeId to) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(to));
  auto it = route_cache_.find(key);
  if (it == route_cache_.end()) {
    it = route_cache_.emplace(key, compute_route(*topology_, from, to)).first;
  }
  return it->second;
}

void SimEngine::handle(const Event& ev, const DecisionFn& decide) {
  switch (ev.kind) {
    case EventKind::JobCreated: {
      auto src = std::find_if(sources_.begin(), sources_.end(),
                              [&](const JobSource& s) { return s.cluster() == ev.node; });
      const auto creation = src->next();
      const JobId id = next_job_++;
      Job job;
      job.id = id;
      job.category = creation.category;
      job.source_cluster = ev.node;
      job.instructions = creation.instructions;
      job.t_created = now_;
      jobs_.emplace(id, job);
      ++metrics_.jobs_created;
      push_event(now_ + creation.next_gap, EventKind::JobCreated, 0, ev.node);
      if (trace_) {
        *trace_ << now_ << ' ' << ev.seq << ' ' << event_kind_name(ev.kind) << ' ' << id << ' '
                << ev.node << '\n';
      }

      const NodeId sel = decide(jobs_.at(id), *this);
      const bool valid = sel >= 0 && sel < static_cast<NodeId>(topology_->nodes.size()) &&
                         topology_->node(sel).role == NodeRole::Fog;
      if (!valid) {
        ++metrics_.jobs_dropped;
        logf(LogLevel::Warn, "job %llu dropped: decision %d is not a fog node",
             static_cast<unsigned long long>(id), sel);
        return;
      }
      auto& j = jobs_.at(id);
      j.t_assigned = now_;
      j.assigned_node = sel;
      ++in_transit_;
      const double d = transit_delay(route(ev.node, sel), categories_[j.category].request_bytes);
      push_event(now_ + d, EventKind::ArrivalAtNode, id, sel);
      return;
    }
    case EventKind::ArrivalAtNode: {
      --in_transit_;
      auto& job = jobs_.at(ev.job);
      job.t_arrived = now_;
      touch_queue(ev.node);
      total_q_integral_ += static_cast<double>(total_queued_count_) * (now_ - total_q_last_time_);
      total_q_last_time_ = now_;
      ++total_queued_count_;
      auto& st = node_states_[static_cast<std::size_t>(ev.node)];
      if (st.in_service) {
        st.waiting.push_back(ev.job);
      } else {
        start_service(ev.node, ev.job);
      }
      break;
    }
    case EventKind::ServiceComplete: {
      auto& job = jobs_.at(ev.job);
      job.t_service_end = now_;
      ++metrics_.jobs_served;
      metrics_.sum_sojourn += now_ - job.t_arrived;
      touch_queue(ev.node);
      total_q_integral_ += static_cast<double>(total_queued_count_) * (now_ - total_q_last_time_);
      total_q_last_time_ = now_;
      --total_queued_count_;
      auto& st = node_states_[static_cast<std::size_t>(ev.node)];
      st.in_service.reset();
      if (!st.waiting.empty()) {
        const JobId nxt = st.waiting.front();
        st.waiting.pop_front();
        start_service(ev.node, nxt);
      }
      ++in_transit_;
      const double d =
          transit_delay(route(ev.node, job.source_cluster), categories_[job.category].response_bytes);
      push_event(now_ + d, EventKind::ResponseDelivered, ev.job, job.source_cluster);
      break;
    }
    case EventKind::ResponseDelivered: {
      --in_transit_;
      auto& job = jobs_.at(ev.job);
      job.t_completed = now_;
      ++metrics_.jobs_completed;
      metrics_.sum_exec_delay += now_ - job.t_created;
      if (!keep_completed_) jobs_.erase(ev.job);
      break;
    }
  }
  if (trace_) {
    *trace_ << now_ << ' ' << ev.seq << ' ' << event_kind_name(ev.kind) << ' ' << ev.job << ' '
            << ev.node << '\n';
  }
}

void SimEngine::run_until(double t_end, const DecisionFn& decide) {
  if (t_end < now_) throw std::invalid_argument("run_until: horizon precedes current time");
  while (!events_.empty() && events_.top().time <= t_end) {
    const Event ev = events_.top();
    events_.pop();
    now_ = ev.time;
    handle(ev, decide);
  }
  now_ = t_end;
  for (std::size_t v = 0; v < node_states_.size(); ++v) touch_queue(static_cast<NodeId>(v));
  total_q_integral_ += static_cast<double>(total_queued_count_) * (now_ - total_q_last_time_);
  total_q_last_time_ = now_;
}

}  // namespace fogforge
