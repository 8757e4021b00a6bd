#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <unordered_map>
#include <vector>

#include "fogforge/topology.hpp"
#include "fogforge/workload.hpp"

namespace fogforge {

using JobId = std::uint64_t;

struct Job {
  JobId id = 0;
  std::size_t category = 0;
  NodeId source_cluster = -1;
  NodeId assigned_node = -1;
  double instructions = 0.0;
  // Lifecycle stamps; -1 until the stage is reached. t_completed is when the
  // response lands back at the source cluster.
  double t_created = -1.0;
  double t_assigned = -1.0;
  double t_arrived = -1.0;
  double t_service_start = -1.0;
  double t_service_end = -1.0;
  double t_completed = -1.0;
};

enum class EventKind { JobCreated, ArrivalAtNode, ServiceComplete, ResponseDelivered };

const char* event_kind_name(EventKind k);

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;  // push order; breaks time ties deterministically
  EventKind kind = EventKind::JobCreated;
  JobId job = 0;
  NodeId node = -1;
};

// Min-hop route with the lexicographically smallest node-id sequence among
// equal-length candidates. Transfer of `bytes` over it costs
// bytes * inv_bw_sum + pr_sum.
struct RouteInfo {
  std::vector<NodeId> path;  // from, ..., to (just {from} when from == to)
  double inv_bw_sum = 0.0;
  double pr_sum = 0.0;
};

RouteInfo compute_route(const FogTopology& t, NodeId from, NodeId to);
double transit_delay(const RouteInfo& r, double bytes);

struct SimMetrics {
  std::uint64_t jobs_created = 0;
  std::uint64_t jobs_completed = 0;
  std::uint64_t jobs_dropped = 0;  // decision callback returned a non-fog node
  double sum_exec_delay = 0.0;     // sum over completed jobs of t_completed - t_created
  double sum_sojourn = 0.0;        // sum over served jobs of t_service_end - t_arrived
  std::uint64_t jobs_served = 0;   // service completions (response may still be in flight)

  double mean_exec_delay() const {
    return jobs_completed == 0 ? 0.0 : sum_exec_delay / static_cast<double>(jobs_completed);
  }
  double mean_sojourn() const {
    return jobs_served == 0 ? 0.0 : sum_sojourn / static_cast<double>(jobs_served);
  }
};

class SimEngine {
 public:
  // The decision callback maps a freshly created job to the fog node that will
  // serve it. It runs once per job, in creation order.
  using DecisionFn = std::function<NodeId(const Job&, SimEngine&)>;

  SimEngine(const FogTopology& topology, std::vector<WorkloadCategory> categories,
            const GenerationConfig& generation, std::uint64_t workload_seed);

  void set_trace(std::ostream* trace) { trace_ = trace; }

  // Completed jobs are retained for inspection by default; long soak runs can
  // turn that off to keep memory flat.
  void set_keep_completed(bool keep) { keep_completed_ = keep; }

  // Processes every event with time <= t_end, then advances the clock to
  // t_end. Callable repeatedly with increasing horizons.
  void run_until(double t_end, const DecisionFn& decide);

  double now() const { return now_; }
  const FogTopology& topology() const { return *topology_; }
  const std::vector<WorkloadCategory>& categories() const { return categories_; }

  // Jobs waiting or in service at this node / across all nodes.
  std::uint64_t queued_at(NodeId node) const;
  std::uint64_t total_queued() const { return total_queued_count_; }
  // Jobs on the wire (request or response in transit).
  std::uint64_t in_transit() const { return in_transit_; }

  // Time average of queued_at / total_queued over [0, now].
  double time_avg_queue(NodeId node) const;
  double time_avg_queue_total() const;

  const SimMetrics& metrics() const { return metrics_; }
  const Job& job(JobId id) const { return jobs_.at(id); }

 private:
  struct NodeState {
    std::deque<JobId> waiting;
    std::optional<JobId> in_service;
    double q_integral = 0.0;   // integral of (waiting + in_service) dt
    double q_last_time = 0.0;  // clock value of the last integral update
  };

  void push_event(double time, EventKind kind, JobId job, NodeId node);
  void touch_queue(NodeId node);  // fold elapsed time into q_integral
  void start_service(NodeId node, JobId job);
  void handle(const Event& ev, const DecisionFn& decide);
  const RouteInfo& route(NodeId from, NodeId to);

  const FogTopology* topology_;
  std::vector<WorkloadCategory> categories_;
  std::vector<JobSource> sources_;

  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_job_ = 0;
  double now_ = 0.0;
  double total_q_integral_ = 0.0;
  double total_q_last_time_ = 0.0;
  std::uint64_t total_queued_count_ = 0;
  std::uint64_t in_transit_ = 0;
  bool keep_completed_ = true;

  std::unordered_map<JobId, Job> jobs_;
  std::vector<NodeState> node_states_;
  std::unordered_map<std::uint64_t, RouteInfo> route_cache_;
  SimMetrics metrics_;
  std::ostream* trace_ = nullptr;
};

}  // namespace fogforge
