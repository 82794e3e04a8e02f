#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "islanddb/topology.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

// Identity of the worker running a task; used for locality accounting.
struct TaskContext {
  std::uint32_t worker_id = 0;
  std::uint32_t vault = 0;
  std::uint32_t vault_group = 0;
};

// Unit of analytical work: one operator stage over one data segment. Tasks
// are enqueued on the lane of their home vault inside their home group's
// queue. A vault-pinned task may only run on workers of its home vault
// (single-location placement); unpinned tasks are fair game for stealing.
struct Task {
  std::uint64_t task_id = 0;
  std::uint32_t home_group = 0;
  std::uint32_t home_vault = 0;
  bool vault_pinned = false;
  std::function<void(const TaskContext&)> run;
};

struct SchedulerCounters {
  std::atomic<std::uint64_t> tasks_executed{0};
  std::atomic<std::uint64_t> pops_local{0};          // taken from the worker's own lane
  std::atomic<std::uint64_t> steals_in_group{0};     // taken from a sibling lane, same group
  std::atomic<std::uint64_t> steals_cross_group{0};  // taken from another group's queue
  std::atomic<std::uint64_t> local_column_accesses{0};
  std::atomic<std::uint64_t> remote_column_accesses{0};
  std::atomic<std::uint64_t> local_dict_accesses{0};
  std::atomic<std::uint64_t> remote_dict_accesses{0};

  void reset() {
    tasks_executed = 0;
    pops_local = 0;
    steals_in_group = 0;
    steals_cross_group = 0;
    local_column_accesses = 0;
    remote_column_accesses = 0;
    local_dict_accesses = 0;
    remote_dict_accesses = 0;
  }
};

// One record per executed task, kept only when event recording is on.
struct TaskEvent {
  std::uint64_t task_id = 0;
  std::uint64_t batch_id = 0;
  std::uint64_t start_seq = 0;
  std::uint64_t finish_seq = 0;
  std::uint32_t worker_vault = 0;
  std::uint32_t home_vault = 0;
  bool stolen = false;
};

struct WorkerPoolOptions {
  // At least one worker per vault is always created so vault-pinned work can
  // never strand; `max_workers` caps any workers beyond that floor.
  std::uint32_t max_workers = 0;  // 0 = vaults * workers_per_vault
  bool cross_group_stealing = true;
  bool record_events = false;
};

// Fixed pool of worker threads laid over the vault topology. Each worker is
// bound to one vault. Work discovery order: own vault's lane front, then
// sibling lanes in the same group (back), then — if enabled — lanes of other
// groups (back). Vault-pinned tasks are never stolen.
class WorkerPool {
 public:
  WorkerPool(const TopologyModel* topo, WorkerPoolOptions options);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  // Enqueues the batch and blocks until every task in it has finished,
  // which gives callers a barrier between dependent stages. Rethrows the
  // first task error after the batch drains.
  void run_and_wait(std::vector<Task> tasks);

  std::uint32_t worker_count() const { return static_cast<std::uint32_t>(workers_.size()); }
  bool has_worker_for_vault(std::uint32_t vault) const;

  SchedulerCounters& counters() { return counters_; }
  const SchedulerCounters& counters() const { return counters_; }

  std::vector<TaskEvent> drain_events();

  const TopologyModel& topology() const { return *topo_; }

 private:
  struct PendingTask {
    Task task;
    std::shared_ptr<struct BatchState> batch;
  };

  struct GroupQueue {
    std::mutex mutex;
    std::vector<std::deque<PendingTask>> lanes;  // one per vault in the group
  };

  void worker_loop(std::uint32_t worker_id);
  bool try_pop(std::uint32_t worker_id, PendingTask& out, bool& stolen);
  void execute(PendingTask& item, const TaskContext& ctx, bool stolen);

  const TopologyModel* topo_;
  WorkerPoolOptions options_;
  std::vector<std::thread> workers_;
  std::vector<std::uint32_t> worker_vault_;
  std::vector<std::unique_ptr<GroupQueue>> groups_;

  std::mutex wake_mutex_;
  std::condition_variable wake_cv_;
  std::atomic<std::uint64_t> queued_{0};
  std::atomic<bool> stopping_{false};

  SchedulerCounters counters_;
  std::atomic<std::uint64_t> event_seq_{0};
  std::atomic<std::uint64_t> next_batch_id_{0};
  std::mutex events_mutex_;
  std::vector<TaskEvent> events_;
};

}  // namespace islanddb
