#include "islanddb/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace islanddb {

struct BatchState {
  std::uint64_t batch_id = 0;
  std::atomic<std::uint64_t> remaining{0};
  std::mutex mutex;
  std::condition_variable done_cv;
  bool failed = false;
  std::string error;
};

WorkerPool::WorkerPool(const TopologyModel* topo, WorkerPoolOptions options)
    : topo_(topo), options_(options) {
  const TopologyConfig& cfg = topo_->config();
  const std::uint32_t full = cfg.vaults * cfg.workers_per_vault;
  std::uint32_t count = full;
  if (options_.max_workers != 0) {
    count = std::min(options_.max_workers, full);
  }
  // Floor at one worker per vault: a vault-pinned task on a vault without
  // workers would never run.
  count = std::max(count, cfg.vaults);

  groups_.reserve(topo_->groups());
  for (std::uint32_t g = 0; g < topo_->groups(); ++g) {
    auto q = std::make_unique<GroupQueue>();
    q->lanes.resize(cfg.vault_group_size);
    groups_.push_back(std::move(q));
  }

  worker_vault_.resize(count);
  workers_.reserve(count);
  for (std::uint32_t w = 0; w < count; ++w) {
    worker_vault_[w] = w % cfg.vaults;
    workers_.emplace_back([this, w] { worker_loop(w); });
  }
}

WorkerPool::~WorkerPool() {
  stopping_.store(true, std::memory_order_release);
  {
    std::lock_guard<std::mutex> lk(wake_mutex_);
  }
  wake_cv_.notify_all();
  for (std::thread& t : workers_) {
    if (t.joinable()) t.join();
  }
}

bool WorkerPool::has_worker_for_vault(std::uint32_t vault) const {
  return std::find(worker_vault_.begin(), worker_vault_.end(), vault) != worker_vault_.end();
}

void WorkerPool::run_and_wait(std::vector<Task> tasks) {
  if (tasks.empty()) return;
  const TopologyConfig& cfg = topo_->config();

  auto batch = std::make_shared<BatchState>();
  batch->batch_id = next_batch_id_.fetch_add(1, std::memory_order_relaxed);
  batch->remaining.store(tasks.size(), std::memory_order_relaxed);

  for (Task& t : tasks) {
    if (t.home_vault >= cfg.vaults || t.home_group != topo_->group_of_vault(t.home_vault)) {
      throw ContractError("task homed outside the configured topology");
    }
    if (!t.run) {
      throw ContractError("task has no body");
    }
    GroupQueue& q = *groups_[t.home_group];
    const std::uint32_t lane = t.home_vault % cfg.vault_group_size;
    PendingTask item;
    item.batch = batch;
    item.task = std::move(t);
    {
      std::lock_guard<std::mutex> lk(q.mutex);
      q.lanes[lane].push_back(std::move(item));
    }
    queued_.fetch_add(1, std::memory_order_release);
  }
  {
    std::lock_guard<std::mutex> lk(wake_mutex_);
  }
  wake_cv_.notify_all();

  std::unique_lock<std::mutex> lk(batch->mutex);
  batch->done_cv.wait(lk, [&] { return batch->remaining.load(std::memory_order_acquire) == 0; });
  if (batch->failed) {
    throw Error("analytical task failed: " + batch->error);
  }
}

bool WorkerPool::try_pop(std::uint32_t worker_id, PendingTask& out, bool& stolen) {
  const TopologyConfig& cfg = topo_->config();
  const std::uint32_t vault = worker_vault_[worker_id];
  const std::uint32_t group = topo_->group_of_vault(vault);
  const std::uint32_t own_lane = vault % cfg.vault_group_size;

  auto steal_from_lane = [&](std::deque<PendingTask>& lane) -> bool {
    for (auto it = lane.rbegin(); it != lane.rend(); ++it) {
      if (!it->task.vault_pinned) {
        out = std::move(*it);
        lane.erase(std::next(it).base());
        return true;
      }
    }
    return false;
  };

  {
    GroupQueue& q = *groups_[group];
    std::lock_guard<std::mutex> lk(q.mutex);
    if (!q.lanes[own_lane].empty()) {
      out = std::move(q.lanes[own_lane].front());
      q.lanes[own_lane].pop_front();
      stolen = false;
      counters_.pops_local.fetch_add(1, std::memory_order_relaxed);
      return true;
    }
    for (std::uint32_t i = 1; i < cfg.vault_group_size; ++i) {
      std::uint32_t lane = (own_lane + i) % cfg.vault_group_size;
      if (steal_from_lane(q.lanes[lane])) {
        stolen = true;
        counters_.steals_in_group.fetch_add(1, std::memory_order_relaxed);
        return true;
      }
    }
  }

  if (options_.cross_group_stealing) {
    const std::uint32_t n_groups = topo_->groups();
    for (std::uint32_t i = 1; i < n_groups; ++i) {
      GroupQueue& q = *groups_[(group + i) % n_groups];
      std::lock_guard<std::mutex> lk(q.mutex);
      for (std::uint32_t lane = 0; lane < cfg.vault_group_size; ++lane) {
        if (steal_from_lane(q.lanes[lane])) {
          stolen = true;
          counters_.steals_cross_group.fetch_add(1, std::memory_order_relaxed);
          return true;
        }
      }
    }
  }
  return false;
}

void WorkerPool::execute(PendingTask& item, const TaskContext& ctx, bool stolen) {
  TaskEvent event;
  event.task_id = item.task.task_id;
  event.batch_id = item.batch->batch_id;
  event.worker_vault = ctx.vault;
  event.home_vault = item.task.home_vault;
  event.stolen = stolen;
  event.start_seq = event_seq_.fetch_add(1, std::memory_order_relaxed);

  try {
    item.task.run(ctx);
  } catch (const std::exception& e) {
    std::lock_guard<std::mutex> lk(item.batch->mutex);
    if (!item.batch->failed) {
      item.batch->failed = true;
      item.batch->error = e.what();
    }
  }

  event.finish_seq = event_seq_.fetch_add(1, std::memory_order_relaxed);
  counters_.tasks_executed.fetch_add(1, std::memory_order_relaxed);
  if (options_.record_events) {
    std::lock_guard<std::mutex> lk(events_mutex_);
    events_.push_back(event);
  }

  if (item.batch->remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) {
    std::lock_guard<std::mutex> lk(item.batch->mutex);
    item.batch->done_cv.notify_all();
  }
}

void WorkerPool::worker_loop(std::uint32_t worker_id) {
  const TaskContext ctx{worker_id, worker_vault_[worker_id],
                        topo_->group_of_vault(worker_vault_[worker_id])};
  while (!stopping_.load(std::memory_order_acquire)) {
    PendingTask item;
    bool stolen = false;
    if (try_pop(worker_id, item, stolen)) {
      queued_.fetch_sub(1, std::memory_order_relaxed);
      execute(item, ctx, stolen);
      continue;
    }
    std::unique_lock<std::mutex> lk(wake_mutex_);
    wake_cv_.wait_for(lk, std::chrono::microseconds(200), [&] {
      return stopping_.load(std::memory_order_acquire) ||
             queued_.load(std::memory_order_acquire) > 0;
    });
  }
}

std::vector<TaskEvent> WorkerPool::drain_events() {
  std::lock_guard<std::mutex> lk(events_mutex_);
  std::vector<TaskEvent> out;
  out.swap(events_);
  return out;
}

}  // namespace islanddb
