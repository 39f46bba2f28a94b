#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>
#include <vector>

namespace iacforge::util {

// Fixed-size FIFO thread pool. Destruction waits for all queued work.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(std::function<void()> task);

  // Blocks until the queue is empty and no task is running.
  void wait_idle();

  std::size_t size() const { return threads_.size(); }

  static std::size_t default_workers();

 private:
  void worker_main();

  std::vector<std::thread> threads_;
  std::queue<std::function<void()>> queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::size_t active_ = 0;
  bool stop_ = false;
};

// Runs fn(i) for i in [0, n) on the pool and waits for completion.
// Exceptions from tasks are rethrown (the first one captured).
void parallel_for(WorkerPool& pool, std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace iacforge::util
