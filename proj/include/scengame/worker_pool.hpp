#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace scengame {

/// Fixed set of persistent threads running index-parallel loops. Work items
/// write to per-index slots, so results never depend on the thread count.
class WorkerPool {
 public:
  /// workers <= 0 means one per hardware thread.
  explicit WorkerPool(int workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return size_; }

  /// Calls fn(i) for i in [0, n) and blocks until all calls return. The
  /// exception thrown by the lowest failing index is rethrown.
  void parallel_for(int n, const std::function<void(int)>& fn);

  static int resolve(int workers);

 private:
  void worker_loop();
  void run_items();

  int size_ = 1;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  int job_size_ = 0;
  int next_ = 0;
  int active_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace scengame
