#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace nfbc {

// Persistent worker pool for slab-parallel loops.
//
// run(fn) invokes fn(t) for t in [0, nthreads); the calling thread executes
// t = 0 and nthreads-1 workers execute the rest. With nthreads == 1 no
// threads are ever created and run() is a plain inline call, so serial
// execution has zero synchronization overhead.
//
// Determinism contract: callers partition work into disjoint write ranges
// (slab_range below); any reduction across slabs is performed serially by
// the caller afterwards, in slab order. Results are then bitwise identical
// for every thread count.
class SlabPool {
 public:
  explicit SlabPool(int nthreads) : n_(nthreads < 1 ? 1 : nthreads) {
    for (int t = 1; t < n_; ++t) {
      workers_.emplace_back([this, t] { worker_loop(t); });
    }
  }

  SlabPool(const SlabPool&) = delete;
  SlabPool& operator=(const SlabPool&) = delete;

  ~SlabPool() {
    {
      std::unique_lock<std::mutex> lk(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_start_.notify_all();
    for (auto& w : workers_) w.join();
  }

  int nthreads() const { return n_; }

  void run(const std::function<void(int)>& fn) {
    if (n_ == 1) {
      fn(0);
      return;
    }
    {
      std::unique_lock<std::mutex> lk(mu_);
      fn_ = &fn;
      pending_ = n_ - 1;
      ++generation_;
    }
    cv_start_.notify_all();
    fn(0);
    std::unique_lock<std::mutex> lk(mu_);
    cv_done_.wait(lk, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void worker_loop(int t) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* fn = nullptr;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_start_.wait(lk, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        fn = fn_;
      }
      (*fn)(t);
      {
        std::unique_lock<std::mutex> lk(mu_);
        if (--pending_ == 0) cv_done_.notify_one();
      }
    }
  }

  int n_;
  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_start_, cv_done_;
  const std::function<void(int)>* fn_ = nullptr;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

// Contiguous [begin, end) chunk of n items for slab t of nslabs.
inline std::pair<long, long> slab_range(long n, int t, int nslabs) {
  const long q = n / nslabs, r = n % nslabs;
  const long begin = t * q + (t < r ? t : r);
  const long len = q + (t < r ? 1 : 0);
  return {begin, begin + len};
}

} // namespace nfbc
