// Internal: bounded in-flight counter for network clients.
#pragma once

#include <condition_variable>
#include <mutex>

namespace necorr::detail {

class InFlightLimit {
public:
  explicit InFlightLimit(int cap) : available_(cap > 0 ? cap : 1) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return available_ > 0; });
    --available_;
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

  struct Guard {
    InFlightLimit& limit;
    explicit Guard(InFlightLimit& l) : limit(l) { limit.acquire(); }
    ~Guard() { limit.release(); }
  };

private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

}  // namespace necorr::detail
