#include "smartbag/gateway/clock.hpp"

#include <cmath>
#include <stdexcept>

namespace smartbag::gateway {
namespace {

std::int64_t wall_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Interruptible sleep on the steady clock.
bool wait_until(std::chrono::steady_clock::time_point deadline, std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  cv.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

}  // namespace

std::int64_t SystemClock::now_ms() { return wall_millis(); }

bool SystemClock::sleep_until(std::int64_t deadline_ms, std::stop_token stop) {
  while (true) {
    const auto remaining = deadline_ms - now_ms();
    if (remaining <= 0) return !stop.stop_requested();
    if (!wait_until(std::chrono::steady_clock::now() + std::chrono::milliseconds(remaining), stop))
      return false;
  }
}

ScaledClock::ScaledClock(double speed)
    : speed_(speed), origin_ms_(wall_millis()), origin_(std::chrono::steady_clock::now()) {
  if (!(speed > 0) || !std::isfinite(speed)) throw std::invalid_argument("clock speed must be > 0");
}

std::int64_t ScaledClock::now_ms() {
  const std::chrono::duration<double, std::milli> real = std::chrono::steady_clock::now() - origin_;
  return origin_ms_ + static_cast<std::int64_t>(std::floor(real.count() * speed_));
}

bool ScaledClock::sleep_until(std::int64_t deadline_ms, std::stop_token stop) {
  while (true) {
    const auto remaining = deadline_ms - now_ms();
    if (remaining <= 0) return !stop.stop_requested();
    const auto real = std::chrono::duration<double, std::milli>(static_cast<double>(remaining) / speed_);
    if (!wait_until(std::chrono::steady_clock::now() +
                        std::chrono::ceil<std::chrono::microseconds>(real),
                    stop))
      return false;
  }
}

std::int64_t ManualClock::now_ms() {
  std::lock_guard lock(mutex_);
  return now_;
}

bool ManualClock::sleep_until(std::int64_t deadline_ms, std::stop_token stop) {
  std::unique_lock lock(mutex_);
  return changed_.wait(lock, stop, [&] { return now_ >= deadline_ms; });
}

void ManualClock::set(std::int64_t t_ms) {
  {
    std::lock_guard lock(mutex_);
    now_ = t_ms;
  }
  changed_.notify_all();
}

void ManualClock::advance(std::int64_t delta_ms) {
  {
    std::lock_guard lock(mutex_);
    now_ += delta_ms;
  }
  changed_.notify_all();
}

}  // namespace smartbag::gateway
