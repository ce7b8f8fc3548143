#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "ihse/parallel.hpp"
#include "ihse/rng.hpp"

namespace ihse {

Vec random_unit_vector(CounterRng& rng, Eigen::Index n) {
  Vec g(n);
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < n; ++k) g(k) = rng.normal();
    norm = g.norm();
  } while (norm < 1e-12);
  return g / norm;
}

Vec random_in_ball(CounterRng& rng, Eigen::Index n, double radius) {
  const Vec dir = random_unit_vector(rng, n);
  return radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n)) * dir;
}

double ball_volume(int n, double radius) {
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(radius, n);
}

unsigned worker_count() {
  if (const char* env = std::getenv("IHSE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ihse
