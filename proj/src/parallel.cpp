#include "reiflab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace reiflab {
namespace {

std::atomic<int> g_threads{0};

constexpr std::size_t kDotBlock = 4096;

}  // namespace

void set_thread_count(int n) { g_threads = std::max(n, 1); }

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t blocks = (n + kDotBlock - 1) / kDotBlock;
  if (blocks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t first = blk * kDotBlock;
    const std::size_t last = std::min(n, first + kDotBlock);
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += a[i] * b[i];
    partial[blk] = s;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace reiflab
