#include "coverax/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace coverax {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyShape: return "EmptyShape";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::MissingNormals: return "MissingNormals";
    case ErrorCode::RejectionStarvation: return "RejectionStarvation";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NegativeDilation: return "NegativeDilation";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NonpositiveFactor: return "NonpositiveFactor";
    case ErrorCode::EmptySkeleton: return "EmptySkeleton";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

unsigned worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("COVERAX_THREADS")) {
    n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1 || count < 256) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace coverax
