#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace coverax {

using Vec3 = Eigen::Vector3d;
/// Column-major point set, one point per column.
using Points = Eigen::Matrix3Xd;

enum class ErrorCode {
  ParseError,
  EmptyShape,
  TooFewPoints,
  MissingNormals,
  RejectionStarvation,
  EmptySet,
  NegativeDilation,
  LengthMismatch,
  EmptyCandidates,
  DegenerateInput,
  NonpositiveFactor,
  EmptySkeleton,
  UsageError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Seedable 64-bit generator. std::mt19937_64 has a fully specified output
/// sequence, and the conversions below avoid the implementation-defined
/// standard distributions, so draws reproduce across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent per-stage seeds from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Worker count from COVERAX_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [begin, end) over worker_count() threads. Each index
/// is visited exactly once; callers write to disjoint slots so results do not
/// depend on the schedule.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace coverax
