#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xtal {

using Real = double;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec3i = Eigen::Matrix<std::int64_t, 3, 1>;

inline constexpr Real kSqrt2 = 1.41421356237309504880;
inline constexpr Real kSqrt3 = 1.73205080756887729353;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct CapacityError : Error {
  using Error::Error;
};
struct UnsupportedDomainError : Error {
  using Error::Error;
};
struct InfeasibleError : Error {
  using Error::Error;
};
struct TuningError : Error {
  using Error::Error;
};
struct SingularConfigurationError : Error {
  using Error::Error;
};
struct ClassificationError : Error {
  using Error::Error;
};
struct EmbeddingObstruction : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct UnknownIdError : Error {
  using Error::Error;
};
struct TrustRegionError : Error {
  using Error::Error;
};

/// A set of particles, optionally periodic. The cell columns are the
/// periodicity vectors; positions of a periodic configuration form its motif.
struct Configuration {
  std::vector<Vec3> positions;
  std::optional<Mat3> cell;

  std::size_t size() const { return positions.size(); }
  bool periodic() const { return cell.has_value(); }
};

/// Number of worker threads used by parallel kernels (>= 1).
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise-tree sum with a fixed split, independent of thread count.
Real pairwise_sum(const Real* data, std::size_t n);
inline Real pairwise_sum(const std::vector<Real>& v) { return pairwise_sum(v.data(), v.size()); }

/// Proper rotation R minimizing sum_i w_i |R p_i - q_i|^2 (Kabsch).
Mat3 kabsch(const std::vector<Vec3>& p, const std::vector<Vec3>& q,
            const std::vector<Real>* weights = nullptr);

/// Closest proper rotation to M in the Frobenius norm.
Mat3 nearest_rotation(const Mat3& m);

}  // namespace xtal
