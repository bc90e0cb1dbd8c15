#include "retrovote/metrics.hpp"

namespace retrovote {

// Explicit instantiation for the common dense vector case.
template double pms(const Eigen::MatrixBase<Vector>&, const Eigen::MatrixBase<Vector>&);

}  // namespace retrovote
