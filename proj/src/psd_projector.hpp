// Copyright 2026 The atomic-sdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATOMIC_SDP_SRC_PSD_PROJECTOR_HPP
#define ATOMIC_SDP_SRC_PSD_PROJECTOR_HPP

#include <Eigen/Dense>

#include "atomic_sdp/conic.hpp"

namespace atomic_sdp::internal {

// Projects one svec-packed block onto the PSD cone.
//
// Only the smaller side of the spectrum is computed: near convergence the
// iterate has few negative eigenvalues, so X - sum_{lambda<0} lambda v v^*
// needs a handful of eigenpairs instead of a full decomposition. The side
// is chosen from the count seen on the previous call.
class BlockProjector {
 public:
  explicit BlockProjector(PsdBlock block);

  void project(Eigen::Ref<Eigen::VectorXd> packed);

  /// Smallest eigenvalue of the unpacked block (full decomposition).
  double min_eigenvalue(const Eigen::Ref<const Eigen::VectorXd>& packed) const;

 private:
  void project_real(Eigen::Ref<Eigen::VectorXd> packed);
  void project_complex(Eigen::Ref<Eigen::VectorXd> packed);

  PsdBlock block_;
  int negative_hint_ = 0;
  Eigen::MatrixXd real_work_;
  Eigen::MatrixXd real_vectors_;
  Eigen::MatrixXcd complex_work_;
  Eigen::MatrixXcd complex_vectors_;
  Eigen::VectorXd values_;
  std::vector<int> support_;
};

}  // namespace atomic_sdp::internal

#endif  // ATOMIC_SDP_SRC_PSD_PROJECTOR_HPP
