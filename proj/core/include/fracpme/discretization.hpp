// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "fracpme/fem.hpp"
#include "fracpme/mesh.hpp"
#include "fracpme/spectral.hpp"

namespace fracpme {

/// Mesh plus everything assembled from it once: P1 operators and the
/// spectral decomposition. Immutable and shareable between runs.
struct Discretization {
  Mesh mesh;
  FemOperators fem;
  SpectralDecomposition spectral;

  static std::shared_ptr<const Discretization> build(Mesh mesh, const EigenOptions& options = {});

  Eigen::Index num_nodes() const { return static_cast<Eigen::Index>(mesh.num_vertices()); }
};

}  // namespace fracpme
