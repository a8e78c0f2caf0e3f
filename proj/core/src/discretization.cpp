// SPDX-License-Identifier: Apache-2.0
#include "fracpme/discretization.hpp"

namespace fracpme {

std::shared_ptr<const Discretization> Discretization::build(Mesh mesh, const EigenOptions& options) {
  auto fem = FemOperators::assemble(mesh);
  auto spectral = compute_eigendecomposition(fem.stiffness, fem.consistent_mass, options);
  return std::make_shared<const Discretization>(
      Discretization{std::move(mesh), std::move(fem), std::move(spectral)});
}

}  // namespace fracpme
