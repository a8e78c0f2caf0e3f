// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracpme/fem.hpp"
#include "fracpme/mesh.hpp"
#include "fracpme/stepper.hpp"

namespace fracpme {

/// Any problem with a configuration file: syntax, unknown keys, wrong types
/// or out-of-range values. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial density. All variants are nonnegative.
///   gaussian: exp(-|x - center|^2 / (2 pi sigma)), rescaled to mean 1
///   constant: value everywhere
///   uniform:  constant with total mass `mass` (defaults: |Omega| in
///             standard mode, the profile mass in self-similar mode)
///   cosine:   1 + amplitude cos(pi (x - xmin)/W) cos(pi (y - ymin)/H), |amplitude| <= 1
struct InitialSpec {
  std::string type = "gaussian";
  double sigma = 0.05;
  std::array<double, 2> center{0.0, 0.0};
  double value = 1.0;
  double mass = -1.0;  // negative means "use the default"
  double amplitude = 0.5;
};

/// Source of the single fractional Poisson solve: the Neumann eigenfunction
/// cos(kx pi (x - xmin)/W) cos(ky pi (y - ymin)/H), whose exact potential is known.
struct FracPoissonSpec {
  int kx = 1;
  int ky = 0;
};

/// Grid of a refinement study. h_levels are exponents n with h = 2^-n
/// relative to a unit cell width; dt_levels are exponents k with dt = 2^-k.
struct SweepSpec {
  std::vector<int> h_levels{2, 3, 4};
  std::vector<int> dt_levels{6};
  std::vector<double> deltas;    // empty: the top-level delta
  std::vector<double> epsilons;  // empty: the top-level epsilon
};

struct RunConfig {
  Bounds domain{0.0, 1.0, 0.0, 1.0};
  int nx = 16;
  int ny = 16;
  MeshPattern pattern = MeshPattern::RightDiagonal;
  SolverConfig solver;
  InitialSpec initial;
  FracPoissonSpec fracpoisson;
  SweepSpec sweep;
  bool eig_vectors = false;
  std::size_t max_nodes = 4225;
  std::string source_text;  // the JSON as read, echoed into manifests
};

/// Parses and validates a JSON document. Unknown keys are rejected.
/// `mode` selects which mode-specific defaults apply.
RunConfig parse_config(const std::string& json_text, Mode mode);
RunConfig load_config(const std::filesystem::path& path, Mode mode);

Mesh build_mesh(const RunConfig& cfg);

/// Nodal values of the configured initial density on `mesh`.
NodalField make_initial_datum(const RunConfig& cfg, const Mesh& mesh, const Vector& lumped_mass);

/// Documentation of the accepted keys, as a JSON schema string.
const char* config_schema();

}  // namespace fracpme
