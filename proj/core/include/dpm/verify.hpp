#pragma once

#include <string>
#include <vector>

namespace dpm::verify {

struct Identity {
  std::string name;
  double error = 0.0;      // measured defect
  double tolerance = 0.0;  // pass iff error <= tolerance
  bool pass = false;
};

/// Built-in identities of the spectral operators, the Darcy velocity, the
/// solver's conservation properties, the 1D stream-slope module and the
/// file formats, each on small fixed cases.
std::vector<Identity> run_all();

}  // namespace dpm::verify
