#pragma once

#include <cstdint>
#include <string>

namespace rownav {

/// Writes a pipeline fixture set into `dir`: PGM mask/depth pairs (random
/// grids plus frames rendered from the simulator) and a manifest.json
/// describing each case's perception parameters.
void make_fixtures(const std::string& dir, std::uint64_t seed);

struct OracleCheckResult {
  bool ok = false;
  int cases_checked = 0;
  std::string first_mismatch;  // "case/stage" of the first disagreement
};

/// Replays every fixture case through both the library pipeline and the
/// brute-force reference, stage by stage, requiring agreement within 1e-9.
/// Throws SpecError for a missing/corrupt fixture directory.
OracleCheckResult check_fixtures_against_oracle(const std::string& dir);

}  // namespace rownav
