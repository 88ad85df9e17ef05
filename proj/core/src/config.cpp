#include "ftalloc/config.hpp"

#include <cmath>

#include "ftalloc/error.hpp"

namespace ftalloc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

}  // namespace

void GameConfig::validate() const {
  require(epsilon_total > 0.0 && epsilon_total < 1.0,
          "epsilon_total must lie in (0, 1)");
  require(eps_min > 0.0 && eps_min < 1.0 / 3.0,
          "eps_min must lie in (0, 1/3)");
  require(weight_w > 0.0 && weight_w < 1.0, "weight_w must lie in (0, 1)");
  require(restarts_K >= 1, "restarts_K must be positive");
  require(max_sweeps_Tmax >= 1, "max_sweeps_Tmax must be positive");
  require(std::isfinite(tol_delta) && tol_delta >= 0.0,
          "tol_delta must be a nonnegative real");
  require(brent_xtol > 0.0, "brent_xtol must be positive");
  require(brent_max_eval >= 3, "brent_max_eval must be at least 3");
  require(bracket_scan_points == 0 || bracket_scan_points >= 3,
          "bracket_scan_points must be 0 or at least 3");
}

}  // namespace ftalloc
