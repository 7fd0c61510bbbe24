#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "weightlab/geometry.hpp"
#include "weightlab/tails.hpp"
#include "weightlab/weights.hpp"

namespace weightlab {

struct Witness {
  std::string weight_id;
  Cube cube;
  /// Ordered (name, value) pairs such as p, delta, lhs and rhs.
  std::vector<std::pair<std::string, double>> params;
};

/// Outcome of one theorem check over a test matrix. worst_margin is the
/// minimum over tests of (rhs - lhs) / rhs, taken at the adverse ends of all
/// certified intervals; passed holds exactly when worst_margin >= -slack.
struct Verdict {
  std::string theorem;
  bool passed = true;
  double worst_margin = 0.0;
  double slack = 1e-9;
  Witness witness;
  std::size_t tests_run = 0;
  std::size_t skipped = 0;
  /// RHI checks: the exponent itself failed but half of it passed.
  bool only_half_exponent_passed = false;
  /// Weight constant and exponent actually used, where relevant.
  double weight_constant = 0.0;
  double delta = 0.0;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  EstimatorOptions estimator{};
  double slack = 1e-9;
  /// Also run every RHI check at delta / 2 and flag the case where only the
  /// halved exponent passes.
  bool half_delta_guard = true;
};

/// Merges verdicts of the same theorem: min margin, summed counts.
Verdict combine(const std::string& theorem, const std::vector<Verdict>& parts);

/// beta^{-1} a(Q) <= tail(Q) / |Q| <= (4^{np} / beta) a(Q) for every cube.
Verdict check_tail_equivalence(const Weight& w, const CubeFamily& family, double p, const VerifyOptions& options = {});

/// (avg_Q w^{1+d})^{1/(1+d)} <= 4 tail(Q) / |Q| with d = 1 / (B max([w]_{C_p}, 1)).
Verdict check_rhi_cp(const Weight& w, const CubeFamily& family, double p, const VerifyOptions& options = {});

/// (avg_Q w^{1+d})^{1/(1+d)} <= 2 avg_Q w with d = 1 / (2^{n+1} [w]_{A_inf} - 1).
Verdict check_rhi_ainfty(const Weight& w, const CubeFamily& family, const VerifyOptions& options = {});

/// (avg_Q w^{1+d})^{1/(1+d)} <= (2^n + 1) a_{C_p,s}(sQ) with d = 1 / (A_{s,p} max(1, [w]_{C_p,s})).
Verdict check_rhi_dilation(const Weight& w, const CubeFamily& family, double p, double s,
                           const VerifyOptions& options = {});

/// w(E) <= 2 (|E| / |Q|)^eps tail(Q) for every subset, eps from the explicit
/// formula with the supplied C_p constant. Subsets live on a grid over Q.
Verdict check_cp_definition(const Weight& w, const Cube& q, double p, double cp_value,
                            const std::vector<CellSet>& subsets, const VerifyOptions& options = {});

/// Every dyadic subcube of Q to `depth` plus `random_unions` seeded random
/// unions of cells of the 2^depth grid over Q.
std::vector<CellSet> cp_definition_subsets(const Cube& q, int depth, int random_unions, std::mt19937_64& rng);

/// [w]_{C_q} <= [w]_{C_p} <= [w]_{A_inf} for q <= p on one family.
Verdict check_monotonicity(const Weight& w, const CubeFamily& family, double q, double p,
                           const VerifyOptions& options = {});

struct SweepRow {
  double eps = 0.0;
  double cp = 0.0;
  double cp_upper = 0.0;
  double ratio = 0.0;
  Cube argmax;
};

struct SweepResult {
  double p = 2.0;
  std::vector<SweepRow> rows;
  bool strictly_decreasing = true;
  /// max / min of cp / eps across the rows.
  double ratio_band = 0.0;
};

/// cp_constant of |x|^{n(p-1-eps)} for each eps, in the given order.
SweepResult sweep_power_weights(double p, const std::vector<double>& eps_list, const CubeFamily& family,
                                const EstimatorOptions& options = {});

}  // namespace weightlab
