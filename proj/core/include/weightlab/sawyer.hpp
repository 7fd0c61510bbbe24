#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "weightlab/geometry.hpp"
#include "weightlab/maximal.hpp"
#include "weightlab/numeric.hpp"
#include "weightlab/tails.hpp"
#include "weightlab/weights.hpp"

namespace weightlab {

struct LevelRange {
  int k_min = 0;
  int k_max = 0;
};

/// Dyadic levels needed by marcinkiewicz_mpq: [floor(log2 min h+), ceil(log2 max h)].
LevelRange required_levels(const GridFunction& h);

/// M_{p,q} h(x)^p = sum_k sum_{Q in W(k)} 2^{kp} (M chi_Q(x))^q with W(k) the
/// Whitney cubes of {h > 2^k}, evaluated at cell centers. Levels below
/// range.k_min share the set {h > 0} and are summed in closed form. Throws when
/// the range misses a required level or spans more than 64 levels.
GridFunction marcinkiewicz_mpq(const GridFunction& h, double p, double q, LevelRange range,
                               const WhitneyOptions& whitney = {});

struct LevelSetProfile {
  std::vector<double> lambdas;
  std::vector<double> measures;
  /// Fit of log |E_lambda| against lambda over the points with positive measure.
  LinearFit fit;
};

/// |{x in RQ : sum_j (M chi_{Q_j}(x))^q > lambda}| on a grid of `resolution`
/// cells over RQ, for `levels` equally spaced lambdas in [0, max).
LevelSetProfile fefferman_stein_profile(const Cube& q, const std::vector<Cube>& subcubes, double exponent, double R,
                                        int resolution = 4096, int levels = 24);

/// T* f for the Hilbert kernel 1 / (x - y): the sup over truncation radii that
/// are grid multiples of |sum_{|i - j| > r} f_j / (i - j)|. 1-D only; O(N^2).
GridFunction truncated_hilbert_maximal(const GridFunction& f);

/// Test signal on a 1-D grid; supported in [-1, 1].
struct Signal {
  std::string id;
  GridFunction values;
};

/// "bump", "step" or "chirp" sampled at the cell centers of the grid.
Signal make_signal(const std::string& type, const Grid& grid);

/// Builds a signal from {"type": ..., "scale": c}.
Signal signal_from_spec(const std::string& json_text, const Grid& grid);

struct GoodLambdaConfig {
  std::vector<double> gammas{0.5, 0.25, 0.125, 0.0625, 0.03125};
  /// Levels lambda = 2^k; automatic when k_min > k_max.
  int k_min = 1;
  int k_max = 0;
  int automatic_levels = 10;
  double R = 1.0;
  /// Whitney cubes kept only to complete the cover at grid resolution miss
  /// the gap band; they are left out of the fractions unless requested.
  bool include_floor_cubes = false;
};

struct GoodLambdaRow {
  int k = 0;
  double gamma = 0.0;
  double fraction = 0.0;
  double weighted_fraction = 0.0;
  std::size_t cubes = 0;
};

struct GoodLambdaResult {
  std::vector<GoodLambdaRow> rows;
  /// Per gamma (config order): max fraction over levels and cubes.
  std::vector<double> max_fraction;
  /// log(max fraction) against 1 / gamma over the positive entries.
  LinearFit fit;
};

/// For each level, Whitney-decomposes {T*f > 2^k} and measures per cube the
/// share of points with T*f > 2^{k+1} and Mf <= gamma 2^k.
GoodLambdaResult good_lambda_measure(const GridFunction& f, const Weight& w, const GoodLambdaConfig& config = {});

inline double phi_cfi(double t) { return t * std::log(std::exp(1.0) + t); }

struct CfiRow {
  std::string weight_id;
  std::string signal_id;
  double p = 2.0;
  double q = 3.0;
  double norm_tstar = 0.0;
  double norm_maximal = 0.0;
  double ratio = 0.0;
  double cq = 0.0;
  double cp = 0.0;
  /// Phi(max([w]_{C_q}, 1)) and Phi(max([w]_{C_p}, 1)).
  double bound_value = 0.0;
  double bound_value_p = 0.0;
  /// q + q p^2 / (q - p).
  double factor = 0.0;
  bool degenerate = false;
};

/// Weighted L^p norms of T*f and Mf on the signal's grid and the Phi bound
/// built from the estimated constants. Requires q > p > 1.
CfiRow cfi_ratio(const Signal& f, const Weight& w, double p, double q, const CubeFamily& family,
                 const EstimatorOptions& options = {});

}  // namespace weightlab
