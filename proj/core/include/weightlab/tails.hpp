#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weightlab/geometry.hpp"
#include "weightlab/numeric.hpp"
#include "weightlab/weights.hpp"

namespace weightlab {

enum class TailKind { discrete_2, discrete_s, continuous };

std::string to_string(TailKind kind);

/// value is a certified lower bound of the infinite sum (or integral) and
/// upper() a certified upper bound. truncation_bound covers what lies beyond
/// the last term or radius (for 1-D continuous tails of closed-form weights it
/// also absorbs the quadrature error estimate); annulus_width is the spread of
/// the 2-D cell and shell bounds of M(chi_Q).
struct TailReport {
  double value = 0.0;
  double truncation_bound = 0.0;
  double annulus_width = 0.0;
  int terms = 0;
  TailKind kind = TailKind::discrete_2;

  double upper() const { return value + truncation_bound + annulus_width; }
  Interval interval() const { return {value, upper()}; }
};

struct TailOptions {
  /// Target for truncation_bound, relative to max(1, value). In 2-D the far
  /// field is also cut once it falls below far_share of annulus_width.
  double tol = 1e-9;
  double far_share = 1e-3;
  /// Term cap for base 2, scaled by log(2)/log(s) for base s; exceeding it
  /// before tol is met is an error.
  int max_terms = 64;
  /// 2-D: cells per side of Q used for the ring 3Q \ Q.
  int ring_cells = 24;
  /// 2-D: ratio of consecutive shells in the Stieltjes enclosure beyond 3Q.
  double shell_ratio = 1.0 + 1.0 / 512.0;
};

/// a_{C_p}(Q) = sum_k 2^{-n(p-1)k} avg_{2^k Q} w.
TailReport discrete_tail(const Weight& w, const Cube& q, double p, const TailOptions& options = {});

/// a_{C_p,s}(Q) = sum_k s^{-n(p-1)k} avg_{s^k Q} w for 1 < s <= 2.
TailReport discrete_tail_s(const Weight& w, const Cube& q, double p, double s, const TailOptions& options = {});

/// The C_p-tail int (M chi_Q)^p w over R^n.
TailReport continuous_tail(const Weight& w, const Cube& q, double p, const TailOptions& options = {});

/// Certified enclosure of sum_{k >= first} s^{-decay k} w(s^k Q), from the
/// support or the far-field description of w. Empty when no enclosure is
/// available yet at this first index.
std::optional<Interval> dilation_series_remainder(const Weight& w, const Cube& q, double s, double decay,
                                                  int first);

/// True when the C_p-tails of w are infinite.
bool has_infinite_tails(const Weight& w, double p);

struct ConstantEstimate {
  /// Max over the family of the per-cube lower ratio.
  double value = 0.0;
  /// Max over the family of the per-cube upper ratio (denominator intervals).
  double upper = 0.0;
  Cube argmax;
  std::size_t family_size = 0;
  std::size_t skipped = 0;
  bool divergent = false;
  /// (depth, running max) after each dyadic level of the family.
  std::vector<std::pair<int, double>> refinement_trace;
  std::vector<double> per_cube;
};

struct EstimatorOptions {
  /// Cells per side of Q for M(chi_Q w); 0 picks the grid resolution for grid
  /// weights and a default for closed-form weights.
  int numerator_cells = 0;
  TailOptions tails{};
};

/// Cells per side used for the numerator of cube q.
int numerator_cells_for(const Weight& w, const Cube& q, const EstimatorOptions& options);

/// int_Q M(chi_Q w) for every cube of the family.
std::vector<double> family_numerators(const Weight& w, const CubeFamily& family, const EstimatorOptions& options = {});

ConstantEstimate ainfty_constant(const Weight& w, const CubeFamily& family, const EstimatorOptions& options = {},
                                 const std::vector<double>* numerators = nullptr);

ConstantEstimate cp_constant(const Weight& w, double p, const CubeFamily& family,
                             const EstimatorOptions& options = {}, const std::vector<double>* numerators = nullptr);

/// Uses the average-normalized ratio int_Q M(chi_Q w) / (|Q| a_{C_p,s}(Q)).
ConstantEstimate cps_constant(const Weight& w, double p, double s, const CubeFamily& family,
                              const EstimatorOptions& options = {}, const std::vector<double>* numerators = nullptr);

/// max over the family of (avg_Q w^r)^{1/r} / avg_Q w.
ConstantEstimate rh_constant(const Weight& w, double r, const CubeFamily& family);

struct TheoremConstants {
  int n = 1;
  double p = 2.0;
  std::optional<double> s;
  double weight_constant = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double B = 0.0;
  double A = 0.0;
  double A_sp = 0.0;
  double delta_cp = 0.0;
  double delta_ainfty = 0.0;
  double delta_dilation = 0.0;
  double epsilon_cp = 0.0;
};

/// Explicit constants of the quantitative reverse Holder theory for the given
/// dimension, exponent, optional dilation base and weight constant.
TheoremConstants theorem_constants(int n, double p, std::optional<double> s, double weight_constant);

}  // namespace weightlab
