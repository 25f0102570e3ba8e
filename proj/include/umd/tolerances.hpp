#pragma once

namespace umd {

/// Coefficients with max-norm at or below this are treated as zero when
/// computing spectra and sign ratios.
inline constexpr double kTauSpec = 1e-9;

/// Analyze/synthesize round trips are expected to close to this accuracy
/// at moderate depth.
inline constexpr double kRoundtripTol = 1e-12;

/// Verification tolerance for exactly computable comparisons.
inline constexpr double kTolExact = 1e-6;

/// Verification tolerance when one side of a comparison is a heuristic
/// lower estimate.
inline constexpr double kTolHeuristic = 5e-3;

}  // namespace umd
