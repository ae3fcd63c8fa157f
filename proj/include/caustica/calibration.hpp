#pragma once

// Frozen constants for the lemma-level checks. Each was measured once on the
// calibration levels lambda in [125, 500] (16 log-spaced off-lattice levels
// from 125.137 to 1999.137, default delta = lambda^{-1/3}) and is asserted
// with a factor-2 margin on larger levels.

namespace caustica::calibration {

/// min adjacent caustic gap * lambda, disk, mu in [0.3, 0.9] (per-mode mu).
inline constexpr double kDiskInteriorSpacing = 2.80;
/// min gap * lambda * eps^{1/2} on [1 - 2 eps, 1 - eps/2], eps = lambda^{-1/3}.
inline constexpr double kDiskBoundarySpacing = 1.56;
/// min (1 - mu) lambda^{2/3} over disk band members.
inline constexpr double kDiskEdgeClearance = 1.84;
/// max n1^{1/3} |a_k1 - a_k2| / (n2 - n1) over band pairs in the cone n >= 0.3 lambda.
inline constexpr double kAiryPairRatio = 1.31;
/// max envelope ratio, disk, r in [0.3, 0.7].
inline constexpr double kDiskEnvelope = 0.7603;
/// max envelope ratio, profile sin s + 0.1 sin 2s, s in [0.4, 1.0], lambda in [60, 300].
inline constexpr double kRevolutionEnvelope = 0.3727;
/// Unit lattice spacing of |n| on a surface of revolution, halved.
inline constexpr double kRevolutionSpacing = 0.5;
/// max over 1 - r in [0, 0.1] of Sigma_C / lambda^{8/9} (cone n >= 0.3 lambda, alpha = 0.1).
inline constexpr double kSigmaC = 0.1587;
/// max Sigma_B / lambda^{8/9} where 1 - r >= lambda^{-2/3+alpha}.
inline constexpr double kSigmaBFar = 0.1014;
/// max Sigma_B / lambda^{2/3+alpha} where 1 - r < lambda^{-2/3+alpha}.
inline constexpr double kSigmaBNear = 0.1849;
/// Sigma_A / Sigma_total bound at alpha = 0.1.
inline constexpr double kSigmaARelative = 1e-6;

}  // namespace caustica::calibration
