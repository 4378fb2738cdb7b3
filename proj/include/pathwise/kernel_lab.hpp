#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pathwise {

/// The heat-kernel family: E(t,z) = (2 pi t)^{-1/2} e^{-z^2/2t}, and its
/// first and second z-derivatives B and D.
enum class Kernel { E, B, D };

double kernel_eval(Kernel which, double t, double z);

/// Integral of |kernel| over R by adaptive quadrature (relative tolerance
/// 1e-8); the Gaussian tail makes [-12 sqrt(t), 12 sqrt(t)] an exact window
/// for double precision.
double kernel_l1_mass(Kernel which, double t);

/// Word over the alphabet {E, B, D}. Allowed means deleting every B leaves
/// (ED)^r for some r >= 0.
struct Word {
  std::string letters;

  static bool allowed(std::string_view letters);

  /// Positions (0-based) occupied by E or D.
  std::vector<int> ed_positions() const;
};

/// All allowed words of length k, 1 <= k <= 20, in lexicographic order of
/// construction (B < E < D at each branch).
std::vector<Word> allowed_words(int k);

}  // namespace pathwise
