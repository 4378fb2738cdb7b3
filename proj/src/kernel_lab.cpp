#include "pathwise/kernel_lab.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pathwise/quadrature.hpp"

namespace pathwise {

double kernel_eval(Kernel which, double t, double z) {
  if (t <= 0.0) throw std::invalid_argument("kernel_eval: t must be positive");
  const double e = std::exp(-z * z / (2.0 * t)) /
                   std::sqrt(2.0 * std::numbers::pi * t);
  switch (which) {
    case Kernel::E:
      return e;
    case Kernel::B:
      return -(z / t) * e;
    case Kernel::D:
      return (z * z / (t * t) - 1.0 / t) * e;
  }
  throw std::invalid_argument("kernel_eval: bad kernel tag");
}

double kernel_l1_mass(Kernel which, double t) {
  if (t <= 0.0)
    throw std::invalid_argument("kernel_l1_mass: t must be positive");
  const double window = 12.0 * std::sqrt(t);
  auto abs_kernel = [which, t](double z) {
    return std::fabs(kernel_eval(which, t, z));
  };
  // Split at the kernel's sign-change points so every panel sees a smooth
  // integrand: |B| kinks at 0, |D| at +-sqrt(t).
  std::vector<double> cuts = {-window};
  switch (which) {
    case Kernel::E:
      break;
    case Kernel::B:
      cuts.push_back(0.0);
      break;
    case Kernel::D:
      cuts.push_back(-std::sqrt(t));
      cuts.push_back(std::sqrt(t));
      break;
  }
  cuts.push_back(window);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += quadrature::adaptive_gk15(abs_kernel, cuts[i], cuts[i + 1], 1e-9,
                                       1e-14);
  return total;
}

bool Word::allowed(std::string_view letters) {
  bool expect_e = true;
  for (char ch : letters) {
    switch (ch) {
      case 'B':
        break;
      case 'E':
        if (!expect_e) return false;
        expect_e = false;
        break;
      case 'D':
        if (expect_e) return false;
        expect_e = true;
        break;
      default:
        return false;
    }
  }
  return expect_e;
}

std::vector<int> Word::ed_positions() const {
  std::vector<int> pos;
  for (std::size_t i = 0; i < letters.size(); ++i)
    if (letters[i] != 'B') pos.push_back(static_cast<int>(i));
  return pos;
}

namespace {

void build_words(std::string& cur, int remaining, bool expect_e,
                 std::vector<Word>& out) {
  if (remaining == 0) {
    if (expect_e) out.push_back(Word{cur});
    return;
  }
  cur.push_back('B');
  build_words(cur, remaining - 1, expect_e, out);
  cur.back() = expect_e ? 'E' : 'D';
  build_words(cur, remaining - 1, !expect_e, out);
  cur.pop_back();
}

}  // namespace

std::vector<Word> allowed_words(int k) {
  if (k < 1 || k > 20)
    throw std::invalid_argument("allowed_words: k outside [1, 20]");
  std::vector<Word> out;
  out.reserve(std::size_t{1} << (k - 1));
  std::string cur;
  cur.reserve(static_cast<std::size_t>(k));
  build_words(cur, k, true, out);
  return out;
}

}  // namespace pathwise
