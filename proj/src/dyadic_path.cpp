#include "pathwise/dyadic_path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "pathwise/rng.hpp"

namespace pathwise {

namespace {

constexpr char kMagic[8] = {'D', 'Y', 'A', 'D', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

double DyadicIndex::left() const {
  return std::ldexp(static_cast<double>(k), -level);
}

double DyadicIndex::right() const {
  return std::ldexp(static_cast<double>(k + 1), -level);
}

DyadicPath DyadicPath::generate(std::uint64_t seed, int dim, int level) {
  if (dim < 1) throw std::invalid_argument("DyadicPath: dimension must be >= 1");
  if (level < 0 || level > kMaxLevel)
    throw std::invalid_argument("DyadicPath: level outside [0, 24]");
  std::vector<double> v(2 * static_cast<std::size_t>(dim), 0.0);
  for (int c = 0; c < dim; ++c)
    v[static_cast<std::size_t>(dim) + c] =
        rng::node_gaussian(seed, 0, 0, static_cast<std::uint32_t>(c));
  DyadicPath path(seed, dim, 0, std::move(v));
  path.refine_to(level);
  return path;
}

void DyadicPath::refine_to(int target_level) {
  if (target_level < level_)
    throw std::invalid_argument("refine_to: target below current level");
  if (target_level > kMaxLevel)
    throw std::invalid_argument("refine_to: target above level guard 24");
  if (frozen_ && target_level != level_)
    throw std::invalid_argument("refine_to: path is frozen");
  const std::size_t d = static_cast<std::size_t>(dim_);
  while (level_ < target_level) {
    const int parent = level_;
    const std::uint64_t n_intervals = std::uint64_t{1} << parent;
    // Midpoint of [s, u] ~ N((W(s)+W(u))/2, (u-s)/4 I_d).
    const double sd = 0.5 * std::sqrt(std::ldexp(1.0, -parent));
    std::vector<double> fine((2 * n_intervals + 1) * d);
    for (std::uint64_t i = 0; i <= n_intervals; ++i)
      std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(i * d), d,
                  fine.begin() + static_cast<std::ptrdiff_t>(2 * i * d));
    for (std::uint64_t k = 0; k < n_intervals; ++k) {
      const double* lo = values_.data() + k * d;
      const double* hi = values_.data() + (k + 1) * d;
      double* mid = fine.data() + (2 * k + 1) * d;
      for (std::size_t c = 0; c < d; ++c) {
        const double z = rng::node_gaussian(
            seed_, static_cast<std::uint32_t>(parent + 1), k,
            static_cast<std::uint32_t>(c));
        mid[c] = 0.5 * (lo[c] + hi[c]) + sd * z;
      }
    }
    values_ = std::move(fine);
    ++level_;
  }
}

DyadicPath DyadicPath::refined(int target_level) const {
  DyadicPath copy = *this;
  copy.frozen_ = false;
  copy.refine_to(target_level);
  copy.frozen_ = frozen_;
  return copy;
}

double DyadicPath::time_of(std::size_t i) const {
  return std::ldexp(static_cast<double>(i), -level_);
}

bool DyadicPath::on_grid(double t) const {
  if (t < 0.0 || t > 1.0) return false;
  const double scaled = std::ldexp(t, level_);
  return scaled == std::floor(scaled);
}

void DyadicPath::value_at(double t, std::span<double> out) const {
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("value_at: t outside [0,1]");
  if (out.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("value_at: output span has wrong dimension");
  const double scaled = std::ldexp(t, level_);
  const double fl = std::floor(scaled);
  const std::size_t i =
      std::min(static_cast<std::size_t>(fl), node_count() - 2);
  const double w = scaled - static_cast<double>(i);
  const auto lo = node(i);
  const auto hi = node(i + 1);
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = lo[c] + w * (hi[c] - lo[c]);
}

void DyadicPath::dump(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(dim_));
  put_u32(out, static_cast<std::uint32_t>(level_));
  put_u64(out, seed_);
  for (double v : values_) put_f64(out, v);
}

DyadicPath DyadicPath::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("DyadicPath::load: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion)
    throw std::runtime_error("DyadicPath::load: unsupported version");
  const std::uint32_t dim = get_u32(in);
  const std::uint32_t level = get_u32(in);
  const std::uint64_t seed = get_u64(in);
  if (dim < 1 || level > kMaxLevel)
    throw std::runtime_error("DyadicPath::load: corrupt header");
  const std::size_t count =
      ((std::size_t{1} << level) + 1) * static_cast<std::size_t>(dim);
  std::vector<double> values(count);
  for (auto& v : values) v = get_f64(in);
  if (!in) throw std::runtime_error("DyadicPath::load: truncated payload");
  return DyadicPath(seed, static_cast<int>(dim), static_cast<int>(level),
                    std::move(values));
}

DyadicPath rescale_window(const DyadicPath& path, double a, double b) {
  if (!(a >= 0.0 && a < b && b <= 1.0))
    throw std::invalid_argument("rescale_window: need 0 <= a < b <= 1");
  if (a == 0.0 && b == 1.0) return path;
  const int level = path.level();
  const double a_scaled = std::ldexp(a, level);
  const double b_scaled = std::ldexp(b, level);
  if (a_scaled != std::floor(a_scaled) || b_scaled != std::floor(b_scaled))
    throw std::invalid_argument("rescale_window: endpoints off the path grid");
  const double l = b - a;
  int j = -1;
  for (int cand = 0; cand <= level; ++cand) {
    if (std::ldexp(1.0, -cand) == l) {
      j = cand;
      break;
    }
  }
  if (j < 0)
    throw std::invalid_argument(
        "rescale_window: window length must be a power of two on the grid");
  const int out_level = level - j;
  const double scale = std::sqrt(std::ldexp(1.0, j));  // l^{-1/2}
  const std::size_t d = static_cast<std::size_t>(path.dim());
  const std::size_t base = static_cast<std::size_t>(a_scaled);
  const std::size_t out_nodes = (std::size_t{1} << out_level) + 1;
  std::vector<double> values(out_nodes * d);
  const auto origin = path.node(base);
  for (std::size_t i = 0; i < out_nodes; ++i) {
    const auto src = path.node(base + i);
    for (std::size_t c = 0; c < d; ++c)
      values[i * d + c] = scale * (src[c] - origin[c]);
  }
  DyadicPath out(path.seed(), path.dim(), out_level, std::move(values));
  out.freeze();
  return out;
}

}  // namespace pathwise
