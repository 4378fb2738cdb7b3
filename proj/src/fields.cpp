#include "pathwise/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pathwise {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool parse_suffix(const std::string& name, const std::string& prefix,
                  std::string& suffix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix))
    return false;
  suffix = name.substr(prefix.size());
  return true;
}

double parse_const(const std::string& name) {
  std::string suffix;
  if (!parse_suffix(name, "const_", suffix))
    throw std::invalid_argument("not a const field: " + name);
  std::size_t used = 0;
  const double c = std::stod(suffix, &used);
  if (used != suffix.size())
    throw std::invalid_argument("bad constant in field name: " + name);
  if (std::fabs(c) > 1.0)
    throw std::invalid_argument("const field needs |c| <= 1: " + name);
  return c;
}

int parse_checkerboard(const std::string& name) {
  std::string suffix;
  if (!parse_suffix(name, "checkerboard_", suffix))
    throw std::invalid_argument("not a checkerboard field: " + name);
  std::size_t used = 0;
  const int m = std::stoi(suffix, &used);
  if (used != suffix.size() || m < 0 || m > 24)
    throw std::invalid_argument("checkerboard scale out of range: " + name);
  return m;
}

}  // namespace

ScalarField::ScalarField(std::string name, int dim, double bound,
                         Smoothness smoothness, Fn fn, LpNorm lp_norm)
    : name_(std::move(name)),
      dim_(dim),
      bound_(bound),
      smoothness_(smoothness),
      fn_(std::move(fn)),
      lp_norm_(std::move(lp_norm)) {
  if (dim_ < 1) throw std::invalid_argument("ScalarField: dim must be >= 1");
  if (bound_ < 0.0 || bound_ > 2.0)
    throw std::invalid_argument("ScalarField: bound outside [0, 2]");
}

double ScalarField::lp_norm(double p) const {
  if (!lp_norm_)
    throw std::invalid_argument("field " + name_ + " has no analytic L^p norm");
  if (p <= 1.0) throw std::invalid_argument("lp_norm: need p > 1");
  return lp_norm_(p);
}

DriftField::DriftField(std::string name, int dim, double bound,
                       Smoothness smoothness, Fn fn)
    : name_(std::move(name)),
      dim_(dim),
      bound_(bound),
      smoothness_(smoothness),
      fn_(std::move(fn)) {
  if (dim_ < 1) throw std::invalid_argument("DriftField: dim must be >= 1");
  if (bound_ < 0.0 || bound_ > 1.0)
    throw std::invalid_argument("DriftField: sup-norm bound must be <= 1");
}

namespace {

struct ScalarSpec {
  double bound;
  Smoothness smoothness;
  ScalarField::Fn fn;
  ScalarField::LpNorm lp = nullptr;
};

ScalarSpec make_scalar_spec(const std::string& name, int dim) {
  if (name == "zero")
    return {0.0, Smoothness::kSmooth,
            [](double, std::span<const double>) { return 0.0; }};
  if (name.rfind("const_", 0) == 0) {
    const double c = parse_const(name);
    return {std::fabs(c), Smoothness::kSmooth,
            [c](double, std::span<const double>) { return c; }};
  }
  if (name == "sign")
    return {1.0, Smoothness::kDiscontinuous,
            [](double, std::span<const double> z) { return sgn(z[0]); }};
  if (name.rfind("checkerboard_", 0) == 0) {
    const int m = parse_checkerboard(name);
    const double freq = std::ldexp(std::numbers::pi, m);  // 2^m * pi
    return {1.0, Smoothness::kDiscontinuous,
            [freq](double, std::span<const double> z) {
              double prod = 1.0;
              for (double zj : z) prod *= std::sin(freq * zj);
              return sgn(prod);
            }};
  }
  if (name == "radial_step")
    return {1.0, Smoothness::kDiscontinuous,
            [](double, std::span<const double> z) {
              return norm2(z) < 1.0 ? 1.0 : -1.0;
            }};
  if (name == "lip_sin")
    return {1.0, Smoothness::kSmooth,
            [](double, std::span<const double> z) { return std::sin(z[0]); }};
  if (name == "time_flip")
    return {1.0, Smoothness::kDiscontinuous,
            [](double t, std::span<const double> z) {
              return sgn(z[0]) * sgn(t - 0.5);
            }};
  if (name == "box_indicator") {
    // 1 on [0,1] x [-1,1]^d, else 0.
    const double d = static_cast<double>(dim);
    return {1.0, Smoothness::kDiscontinuous,
            [](double, std::span<const double> z) {
              for (double zj : z)
                if (std::fabs(zj) > 1.0) return 0.0;
              return 1.0;
            },
            [d](double p) { return std::pow(std::exp2(d), 1.0 / p); }};
  }
  if (name == "gauss_bump") {
    // exp(-|z|^2); integral of g^p over R^d is (pi/p)^{d/2}.
    const double d = static_cast<double>(dim);
    return {1.0, Smoothness::kSmooth,
            [](double, std::span<const double> z) {
              double s = 0.0;
              for (double zj : z) s += zj * zj;
              return std::exp(-s);
            },
            [d](double p) {
              return std::pow(std::pow(std::numbers::pi / p, d / 2.0), 1.0 / p);
            }};
  }
  throw std::invalid_argument("unknown field name: " + name);
}

}  // namespace

ScalarField scalar_field(const std::string& name, int dim) {
  ScalarSpec spec = make_scalar_spec(name, dim);
  return ScalarField(name, dim, spec.bound, spec.smoothness, std::move(spec.fn),
                     std::move(spec.lp));
}

DriftField drift_field(const std::string& name, int dim) {
  if (name == "zero")
    return DriftField(name, dim, 0.0, Smoothness::kSmooth,
                      [](double, std::span<const double>, std::span<double> out) {
                        for (auto& v : out) v = 0.0;
                      });
  if (name.rfind("const_", 0) == 0) {
    const double c = parse_const(name);
    return DriftField(name, dim, std::fabs(c), Smoothness::kSmooth,
                      [c](double, std::span<const double>, std::span<double> out) {
                        out[0] = c;
                        for (std::size_t i = 1; i < out.size(); ++i) out[i] = 0.0;
                      });
  }
  ScalarSpec spec = make_scalar_spec(name, dim);
  auto scalar = std::move(spec.fn);
  return DriftField(name, dim, spec.bound, spec.smoothness,
                    [scalar](double t, std::span<const double> x,
                             std::span<double> out) {
                      out[0] = scalar(t, x);
                      for (std::size_t i = 1; i < out.size(); ++i) out[i] = 0.0;
                    });
}

std::vector<std::string> catalog_names() {
  return {"zero",        "const_<c>", "sign",          "checkerboard_<m>",
          "radial_step", "lip_sin",   "time_flip",     "box_indicator",
          "gauss_bump"};
}

ScalarField difference_field(const ScalarField& g, std::vector<double> x,
                             std::vector<double> y) {
  const std::size_t d = static_cast<std::size_t>(g.dim());
  if (x.size() != d || y.size() != d)
    throw std::invalid_argument("difference_field: shift dimension mismatch");
  for (std::size_t c = 0; c < d; ++c)
    if (std::fabs(x[c]) > 1.0 || std::fabs(y[c]) > 1.0)
      throw std::invalid_argument("difference_field: shifts must lie in Q");
  ScalarField base = g;
  auto fn = [base, x = std::move(x), y = std::move(y)](
                double t, std::span<const double> z) {
    thread_local std::vector<double> buf;
    buf.assign(z.begin(), z.end());
    for (std::size_t c = 0; c < buf.size(); ++c) buf[c] += x[c];
    const double gx = base(t, buf);
    for (std::size_t c = 0; c < buf.size(); ++c) buf[c] += y[c] - x[c];
    const double gy = base(t, buf);
    return gx - gy;
  };
  return ScalarField("diff(" + g.name() + ")", g.dim(), 2.0 * g.bound(),
                     g.smoothness(), std::move(fn));
}

}  // namespace pathwise
