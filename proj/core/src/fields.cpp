#include "kppfront/fields.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "kppfront/errors.hpp"

namespace kppfront {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

void reduce_torus(std::span<double> x) {
  for (double& v : x) {
    v -= std::floor(v);
    if (v >= 1.0) v = 0.0;  // -tiny wraps to 1.0 in floating point
  }
}

// ---------------------------------------------------------------------------

void TrigPolynomial::add(double amplitude, std::vector<int> wave, bool is_sine) {
  if (wave.size() != dim_) throw InvalidArgument("trig term wave vector has wrong dimension");
  bool zero = true;
  for (int k : wave) zero = zero && k == 0;
  if (zero) {
    if (!is_sine) constant_ += amplitude;
    return;
  }
  terms_.push_back({amplitude, std::move(wave), is_sine});
}

double TrigPolynomial::value(std::span<const double> x) const {
  double v = constant_;
  for (const auto& t : terms_) {
    double ph = 0;
    for (std::size_t j = 0; j < dim_; ++j) ph += t.wave[j] * x[j];
    ph *= two_pi;
    v += t.amplitude * (t.is_sine ? std::sin(ph) : std::cos(ph));
  }
  return v;
}

void TrigPolynomial::gradient(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < dim_; ++j) out[j] = 0;
  for (const auto& t : terms_) {
    double ph = 0;
    for (std::size_t j = 0; j < dim_; ++j) ph += t.wave[j] * x[j];
    ph *= two_pi;
    double d = t.amplitude * two_pi * (t.is_sine ? std::cos(ph) : -std::sin(ph));
    for (std::size_t j = 0; j < dim_; ++j) out[j] += d * t.wave[j];
  }
}

double TrigPolynomial::min_sample_bound() const {
  double v = constant_;
  for (const auto& t : terms_) v -= std::fabs(t.amplitude);
  return v;
}

std::string TrigPolynomial::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << constant_;
  for (const auto& t : terms_) {
    os << (t.amplitude < 0 ? " - " : " + ") << std::fabs(t.amplitude) << "*" << (t.is_sine ? "sin(" : "cos(");
    for (std::size_t j = 0; j < t.wave.size(); ++j) os << (j ? "," : "") << t.wave[j];
    os << ")";
  }
  return os.str();
}

TrigPolynomial TrigPolynomial::parse(const std::string& text, std::size_t dimension) {
  TrigPolynomial p(dimension, 0.0);
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& why) -> void {
    throw ConfigError("cannot parse field '" + text + "': " + why + " at position " + std::to_string(i));
  };
  bool any = false;
  skip();
  while (i < n) {
    double sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      if (text[i] == '-') sign = -1;
      ++i;
      skip();
    } else if (any) {
      fail("expected '+' or '-'");
    }
    double amp = 1;
    bool have_number = false;
    if (i < n && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
      char* end = nullptr;
      amp = std::strtod(text.c_str() + i, &end);
      i = static_cast<std::size_t>(end - text.c_str());
      have_number = true;
      skip();
      if (i < n && text[i] == '*') {
        ++i;
        skip();
      }
    }
    if (i + 3 <= n && (text.compare(i, 3, "sin") == 0 || text.compare(i, 3, "cos") == 0)) {
      bool is_sine = text[i] == 's';
      i += 3;
      skip();
      if (i >= n || text[i] != '(') fail("expected '('");
      ++i;
      std::vector<int> wave;
      while (true) {
        skip();
        char* end = nullptr;
        long k = std::strtol(text.c_str() + i, &end, 10);
        if (end == text.c_str() + i) fail("expected integer wave number");
        i = static_cast<std::size_t>(end - text.c_str());
        wave.push_back(static_cast<int>(k));
        skip();
        if (i < n && text[i] == ',') {
          ++i;
          continue;
        }
        if (i < n && text[i] == ')') {
          ++i;
          break;
        }
        fail("expected ',' or ')'");
      }
      if (wave.size() != dimension) fail("wave vector needs " + std::to_string(dimension) + " entries");
      p.add(sign * amp, std::move(wave), is_sine);
    } else if (have_number) {
      p.constant_ += sign * amp;
    } else {
      fail("expected number or sin/cos term");
    }
    any = true;
    skip();
  }
  if (!any) fail("empty expression");
  return p;
}

// ---------------------------------------------------------------------------

GriddedField::GriddedField(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  std::size_t total = 1;
  for (auto s : shape_) {
    if (s < 2) throw InvalidArgument("gridded field needs at least 2 samples per axis");
    total *= s;
  }
  if (total != values_.size()) throw InvalidArgument("gridded field value count does not match shape");
}

bool GriddedField::is_constant() const {
  for (double v : values_)
    if (v != values_.front()) return false;
  return true;
}

namespace {

template <class F>
void multilinear_visit(const std::vector<std::size_t>& shape, std::span<const double> x, F&& visit) {
  const std::size_t d = shape.size();
  std::array<std::size_t, 8> lo{}, hi{};
  std::array<double, 8> w{};
  for (std::size_t j = 0; j < d; ++j) {
    double u = x[j] - std::floor(x[j]);
    double s = u * static_cast<double>(shape[j]);
    double fl = std::floor(s);
    lo[j] = static_cast<std::size_t>(fl) % shape[j];
    hi[j] = (lo[j] + 1) % shape[j];
    w[j] = s - fl;
  }
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    std::size_t idx = 0, stride = 1;
    std::array<bool, 8> up{};
    for (std::size_t j = 0; j < d; ++j) {
      up[j] = (corner >> j) & 1u;
      idx += (up[j] ? hi[j] : lo[j]) * stride;
      stride *= shape[j];
    }
    visit(idx, up, w);
  }
}

}  // namespace

double GriddedField::value(std::span<const double> x) const {
  const std::size_t d = shape_.size();
  double v = 0;
  multilinear_visit(shape_, x, [&](std::size_t idx, const auto& up, const auto& w) {
    double wt = 1;
    for (std::size_t j = 0; j < d; ++j) wt *= up[j] ? w[j] : 1 - w[j];
    v += wt * values_[idx];
  });
  return v;
}

void GriddedField::gradient(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = shape_.size();
  for (std::size_t j = 0; j < d; ++j) out[j] = 0;
  multilinear_visit(shape_, x, [&](std::size_t idx, const auto& up, const auto& w) {
    for (std::size_t k = 0; k < d; ++k) {
      double wt = static_cast<double>(shape_[k]) * (up[k] ? 1.0 : -1.0);
      for (std::size_t j = 0; j < d; ++j)
        if (j != k) wt *= up[j] ? w[j] : 1 - w[j];
      out[k] += wt * values_[idx];
    }
  });
}

// ---------------------------------------------------------------------------

double ScalarField::value(std::span<const double> x) const {
  return std::visit([&](const auto& f) { return f.value(x); }, impl_);
}

void ScalarField::gradient(std::span<const double> x, std::span<double> out) const {
  std::visit([&](const auto& f) { f.gradient(x, out); }, impl_);
}

bool ScalarField::is_constant() const {
  return std::visit([](const auto& f) { return f.is_constant(); }, impl_);
}

std::size_t ScalarField::dimension() const {
  return std::visit([](const auto& f) { return f.dimension(); }, impl_);
}

std::string ScalarField::describe() const {
  if (auto* p = std::get_if<TrigPolynomial>(&impl_)) return p->describe();
  return "gridded";
}

// ---------------------------------------------------------------------------

PeriodicInterpolant::PeriodicInterpolant(std::size_t dimension, std::size_t n, std::vector<double> values)
    : dim_(dimension), n_(n), values_(std::move(values)) {
  std::size_t total = 1;
  for (std::size_t j = 0; j < dim_; ++j) total *= n_;
  if (total != values_.size()) throw InvalidArgument("interpolant value count does not match grid");
}

double PeriodicInterpolant::operator()(std::span<const double> x) const {
  std::array<std::array<std::size_t, 4>, 3> idx{};
  std::array<std::array<double, 4>, 3> wt{};
  const double nn = static_cast<double>(n_);
  for (std::size_t j = 0; j < dim_; ++j) {
    double u = x[j] - std::floor(x[j]);
    double s = u * nn;
    double fl = std::floor(s);
    double t = s - fl;
    long base = static_cast<long>(fl);
    for (int m = 0; m < 4; ++m) {
      long k = (base - 1 + m) % static_cast<long>(n_);
      if (k < 0) k += static_cast<long>(n_);
      idx[j][m] = static_cast<std::size_t>(k);
    }
    double t2 = t * t, t3 = t2 * t;
    wt[j] = {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
             0.5 * (t3 - t2)};
  }
  double v = 0;
  if (dim_ == 1) {
    for (int a = 0; a < 4; ++a) v += wt[0][a] * values_[idx[0][a]];
  } else if (dim_ == 2) {
    for (int b = 0; b < 4; ++b) {
      double row = 0;
      for (int a = 0; a < 4; ++a) row += wt[0][a] * values_[idx[0][a] + n_ * idx[1][b]];
      v += wt[1][b] * row;
    }
  } else {
    for (int c = 0; c < 4; ++c)
      for (int b = 0; b < 4; ++b) {
        double row = 0;
        for (int a = 0; a < 4; ++a) row += wt[0][a] * values_[idx[0][a] + n_ * (idx[1][b] + n_ * idx[2][c])];
        v += wt[2][c] * wt[1][b] * row;
      }
  }
  return v;
}

}  // namespace kppfront
