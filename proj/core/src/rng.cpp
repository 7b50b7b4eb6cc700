#include "rabc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rabc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c[0], hi0, lo0);
  mulhilo(kPhiloxM1, c[2], hi1, lo1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> c = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k);
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_id)
    : root_seed_(root_seed), stream_id_(stream_id) {}

void RngStream::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32),
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(root_seed_),
                                            static_cast<std::uint32_t>(root_seed_ >> 32)};
  buf_ = philox4x32(ctr, key);
  ++block_;
  buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (buf_pos_ >= 2) refill();
  const int i = 2 * buf_pos_++;
  return static_cast<std::uint64_t>(buf_[i]) | (static_cast<std::uint64_t>(buf_[i + 1]) << 32);
}

double RngStream::next_uniform() {
  // 53 random bits, centered: ((x>>11)+0.5) * 2^-53 lies strictly in (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag, std::uint64_t index) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(root),
                                            static_cast<std::uint32_t>(root >> 32)};
  const auto out = philox4x32(ctr, key);
  return static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
}

double sample_uniform(RngStream& s, double lo, double hi) {
  if (!(lo <= hi)) throw std::domain_error("sample_uniform: lo > hi");
  return lo + (hi - lo) * s.next_uniform();
}

double sample_normal(RngStream& s, double mean, double sd) {
  if (sd < 0.0) throw std::domain_error("sample_normal: negative sd");
  if (s.has_spare_normal) {
    s.has_spare_normal = false;
    return mean + sd * s.spare_normal;
  }
  const double u1 = s.next_uniform();
  const double u2 = s.next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  s.spare_normal = r * std::sin(a);
  s.has_spare_normal = true;
  return mean + sd * (r * std::cos(a));
}

double sample_laplace(RngStream& s, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("sample_laplace: rate must be > 0");
  const double u = s.next_uniform();
  return (u < 0.5) ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
}

double sample_exponential(RngStream& s, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("sample_exponential: rate must be > 0");
  return -std::log(s.next_uniform()) / rate;
}

namespace {

// Marsaglia-Tsang Gamma(shape, 1) for shape >= 1.
double sample_gamma_ge1(RngStream& s, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(s, 0.0, 1.0);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = s.next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_student_t_std(RngStream& s, double dof) {
  if (!(dof > 2.0)) throw std::domain_error("sample_student_t_std: dof must be > 2");
  const double z = sample_normal(s, 0.0, 1.0);
  const double chi2 = 2.0 * sample_gamma_ge1(s, 0.5 * dof);
  const double t = z / std::sqrt(chi2 / dof);
  return t * std::sqrt((dof - 2.0) / dof);
}

double sample_alpha_stable(RngStream& s, double alpha, double beta, double loc, double scale) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::domain_error("sample_alpha_stable: alpha must be in (0,2]");
  if (!(beta >= -1.0 && beta <= 1.0)) throw std::domain_error("sample_alpha_stable: beta must be in [-1,1]");
  if (!(scale > 0.0)) throw std::domain_error("sample_alpha_stable: scale must be > 0");

  constexpr double half_pi = std::numbers::pi / 2.0;
  const double v = sample_uniform(s, -half_pi, half_pi);
  const double w = sample_exponential(s, 1.0);

  double x;
  if (alpha == 1.0) {
    const double bv = half_pi + beta * v;
    x = (bv * std::tan(v) - beta * std::log((half_pi * w * std::cos(v)) / bv)) / half_pi;
    return loc + scale * x + beta * (2.0 / std::numbers::pi) * scale * std::log(scale);
  }
  const double t = beta * std::tan(half_pi * alpha);
  const double b = std::atan(t) / alpha;
  const double s0 = std::pow(1.0 + t * t, 0.5 / alpha);
  x = s0 * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
      std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return loc + scale * x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double laplace_cdf(double x, double rate) {
  return (x < 0.0) ? 0.5 * std::exp(rate * x) : 1.0 - 0.5 * std::exp(-rate * x);
}

double laplace_pdf(double x, double rate) { return 0.5 * rate * std::exp(-rate * std::abs(x)); }

double exponential_cdf(double x, double rate) {
  return (x <= 0.0) ? 0.0 : 1.0 - std::exp(-rate * x);
}

double exponential_pdf(double x, double rate) {
  return (x < 0.0) ? 0.0 : rate * std::exp(-rate * x);
}

}  // namespace rabc
