#pragma once

#include <cstdint>
#include <array>

namespace rabc {

// Counter-based random stream (Philox4x32-10). A stream is identified by
// (root_seed, stream_id); the same pair always replays the same variate
// sequence, independent of which thread consumes it or in what order
// streams are created. Draw loops assign stream_id = draw index so that
// N-draw simulations parallelize with no coordination and stay bit-identical
// across worker counts.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_id);

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Raw 64-bit word from the keyed counter sequence.
  std::uint64_t next_u64();
  // Uniform on the open interval (0,1); never returns 0 or 1.
  double next_uniform();

 private:
  void refill();

  std::uint64_t root_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 2;  // in u64 units; 2 == empty

 public:
  // Box-Muller spare, managed by sample_normal.
  double spare_normal = 0.0;
  bool has_spare_normal = false;
};

// One Philox4x32-10 block; exposed for tests.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// Deterministic seed derivation for independent sub-streams (observed data,
// simulation banks, per-method gamma draws, replications, ...).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag, std::uint64_t index = 0);

// Sampling primitives. All are pure functions of the stream state and their
// parameters; domain violations throw std::domain_error.
double sample_uniform(RngStream& s, double lo, double hi);
double sample_normal(RngStream& s, double mean, double sd);
// Laplace with rate lambda: density (lambda/2) * exp(-lambda*|x|), scale 1/lambda.
double sample_laplace(RngStream& s, double rate);
double sample_exponential(RngStream& s, double rate);
// Standardized Student-t: unit variance, requires dof > 2.
double sample_student_t_std(RngStream& s, double dof);
// Alpha-stable S(alpha, beta, loc, scale) via Chambers-Mallows-Stuck, in the
// parametrization where alpha = 2 gives Normal(loc, 2*scale^2).
double sample_alpha_stable(RngStream& s, double alpha, double beta, double loc, double scale);

// Analytic distribution functions (diagnostics and test oracles).
double normal_cdf(double x);
double laplace_cdf(double x, double rate);
double laplace_pdf(double x, double rate);
double exponential_cdf(double x, double rate);
double exponential_pdf(double x, double rate);

}  // namespace rabc
