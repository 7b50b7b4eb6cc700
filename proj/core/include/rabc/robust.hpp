#pragma once

#include <span>
#include <string>

#include "rabc/rng.hpp"
#include "rabc/summaries.hpp"

namespace rabc {

enum class Method { Abc, RabcS, RabcW };

std::string method_name(Method m);

// Prior on one adjustment component gamma_j.
struct GammaPrior {
  enum class Kind { None, Laplace, Exponential, PointMass };
  Kind kind = Kind::None;
  double rate = 0.0;   // Laplace / Exponential rate
  double value = 0.0;  // PointMass

  bool robust() const { return kind != Kind::None; }
  double sample(RngStream& s) const;
  double cdf(double x) const;
  double pdf(double x) const;
  double mean() const;
  std::string describe() const;
};

// Defaults: the summary-adjustment prior is Laplace with scale 0.25
// (rate 4), placing nearly all mass in [-2, 2]; the weighted-adjustment
// prior is Exponential with rate 0.5 (mean 2).
GammaPrior default_gamma_prior(Method m);

// phi(z, Gamma) = eta(z) + Gamma (componentwise, labels preserved).
SummaryVector adjust_summary_s(const SummaryVector& eta_z, std::span<const double> gamma);

// varphi(z, zeta) = Gamma ⊙ (eta(y) - eta(z)); gamma components must be >= 0.
SummaryVector varphi(const SummaryVector& eta_y, const SummaryVector& eta_z,
                     std::span<const double> gamma);

}  // namespace rabc
