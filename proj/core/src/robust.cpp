#include "rabc/robust.hpp"

#include <stdexcept>

namespace rabc {

std::string method_name(Method m) {
  switch (m) {
    case Method::Abc: return "abc";
    case Method::RabcS: return "rabc-s";
    case Method::RabcW: return "rabc-w";
  }
  return "?";
}

double GammaPrior::sample(RngStream& s) const {
  switch (kind) {
    case Kind::None: throw std::invalid_argument("GammaPrior: sampling from 'none'");
    case Kind::Laplace: return sample_laplace(s, rate);
    case Kind::Exponential: return sample_exponential(s, rate);
    case Kind::PointMass: return value;
  }
  throw std::invalid_argument("GammaPrior: unknown kind");
}

double GammaPrior::cdf(double x) const {
  switch (kind) {
    case Kind::Laplace: return laplace_cdf(x, rate);
    case Kind::Exponential: return exponential_cdf(x, rate);
    case Kind::PointMass: return x >= value ? 1.0 : 0.0;
    case Kind::None: break;
  }
  throw std::invalid_argument("GammaPrior: no cdf");
}

double GammaPrior::pdf(double x) const {
  switch (kind) {
    case Kind::Laplace: return laplace_pdf(x, rate);
    case Kind::Exponential: return exponential_pdf(x, rate);
    default: break;
  }
  throw std::invalid_argument("GammaPrior: no pdf");
}

double GammaPrior::mean() const {
  switch (kind) {
    case Kind::Laplace: return 0.0;
    case Kind::Exponential: return 1.0 / rate;
    case Kind::PointMass: return value;
    case Kind::None: break;
  }
  throw std::invalid_argument("GammaPrior: no mean");
}

std::string GammaPrior::describe() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Laplace: return "laplace(" + std::to_string(rate) + ")";
    case Kind::Exponential: return "exponential(" + std::to_string(rate) + ")";
    case Kind::PointMass: return "point_mass(" + std::to_string(value) + ")";
  }
  return "?";
}

GammaPrior default_gamma_prior(Method m) {
  switch (m) {
    case Method::RabcS: return {GammaPrior::Kind::Laplace, 4.0, 0.0};
    case Method::RabcW: return {GammaPrior::Kind::Exponential, 0.5, 0.0};
    case Method::Abc: return {GammaPrior::Kind::None, 0.0, 0.0};
  }
  return {};
}

SummaryVector adjust_summary_s(const SummaryVector& eta_z, std::span<const double> gamma) {
  if (gamma.size() != eta_z.size())
    throw std::invalid_argument("adjust_summary_s: dimension mismatch");
  SummaryVector out = eta_z;
  for (std::size_t j = 0; j < gamma.size(); ++j) out.values[j] += gamma[j];
  return out;
}

SummaryVector varphi(const SummaryVector& eta_y, const SummaryVector& eta_z,
                     std::span<const double> gamma) {
  if (eta_y.size() != eta_z.size() || gamma.size() != eta_y.size())
    throw std::invalid_argument("varphi: dimension mismatch");
  SummaryVector out = eta_y;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (gamma[j] < 0.0) throw std::domain_error("varphi: gamma components must be >= 0");
    out.values[j] = gamma[j] * (eta_y.values[j] - eta_z.values[j]);
  }
  return out;
}

}  // namespace rabc
