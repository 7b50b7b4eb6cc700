#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "rabc/diagnostics.hpp"
#include "rabc/stats.hpp"

using namespace rabc;

namespace {

AcceptedSample sample_with_gammas(const GammaPrior& prior, std::uint64_t seed, std::size_t n,
                                  std::size_t d) {
  AcceptedSample s;
  s.method = prior.kind == GammaPrior::Kind::Exponential ? Method::RabcW : Method::RabcS;
  s.gamma_prior = prior;
  s.n_total = n;
  s.eta_y.labels.resize(d);
  s.eta_y.values.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) s.eta_y.labels[j] = "s" + std::to_string(j);
  RngStream g(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    JointDraw dr;
    dr.stream_id = i;
    dr.distance = static_cast<double>(i) * 1e-3;
    dr.theta = {0.0};
    dr.gamma.resize(d);
    for (auto& v : dr.gamma) v = prior.sample(g);
    dr.sim_summary = s.eta_y;
    s.draws.push_back(std::move(dr));
  }
  s.epsilon = s.draws.back().distance;
  return s;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("gamma_compat: prior resample is not flagged") {
  const GammaPrior prior = default_gamma_prior(Method::RabcS);
  const auto s = sample_with_gammas(prior, 81, 500, 2);
  const CompatReport rep = gamma_compat(s);
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) {
    CHECK(e.divergence < ks_critical(0.01, 500));
    CHECK_FALSE(e.flagged);
    CHECK(e.prior_stat == 0.0);
  }
}

TEST_CASE("gamma_compat: shifted posterior is flagged") {
  const GammaPrior prior = default_gamma_prior(Method::RabcS);
  auto s = sample_with_gammas(prior, 82, 500, 2);
  for (auto& d : s.draws) d.gamma[1] = d.gamma[1] * 0.2 + 3.0;  // concentrated far from 0
  const CompatReport rep = gamma_compat(s);
  CHECK_FALSE(rep.entries[0].flagged);
  CHECK(rep.entries[1].flagged);
  CHECK(rep.entries[1].divergence > 0.9);
  CHECK(rep.entries[1].gamma_label == "gamma(s1)");
}

TEST_CASE("gamma_compat: usage errors") {
  AcceptedSample plain;
  plain.method = Method::Abc;
  CHECK_THROWS_AS(gamma_compat(plain), std::invalid_argument);

  const GammaPrior prior = default_gamma_prior(Method::RabcW);
  const auto tiny = sample_with_gammas(prior, 83, 50, 1);
  CHECK_THROWS_AS(gamma_compat(tiny), std::invalid_argument);
}

TEST_CASE("gamma_compat: flags invariant under draw permutation") {
  const GammaPrior prior = default_gamma_prior(Method::RabcW);
  auto s = sample_with_gammas(prior, 84, 300, 3);
  for (auto& d : s.draws) d.gamma[2] *= 0.05;  // squeezed toward zero
  const CompatReport before = gamma_compat(s);
  std::reverse(s.draws.begin(), s.draws.end());
  const CompatReport after = gamma_compat(s);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(before.entries[j].flagged == after.entries[j].flagged);
    CHECK(before.entries[j].divergence == doctest::Approx(after.entries[j].divergence));
  }
}

TEST_CASE("gamma_compat: null flag rate at most 5% over 100 seeds") {
  int flags = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_with_gammas(default_gamma_prior(Method::RabcS), 9000 + seed, 200, 1);
    if (gamma_compat(s).entries[0].flagged) ++flags;
  }
  CHECK(flags <= 5);
}

TEST_CASE("acceptance_curve: uniform distances hug the diagonal") {
  RngStream g(85, 0);
  std::vector<double> d(100000);
  for (auto& v : d) v = g.next_uniform();
  const AcceptanceCurve c = acceptance_curve(d, 200);
  CHECK(c.max_deviation < 0.02);
  CHECK(c.points.front().first == 0.0);
  CHECK(c.points.front().second == 0.0);
  CHECK(c.points.back().first == 1.0);
  CHECK(c.points.back().second == 1.0);
  for (std::size_t k = 1; k < c.points.size(); ++k) {
    CHECK(c.points[k].first >= c.points[k - 1].first);
    CHECK(c.points[k].second >= c.points[k - 1].second);
  }
}

TEST_CASE("acceptance_curve: skewed distances bow away from the diagonal") {
  RngStream g(86, 0);
  std::vector<double> d(50000);
  for (auto& v : d) v = 5.0 + std::abs(sample_normal(g, 0.0, 0.2));  // distance floor
  const AcceptanceCurve c = acceptance_curve(d, 200);
  CHECK(c.max_deviation > 0.1);
}

TEST_CASE("acceptance_curve: input validation") {
  std::vector<double> few(100, 0.5);
  CHECK_THROWS_AS(acceptance_curve(few, 100), std::invalid_argument);
  std::vector<double> enough(2000, 0.5);
  CHECK_THROWS_AS(acceptance_curve(enough, 1), std::invalid_argument);
}

}  // TEST_SUITE
