#include "rabc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rabc/stats.hpp"

namespace rabc {

double MarginalPrior::sample(RngStream& s) const {
  switch (kind) {
    case Kind::Uniform: return sample_uniform(s, a, b);
    case Kind::Normal: return sample_normal(s, a, b);
    case Kind::Fixed: return a;
  }
  throw std::invalid_argument("MarginalPrior: unknown kind");
}

std::string MarginalPrior::describe() const {
  switch (kind) {
    case Kind::Uniform: return "uniform(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Kind::Normal: return "normal(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Kind::Fixed: return "fixed(" + std::to_string(a) + ")";
  }
  return "?";
}

void PriorSpec::sample_theta(RngStream& s, std::span<double> out) const {
  if (out.size() != theta.size()) throw std::invalid_argument("sample_theta: bad output span");
  for (int tries = 0; tries < 1000000; ++tries) {
    for (std::size_t j = 0; j < theta.size(); ++j) out[j] = theta[j].sample(s);
    if (constraint == Constraint::None) return;
    if (constraint == Constraint::Ma2Invertible) {
      MaParams p{{out.begin(), out.end()}};
      if (p.invertible()) return;
    }
  }
  throw std::runtime_error("sample_theta: constraint rejection did not terminate");
}

double distance(const SummaryVector& eta_y, const SummaryVector& eta_z,
                std::span<const double> gamma, const DistanceSpec& spec) {
  const std::size_t d = eta_y.size();
  if (eta_z.size() != d) throw std::invalid_argument("distance: dimension mismatch");
  double acc = 0.0;
  switch (spec.kind) {
    case DistanceSpec::Kind::Euclidean:
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = eta_y.values[j] - eta_z.values[j];
        acc += diff * diff;
      }
      break;
    case DistanceSpec::Kind::FixedWeighted: {
      if (spec.weights.size() != d) throw std::invalid_argument("distance: weight length mismatch");
      for (std::size_t j = 0; j < d; ++j) {
        const double wd = spec.weights[j] * (eta_y.values[j] - eta_z.values[j]);
        acc += wd * wd;
      }
      break;
    }
    case DistanceSpec::Kind::GammaWeighted: {
      if (gamma.size() != d) throw std::invalid_argument("distance: gamma required for gamma_weighted");
      if (!spec.weights.empty() && spec.weights.size() != d)
        throw std::invalid_argument("distance: base weight length mismatch");
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = eta_y.values[j] - eta_z.values[j];
        const double base = spec.weights.empty() ? 1.0 : spec.weights[j];
        acc += base * (1.0 + gamma[j] * gamma[j]) * diff * diff;
      }
      break;
    }
  }
  return std::sqrt(acc);
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("RABC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

SimulationBank build_bank(const Simulator& model, const SummaryMap& summary,
                          const PriorSpec& prior, const BankRequest& req) {
  if (req.n_draws == 0) throw std::invalid_argument("build_bank: n_draws must be >= 1");
  if (req.d_eta == 0) throw std::invalid_argument("build_bank: d_eta must be >= 1");

  SimulationBank bank;
  bank.n_draws = req.n_draws;
  bank.d_theta = prior.dim();
  bank.d_eta = req.d_eta;
  bank.seed = req.seed;
  bank.theta.resize(bank.n_draws * bank.d_theta);
  bank.eta.resize(bank.n_draws * bank.d_eta);
  bank.ok.assign(bank.n_draws, 0);
  if (req.gamma_s.robust()) bank.gamma_s.resize(bank.n_draws * bank.d_eta);
  if (req.gamma_w.robust()) bank.gamma_w.resize(bank.n_draws * bank.d_eta);

  const std::uint64_t gs_seed = derive_seed(req.seed, seed_tag::kGammaS);
  const std::uint64_t gw_seed = derive_seed(req.seed, seed_tag::kGammaW);

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RngStream s(req.seed, i);
      prior.sample_theta(s, {bank.theta.data() + i * bank.d_theta, bank.d_theta});
      try {
        const Series z = model({bank.theta.data() + i * bank.d_theta, bank.d_theta}, s);
        const SummaryVector eta_z = summary(z);
        if (eta_z.size() != bank.d_eta) throw std::invalid_argument("build_bank: summary dim mismatch");
        bool finite = true;
        for (std::size_t j = 0; j < bank.d_eta; ++j) {
          bank.eta[i * bank.d_eta + j] = eta_z.values[j];
          finite = finite && std::isfinite(eta_z.values[j]);
        }
        bank.ok[i] = finite ? 1 : 0;
      } catch (const std::exception&) {
        bank.ok[i] = 0;  // recorded as a failed draw, never accepted
      }
      if (!bank.gamma_s.empty()) {
        RngStream gs(gs_seed, i);
        for (std::size_t j = 0; j < bank.d_eta; ++j)
          bank.gamma_s[i * bank.d_eta + j] = req.gamma_s.sample(gs);
      }
      if (!bank.gamma_w.empty()) {
        RngStream gw(gw_seed, i);
        for (std::size_t j = 0; j < bank.d_eta; ++j)
          bank.gamma_w[i * bank.d_eta + j] = req.gamma_w.sample(gw);
      }
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(req.threads > 0 ? req.threads : default_thread_count(), bank.n_draws);
  if (n_threads <= 1) {
    fill(0, bank.n_draws);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const std::size_t chunk = (bank.n_draws + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(bank.n_draws, b + chunk);
      if (b < e) pool.emplace_back(fill, b, e);
    }
    for (auto& th : pool) th.join();
  }

  bank.n_failed = static_cast<std::size_t>(
      std::count(bank.ok.begin(), bank.ok.end(), static_cast<std::uint8_t>(0)));
  return bank;
}

std::vector<double> bank_distances(const SimulationBank& bank, const SummaryVector& eta_y,
                                   const SelectSpec& spec) {
  const std::size_t d = bank.d_eta;
  if (eta_y.size() != d) throw std::invalid_argument("bank_distances: eta_y dimension mismatch");
  if (spec.method == Method::RabcW && spec.distance.kind != DistanceSpec::Kind::GammaWeighted)
    throw std::invalid_argument("bank_distances: R-ABC-W requires a gamma_weighted distance");
  if (spec.method != Method::RabcW && spec.distance.kind == DistanceSpec::Kind::GammaWeighted)
    throw std::invalid_argument("bank_distances: gamma_weighted distance requires R-ABC-W");
  if (spec.method == Method::RabcS && !bank.has_gamma_s())
    throw std::invalid_argument("bank_distances: bank has no R-ABC-S gamma draws");
  if (spec.method == Method::RabcW && !bank.has_gamma_w())
    throw std::invalid_argument("bank_distances: bank has no R-ABC-W gamma draws");
  if (spec.distance.kind == DistanceSpec::Kind::FixedWeighted &&
      spec.distance.weights.size() != d)
    throw std::invalid_argument("bank_distances: fixed weight length mismatch");
  if (!spec.distance.weights.empty() && spec.distance.weights.size() != d)
    throw std::invalid_argument("bank_distances: weight length mismatch");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(bank.n_draws, inf);
  for (std::size_t i = 0; i < bank.n_draws; ++i) {
    if (!bank.ok[i]) continue;
    const double* eta = bank.eta.data() + i * d;
    double acc = 0.0;
    switch (spec.method) {
      case Method::Abc: {
        for (std::size_t j = 0; j < d; ++j) {
          const double w = spec.distance.kind == DistanceSpec::Kind::FixedWeighted
                               ? spec.distance.weights[j]
                               : 1.0;
          const double diff = w * (eta_y.values[j] - eta[j]);
          acc += diff * diff;
        }
        break;
      }
      case Method::RabcS: {
        const double* g = bank.gamma_s.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) {
          const double w = spec.distance.kind == DistanceSpec::Kind::FixedWeighted
                               ? spec.distance.weights[j]
                               : 1.0;
          const double diff = w * (eta_y.values[j] - (eta[j] + g[j]));
          acc += diff * diff;
        }
        break;
      }
      case Method::RabcW: {
        const double* g = bank.gamma_w.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = eta_y.values[j] - eta[j];
          const double base = spec.distance.weights.empty() ? 1.0 : spec.distance.weights[j];
          acc += base * (1.0 + g[j] * g[j]) * diff * diff;
        }
        break;
      }
    }
    dist[i] = std::isfinite(acc) ? std::sqrt(acc) : inf;
  }
  return dist;
}

AcceptedSample select_accepted(const SimulationBank& bank, const SummaryVector& eta_y,
                               const SelectSpec& spec) {
  if (!(spec.accept_quantile > 0.0 && spec.accept_quantile <= 1.0))
    throw std::invalid_argument("select_accepted: accept_quantile must be in (0,1]");
  const double target = spec.accept_quantile * static_cast<double>(bank.n_draws);
  if (target < 1.0)
    throw std::invalid_argument("select_accepted: n_draws * accept_quantile < 1");

  const std::vector<double> dist = bank_distances(bank, eta_y, spec);

  std::vector<std::uint32_t> idx(bank.n_draws);
  std::iota(idx.begin(), idx.end(), 0u);
  // Ties broken by stream id so the accepted set is unique and reproducible.
  auto cmp = [&](std::uint32_t a, std::uint32_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  };
  const std::size_t n_eligible = bank.n_draws - bank.n_failed;
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(std::ceil(target)), n_eligible);
  if (m == 0) throw std::runtime_error("select_accepted: no eligible draws");
  std::nth_element(idx.begin(), idx.begin() + (m - 1), idx.end(), cmp);
  std::sort(idx.begin(), idx.begin() + m, cmp);

  AcceptedSample out;
  out.n_total = bank.n_draws;
  out.n_failed = bank.n_failed;
  out.method = spec.method;
  out.gamma_prior = spec.gamma_prior;
  out.eta_y = eta_y;
  out.epsilon = dist[idx[m - 1]];
  out.draws.reserve(m);
  const std::size_t d = bank.d_eta;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = idx[k];
    JointDraw jd;
    jd.stream_id = i;
    jd.distance = dist[i];
    jd.theta.assign(bank.theta.begin() + i * bank.d_theta,
                    bank.theta.begin() + (i + 1) * bank.d_theta);
    jd.sim_summary.labels = eta_y.labels;
    jd.sim_summary.values.assign(bank.eta.begin() + i * d, bank.eta.begin() + (i + 1) * d);
    if (spec.method == Method::RabcS) {
      jd.gamma.assign(bank.gamma_s.begin() + i * d, bank.gamma_s.begin() + (i + 1) * d);
      // R-ABC-S draws carry the adjusted summary phi = eta(z) + Gamma.
      for (std::size_t j = 0; j < d; ++j) jd.sim_summary.values[j] += jd.gamma[j];
    } else if (spec.method == Method::RabcW) {
      jd.gamma.assign(bank.gamma_w.begin() + i * d, bank.gamma_w.begin() + (i + 1) * d);
    }
    out.draws.push_back(std::move(jd));
  }
  return out;
}

AcceptedSample run_rejection(const Simulator& model, const SummaryMap& summary,
                             const PriorSpec& prior, const DistanceSpec& dist,
                             const SummaryVector& eta_y, const RejectionConfig& cfg) {
  if (cfg.accept_quantile <= 0.0 || cfg.accept_quantile > 1.0)
    throw std::invalid_argument("run_rejection: accept_quantile must be in (0,1]");
  if (static_cast<double>(cfg.n_draws) < 1.0 / cfg.accept_quantile)
    throw std::invalid_argument("run_rejection: n_draws must be >= 1/accept_quantile");

  BankRequest req;
  req.n_draws = cfg.n_draws;
  req.d_eta = eta_y.size();
  req.seed = cfg.root_seed;
  req.threads = cfg.threads;
  if (cfg.method == Method::RabcS) req.gamma_s = prior.gamma;
  if (cfg.method == Method::RabcW) req.gamma_w = prior.gamma;
  if (cfg.method != Method::Abc && !prior.gamma.robust())
    throw std::invalid_argument("run_rejection: robust method requires a gamma prior");

  const SimulationBank bank = build_bank(model, summary, prior, req);
  SelectSpec sel{cfg.method, dist, cfg.accept_quantile, prior.gamma};
  return select_accepted(bank, eta_y, sel);
}

PosteriorStats posterior_stats(const std::vector<std::vector<double>>& draws) {
  if (draws.size() < 20) throw std::invalid_argument("posterior_stats: need >= 20 draws");
  const std::size_t p = draws.front().size();
  PosteriorStats st;
  st.n_draws = draws.size();
  st.mean.resize(p);
  st.sd.resize(p);
  st.lo.resize(p);
  st.hi.resize(p);
  std::vector<double> col(draws.size());
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < draws.size(); ++i) {
      if (draws[i].size() != p) throw std::invalid_argument("posterior_stats: ragged draws");
      col[i] = draws[i][j];
    }
    // Sorting first makes every statistic invariant to draw order.
    std::sort(col.begin(), col.end());
    const double m = mean_of(col);
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    st.mean[j] = m;
    st.sd[j] = std::sqrt(ss / static_cast<double>(col.size() - 1));
    st.lo[j] = quantile_sorted(col, 0.025);
    st.hi[j] = quantile_sorted(col, 0.975);
  }
  return st;
}

PosteriorStats posterior_stats_theta(const AcceptedSample& s) {
  std::vector<std::vector<double>> draws;
  draws.reserve(s.draws.size());
  for (const auto& d : s.draws) draws.push_back(d.theta);
  return posterior_stats(draws);
}

}  // namespace rabc
