#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pilotopt/covariance_smoother.hpp"
#include "pilotopt/pilot_patterns.hpp"
#include "pilotopt/process_noise.hpp"

namespace testsupport {

using namespace pilotopt;

double conditioning_objective(const PilotMask& mask, const SystemConfig& cfg) {
  const int M = cfg.num_channels;
  const int N = cfg.block_length;
  const MeasurementInfo info = pilot_prior_info(mask, cfg);
  const Eigen::MatrixXd Q = build_process_noise_cov(cfg).matrix;
  const Eigen::VectorXd init =
      info.effective_variance.col(0) / cfg.symbol_energy;  // M_{1|1} diagonal

  Eigen::MatrixXd prior(M * N, M * N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      Eigen::MatrixXd blk = std::min(k, l) * Q;
      blk.diagonal() += init;
      prior.block(k * M, l * M, M, M) = blk;
    }

  // One scalar observation theta_{i,k} + noise per weighted slot, k >= 2.
  std::vector<int> rows;
  std::vector<double> noise_var;
  for (int k = 1; k < N; ++k)
    for (int i = 0; i < M; ++i)
      if (info.weight(i, k) > 0.0) {
        rows.push_back(k * M + i);
        noise_var.push_back(1.0 / info.weight(i, k));
      }
  if (rows.empty()) return prior.trace();

  const int D = static_cast<int>(rows.size());
  Eigen::MatrixXd cross(M * N, D);  // prior * H^T
  Eigen::MatrixXd gram(D, D);       // H * prior * H^T + R
  for (int a = 0; a < D; ++a) cross.col(a) = prior.col(rows[a]);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      gram(a, b) = prior(rows[a], rows[b]) + (a == b ? noise_var[a] : 0.0);

  const Eigen::MatrixXd post =
      prior - cross * gram.ldlt().solve(cross.transpose());
  return post.trace();
}

double dense_gmi(const Constellation& cons, double noise_psd, long long num_symbols,
                 std::uint64_t seed) {
  const int m = cons.bits_per_symbol;
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, cons.order - 1);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_psd / 2.0));

  std::vector<double> metric(cons.order);
  long double acc = 0.0L;
  for (long long t = 0; t < num_symbols; ++t) {
    const int label = pick(gen);
    const std::complex<double> y =
        cons.points[label] + std::complex<double>(gauss(gen), gauss(gen));
    double mx = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < cons.order; ++l) {
      metric[l] = -std::norm(y - cons.points[l]) / noise_psd;
      mx = std::max(mx, metric[l]);
    }
    for (int b = 0; b < m; ++b) {
      const int sent = (label >> (m - 1 - b)) & 1;
      double sum_all = 0.0, sum_match = 0.0;
      for (int l = 0; l < cons.order; ++l) {
        const double e = std::exp(metric[l] - mx);
        sum_all += e;
        if (((l >> (m - 1 - b)) & 1) == sent) sum_match += e;
      }
      acc += std::log(sum_all) - std::log(sum_match);
    }
  }
  const double gmi =
      m - static_cast<double>(acc) / (static_cast<double>(num_symbols) * std::log(2.0));
  return gmi;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1.0;
    for (int t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double exhaustive_unstructured_best(const SystemConfig& cfg, int num_pilots) {
  const int slots = cfg.num_channels * cfg.block_length;
  std::vector<int> comb(num_pilots);
  std::iota(comb.begin(), comb.end(), 1);  // 1-based positions
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    const PilotMask mask =
        PilotMask::from_positions(cfg.num_channels, cfg.block_length, comb);
    best = std::min(best, smoother_objective(mask, cfg));
    // next combination
    int i = num_pilots - 1;
    while (i >= 0 && comb[i] == slots - (num_pilots - 1 - i)) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < num_pilots; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

double exhaustive_structured_best(const SystemConfig& cfg, int pilots_per_channel) {
  const int M = cfg.num_channels;
  const int N = cfg.block_length;
  const int kappa = pilots_per_channel;

  // Enumerate per-channel (delta, tau) choices; with kappa = 2 tau does not
  // move any pilot, so it is fixed at 1 to keep the product space small.
  std::vector<std::pair<int, int>> choices;
  for (int delta = 2; delta <= N - std::max(0, kappa - 2); ++delta) {
    const int tau_max = kappa >= 3 ? (N - delta) / (kappa - 2) : 1;
    for (int tau = 1; tau <= tau_max; ++tau) choices.emplace_back(delta, tau);
  }

  std::vector<int> idx(M, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    StructuredDistribution d;
    d.pilots_per_channel = kappa;
    for (int i = 0; i < M; ++i) {
      d.offset.push_back(choices[idx[i]].first);
      d.spacing.push_back(choices[idx[i]].second);
    }
    best = std::min(best, smoother_objective(structured_to_mask(d, M, N), cfg));
    int i = M - 1;
    while (i >= 0 && idx[i] + 1 == static_cast<int>(choices.size())) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }
  return best;
}

}  // namespace testsupport
