// End-to-end checks, one per command-line number, each printing a single
// PASS/FAIL line. Tolerances are pinned here and nowhere else. Everything is
// seeded, so a passing criterion passes on every rerun.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pilotopt/air.hpp"
#include "pilotopt/channel.hpp"
#include "pilotopt/covariance_smoother.hpp"
#include "pilotopt/genetic.hpp"
#include "pilotopt/pilot_patterns.hpp"
#include "pilotopt/process_noise.hpp"
#include "pilotopt/rng.hpp"
#include "pilotopt/state_smoother.hpp"
#include "pilotopt/system_config.hpp"
#include "support/oracles.hpp"

using namespace pilotopt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

PilotMask random_mask(int M, int N, double p, Rng& rng) {
  PilotMask mask(M, N);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < M; ++i)
      if (rng.uniform() < p) mask.set(i, k);
  return mask;
}

std::vector<int> slots_of(const PilotMask& mask, int channel) {
  std::vector<int> out;
  for (int k = 0; k < mask.block_length(); ++k)
    if (mask.at(channel, k)) out.push_back(k + 1);
  return out;
}

GaConfig reduced_ga(std::uint64_t seed) {
  GaConfig ga;
  ga.population_size = 120;
  ga.generations = 150;
  ga.stall_generations = 25;
  ga.rng_seed = seed;
  return ga;
}

AirOptions desk_air() {
  AirOptions o;
  o.min_blocks = 8;
  o.block_cap = 64;
  o.ci_target = 0.03;
  o.batch_size = 8;
  o.num_iters = 3;
  return o;
}

// 1. Smoothing objective vs joint-Gaussian conditioning on 50 random small
// instances; relative error <= 1e-9.
Outcome criterion_1() {
  Rng rng(0xACC001);
  const double alphas[] = {0.0, 0.5, 1.0};
  const double linewidths[] = {50e3, 200e3, 1e6};
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int M = (t % 2 == 0) ? 2 : 4;
    const int N = M == 2 ? 2 + t % 5 : 2 + t % 3;
    const SystemConfig cfg =
        SystemConfig::make(M, N, rng.uniform(10.0, 30.0), alphas[t % 3],
                           linewidths[(t / 3) % 3]);
    const PilotMask mask = random_mask(M, N, 0.4, rng);
    const double J = smoother_objective(mask, cfg);
    const double Jo = testsupport::conditioning_objective(mask, cfg);
    worst = std::max(worst, std::abs(J - Jo) / Jo);
  }
  return {worst <= 1e-9, "max relative error " + fmt(worst) + " over 50 instances (tol 1e-9)"};
}

// 2. Pilots only in the first slot: objective equals the closed form
// N*tr(M_11) + tr(Q)*N*(N-1)/2 to 1e-12 relative (M=4, N=100).
Outcome criterion_2() {
  const int M = 4, N = 100;
  const SystemConfig cfg = SystemConfig::make(M, N, 20.0, 0.5);
  PilotMask mask(M, N);
  for (int i = 0; i < M; ++i) mask.set(i, 0);
  const double J = smoother_objective(mask, cfg);
  const double tr_init =
      pilot_prior_info(mask, cfg).effective_variance.col(0).sum() / cfg.symbol_energy;
  const double tr_q = build_process_noise_cov(cfg).matrix.trace();
  const double closed = N * tr_init + tr_q * N * (N - 1) / 2.0;
  const double rel = std::abs(J - closed) / closed;
  return {rel <= 1e-12, "relative error " + fmt(rel) + " vs closed form (tol 1e-12)"};
}

// 3. Monte-Carlo wrapped MSE of pilot-only smoothing matches J/(MN) within
// 15% (S4, 1% pilots, M=4, N=1000, SNR 25 dB, linewidth*T = 1e-5, 200 seeds).
Outcome criterion_3() {
  const int M = 4, N = 1000, kappa = 10, seeds = 200;
  const SystemConfig cfg = SystemConfig::make(M, N, 25.0, 0.5, 200e3);
  const PilotMask mask = build_family_mask(PatternFamily::kS4, kappa, M, N);
  const double predicted = smoother_objective(mask, cfg) / (M * N);
  const Constellation cons = make_constellation(64, cfg.symbol_energy);
  const MeasurementInfo info = pilot_prior_info(mask, cfg);
  const ProcessNoiseCov cov = build_process_noise_cov(cfg);

  double acc = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t base = derive_seed(0xACC003, s);
    const Eigen::MatrixXd theta = sample_phase_trajectory(cov, N, derive_seed(base, 0));
    const SymbolBlock block = generate_symbol_block(mask, cons, cfg.pilot_point,
                                                    derive_seed(base, 1));
    const Eigen::MatrixXcd r =
        transmit(block.symbols, theta, cfg.noise_psd, derive_seed(base, 2));
    acc += wrapped_mse(state_smoother(r, info, cfg).smoothed, theta);
  }
  const double mc = acc / seeds;
  const double dev = std::abs(mc / predicted - 1.0);
  return {dev <= 0.15, "MC MSE " + fmt(mc) + " vs predicted " + fmt(predicted) +
                           ", deviation " + fmt(dev) + " (tol 0.15)"};
}

// 4. Structured vs unstructured optimization on (M=4, N=100, 20 pilots):
// mean of (J_str - J_unstr)/J_unstr over 15 (alpha, SNR) points in
// [-0.02, 0.05].
Outcome criterion_4() {
  const double alphas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double snrs[] = {15.0, 20.0, 25.0};
  double sum = 0.0;
  int idx = 0;
  for (double alpha : alphas)
    for (double snr : snrs) {
      const SystemConfig cfg = SystemConfig::make(4, 100, snr, alpha);
      GaConfig ga_u, ga_s;
      ga_u.rng_seed = derive_seed(0xACC004, 2 * idx);
      ga_s.rng_seed = derive_seed(0xACC004, 2 * idx + 1);
      const double ju = optimize_unstructured(cfg, 20, ga_u).best_objective;
      const double js = optimize_structured(cfg, 5, ga_s).best_objective;
      sum += (js - ju) / ju;
      ++idx;
    }
  const double mean = sum / idx;
  return {mean >= -0.02 && mean <= 0.05,
          "mean structured-over-unstructured excess " + fmt(mean) + " (window [-0.02, 0.05])"};
}

// 5. Heuristic orderings at M=4, 1% pilots, SNR 25, N=1000.
Outcome criterion_5() {
  const int M = 4, N = 1000, kappa = 10;
  const double alphas[] = {0.0, 0.5, 1.0};
  std::map<double, std::map<int, double>> J;  // alpha -> family index -> J
  std::map<double, double> Jopt;
  for (int a = 0; a < 3; ++a) {
    const SystemConfig cfg = SystemConfig::make(M, N, 25.0, alphas[a]);
    for (int f = 0; f < 5; ++f)
      J[alphas[a]][f + 1] = smoother_objective(
          build_family_mask(static_cast<PatternFamily>(f), kappa, M, N), cfg);
    Jopt[alphas[a]] =
        optimize_structured(cfg, kappa, reduced_ga(derive_seed(0xACC005, a))).best_objective;
  }
  std::ostringstream why;
  bool pass = true;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      why << (why.str().empty() ? "" : "; ") << what;
    }
  };
  for (double a : alphas)
    expect(J[a][4] <= 1.05 * Jopt[a], "S4 > 1.05*opt at alpha=" + fmt(a));
  expect(J[0.0][2] <= 1.05 * Jopt[0.0], "S2 > 1.05*opt at alpha=0");
  expect(J[1.0][3] <= 1.05 * Jopt[1.0], "S3 > 1.05*opt at alpha=1");
  expect(J[0.0][5] > J[0.0][1] && J[0.0][1] > J[0.0][4], "alpha=0 ordering S5 > S1 > S4 broken");
  expect(J[1.0][1] > J[1.0][4], "alpha=1 ordering S1 > S4 broken");
  if (pass) {
    why << "all orderings hold; e.g. alpha=1: S1 " << fmt(J[1.0][1]) << ", S4 "
        << fmt(J[1.0][4]) << ", opt " << fmt(Jopt[1.0]);
  }
  return {pass, why.str()};
}

// 6. Low-SNR collapse: at SNR 10 dB the spread of J over {S1..S4, opt} is
// at most 10% for alpha in {0, 1}.
Outcome criterion_6() {
  const int M = 4, N = 1000, kappa = 10;
  std::ostringstream why;
  bool pass = true;
  for (int a = 0; a < 2; ++a) {
    const double alpha = a == 0 ? 0.0 : 1.0;
    const SystemConfig cfg = SystemConfig::make(M, N, 10.0, alpha);
    std::vector<double> js;
    for (int f = 0; f < 4; ++f)
      js.push_back(smoother_objective(
          build_family_mask(static_cast<PatternFamily>(f), kappa, M, N), cfg));
    js.push_back(
        optimize_structured(cfg, kappa, reduced_ga(derive_seed(0xACC006, a))).best_objective);
    const double spread =
        *std::max_element(js.begin(), js.end()) / *std::min_element(js.begin(), js.end());
    if (spread > 1.10) pass = false;
    why << (a ? "; " : "") << "alpha=" << fmt(alpha) << " max/min " << fmt(spread);
  }
  return {pass, why.str() + " (tol 1.10)"};
}

// 7. MSE reduction 1 - J_S4/J_S1 is non-decreasing along the alpha, SNR,
// linewidth, and channel-count axes (Spearman rho >= 0.9 on 4 points each)
// and exceeds 50% at the aggressive corner.
Outcome criterion_7() {
  const int N = 1000, kappa = 10;
  auto reduction = [&](int M, double alpha, double snr, double lw) {
    const SystemConfig cfg = SystemConfig::make(M, N, snr, alpha, lw);
    const double j1 =
        smoother_objective(build_family_mask(PatternFamily::kS1, kappa, M, N), cfg);
    const double j4 =
        smoother_objective(build_family_mask(PatternFamily::kS4, kappa, M, N), cfg);
    return 1.0 - j4 / j1;
  };

  struct Axis {
    std::string name;
    std::vector<double> values;
    std::vector<double> reductions;
  };
  std::vector<Axis> axes = {{"alpha", {0.0, 0.5, 0.9, 1.0}, {}},
                            {"snr", {10.0, 20.0, 25.0, 30.0}, {}},
                            {"linewidth", {50e3, 200e3, 500e3, 1e6}, {}},
                            {"channels", {2, 4, 8, 16}, {}}};
  for (double v : axes[0].values) axes[0].reductions.push_back(reduction(4, v, 25.0, 200e3));
  for (double v : axes[1].values) axes[1].reductions.push_back(reduction(4, 1.0, v, 200e3));
  for (double v : axes[2].values) axes[2].reductions.push_back(reduction(4, 1.0, 25.0, v));
  for (double v : axes[3].values)
    axes[3].reductions.push_back(reduction(static_cast<int>(v), 1.0, 25.0, 200e3));

  std::ostringstream why;
  bool pass = true;
  for (const Axis& ax : axes) {
    const double rho = testsupport::spearman_rho(ax.values, ax.reductions);
    if (rho < 0.9) pass = false;
    why << ax.name << " rho " << fmt(rho) << ", ";
  }
  const double corner = reduction(16, 1.0, 30.0, 1e6);
  if (corner <= 0.5) pass = false;
  why << "corner reduction " << fmt(corner) << " (need > 0.5)";
  return {pass, why.str()};
}

// 8. Rate-versus-AIR curve for 256QAM, M=4, SNR 25, alpha=1, S1 family has
// an interior maximum: both endpoints sit below the peak by more than the
// two CI halfwidths combined.
Outcome criterion_8() {
  const SystemConfig cfg = SystemConfig::make(4, 1000, 25.0, 1.0);
  const Constellation cons = make_constellation(256, cfg.symbol_energy);
  const std::vector<double> rates = {0.002, 0.005, 0.01, 0.02, 0.05};
  const SweepResult sweep =
      sweep_pilot_rate(cfg, cons, PatternFamily::kS1, rates, desk_air(), 0xACC008);

  const int last = static_cast<int>(sweep.grid.size()) - 1;
  const bool interior = sweep.argmax_index > 0 && sweep.argmax_index < last;
  const AirResult& top = sweep.grid[sweep.argmax_index].result;
  auto clear_of = [&](int i) {
    const AirResult& r = sweep.grid[i].result;
    return top.air_bits_per_symbol - r.air_bits_per_symbol >
           top.ci_halfwidth + r.ci_halfwidth;
  };
  const bool pass = interior && clear_of(0) && clear_of(last);
  std::ostringstream why;
  why << "argmax at rate " << fmt(sweep.argmax_rate) << " with AIR " << fmt(sweep.max_air)
      << "; endpoints " << fmt(sweep.grid[0].result.air_bits_per_symbol) << " and "
      << fmt(sweep.grid[last].result.air_bits_per_symbol);
  return {pass, why.str()};
}

// 9. Table-style gain check at desk scale: S4's rate-maximized AIR is >= S1's
// for alpha in {0, 1}, and beats it beyond the CI at alpha = 1.
Outcome criterion_9() {
  const Constellation cons = make_constellation(256, 1.0);
  const std::vector<double> rates = {0.002, 0.005, 0.01, 0.02, 0.05};
  std::ostringstream why;
  bool pass = true;
  for (int a = 0; a < 2; ++a) {
    const double alpha = a == 0 ? 0.0 : 1.0;
    const SystemConfig cfg = SystemConfig::make(4, 1000, 25.0, alpha);
    const AirGainCell cell =
        air_gain_cell(cfg, cons, rates, desk_air(), derive_seed(0xACC009, a));
    if (cell.gain < 0.0) pass = false;
    if (a == 1 && cell.gain <= std::max(cell.ci_s1, cell.ci_s4)) pass = false;
    why << (a ? "; " : "") << "alpha=" << fmt(alpha) << " gain " << fmt(cell.gain)
        << " (ci " << fmt(std::max(cell.ci_s1, cell.ci_s4)) << ")";
  }
  return {pass, why.str()};
}

// 10. Zero-linewidth genie-phase GMI matches the from-scratch Monte-Carlo
// rate within 0.05 bits/symbol for 64QAM @ 20 dB and 256QAM @ 25 dB.
Outcome criterion_10() {
  AirOptions opt;
  opt.genie_phase = true;
  opt.min_blocks = 8;
  opt.block_cap = 100;
  opt.ci_target = 0.005;

  std::ostringstream why;
  bool pass = true;
  const struct {
    int order;
    double snr;
    long long oracle_symbols;
  } cases[] = {{64, 20.0, 2'000'000}, {256, 25.0, 1'000'000}};
  for (int c = 0; c < 2; ++c) {
    const SystemConfig cfg = SystemConfig::make(4, 1000, cases[c].snr, 1.0, 0.0);
    const Constellation cons = make_constellation(cases[c].order, cfg.symbol_energy);
    const PilotMask mask = build_family_mask(PatternFamily::kS1, 2, 4, 1000);
    const AirResult air = estimate_air(cfg, mask, cons, opt, derive_seed(0xACC00A, c));
    const double oracle = testsupport::dense_gmi(cons, cfg.noise_psd, cases[c].oracle_symbols,
                                                 derive_seed(0xACC00B, c));
    const double diff = std::abs(air.gmi_bits_per_symbol - oracle);
    if (diff > 0.05) pass = false;
    why << (c ? "; " : "") << cases[c].order << "QAM gmi " << fmt(air.gmi_bits_per_symbol)
        << " vs oracle " << fmt(oracle) << " (diff " << fmt(diff) << ")";
  }
  return {pass, why.str() + " (tol 0.05)"};
}

// 11. Property suites: pilot monotonicity, 4D-pair permutation invariance,
// PSD smoothed covariances, and GA-vs-exhaustive optima.
Outcome criterion_11() {
  std::ostringstream why;
  bool pass = true;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      why << (why.str().empty() ? "" : "; ") << what;
    }
  };

  // Adding pilots never increases J (200 nested pairs).
  {
    Rng rng(0xACC00B01);
    const double alphas[] = {0.0, 0.5, 1.0};
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
      const SystemConfig cfg = SystemConfig::make(4, 30, 20.0, alphas[t % 3]);
      const PilotMask a = random_mask(4, 30, 0.2, rng);
      PilotMask b = a;
      for (int extra = 1 + t % 5; extra > 0;) {
        const int i = static_cast<int>(rng.uniform_int(0, 3));
        const int k = static_cast<int>(rng.uniform_int(0, 29));
        if (!b.at(i, k)) {
          b.set(i, k);
          --extra;
        }
      }
      if (smoother_objective(b, cfg) > smoother_objective(a, cfg) * (1.0 + 1e-9)) ++violations;
    }
    expect(violations == 0, std::to_string(violations) + " monotonicity violations");
  }

  // Swapping the two 4D channel pairs leaves J unchanged.
  {
    Rng rng(0xACC00B02);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const SystemConfig cfg = SystemConfig::make(4, 25, 22.0, 0.5);
      const PilotMask a = random_mask(4, 25, 0.3, rng);
      PilotMask b(4, 25);
      for (int k = 0; k < 25; ++k)
        for (int i = 0; i < 4; ++i)
          if (a.at(i, k)) b.set((i + 2) % 4, k);
      const double ja = smoother_objective(a, cfg);
      const double jb = smoother_objective(b, cfg);
      worst = std::max(worst, std::abs(ja - jb) / ja);
    }
    expect(worst <= 1e-12, "permutation invariance broke, rel err " + fmt(worst));
  }

  // Every smoothed covariance stays PSD.
  {
    Rng rng(0xACC00B03);
    bool psd = true;
    for (int t = 0; t < 5 && psd; ++t) {
      const SystemConfig cfg = SystemConfig::make(4, 40, 15.0 + 5.0 * t, (t % 3) * 0.5);
      const SmootherTrace trace =
          covariance_smoother(random_mask(4, 40, 0.25, rng), cfg, true);
      for (const Eigen::MatrixXd& m : trace.smoothed) {
        const double eig_min =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
        if (eig_min < -1e-10 * std::max(1.0, m.trace())) psd = false;
      }
    }
    expect(psd, "smoothed covariance with negative eigenvalue");
  }

  // GA lands within 1% of the exhaustive optimum on two small instances.
  {
    const SystemConfig cfg_u = SystemConfig::make(2, 8, 20.0, 0.5);
    GaConfig ga;
    ga.rng_seed = 0xACC00B04;
    const double ga_u = optimize_unstructured(cfg_u, 2, ga).best_objective;
    const double ex_u = testsupport::exhaustive_unstructured_best(cfg_u, 2);
    expect(ga_u <= 1.01 * ex_u,
           "unstructured GA " + fmt(ga_u) + " vs exhaustive " + fmt(ex_u));

    const SystemConfig cfg_s = SystemConfig::make(2, 20, 20.0, 0.5);
    ga.rng_seed = 0xACC00B05;
    const double ga_s = optimize_structured(cfg_s, 2, ga).best_objective;
    const double ex_s = testsupport::exhaustive_structured_best(cfg_s, 2);
    expect(ga_s <= 1.01 * ex_s,
           "structured GA " + fmt(ga_s) + " vs exhaustive " + fmt(ex_s));
  }

  if (pass) why << "monotonicity, permutation, PSD, and GA-vs-exhaustive all hold";
  return {pass, why.str()};
}

// 12. Heuristic constructions at (M=4, N=120, kappa=3) reproduce the
// hand-computed position sets exactly.
Outcome criterion_12() {
  const int M = 4, N = 120, kappa = 3;
  const std::vector<std::vector<std::vector<int>>> expected = {
      // S1
      {{1, 41, 81}, {1, 41, 81}, {1, 41, 81}, {1, 41, 81}},
      // S2
      {{1, 25, 73}, {1, 49, 97}, {1, 25, 73}, {1, 49, 97}},
      // S3
      {{1, 14, 68}, {1, 28, 81}, {1, 41, 94}, {1, 54, 108}},
      // S4 (v = 1, 3, 2, 4)
      {{1, 14, 68}, {1, 41, 94}, {1, 28, 81}, {1, 54, 108}},
      // S5
      {{1, 14, 28, 41, 54, 68, 81, 94, 108}, {1}, {1}, {1}},
  };
  std::ostringstream why;
  bool pass = true;
  for (int f = 0; f < 5; ++f) {
    const PilotMask mask = build_family_mask(static_cast<PatternFamily>(f), kappa, M, N);
    for (int i = 0; i < M; ++i) {
      const std::vector<int> got = slots_of(mask, i);
      if (got != expected[f][i]) {
        pass = false;
        why << "S" << f + 1 << " channel " << i + 1 << " got {";
        for (size_t t = 0; t < got.size(); ++t) why << (t ? "," : "") << got[t];
        why << "}; ";
      }
    }
  }
  if (pass) why << "S1-S5 position sets match the hand-computed values";
  return {pass, why.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..12>\n");
    return 2;
  }
  const int n = std::atoi(argv[1]);
  Outcome (*table[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8,
                          criterion_9, criterion_10, criterion_11, criterion_12};
  if (n < 1 || n > 12) {
    std::fprintf(stderr, "unknown criterion %d\n", n);
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  const Outcome o = table[n - 1]();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion-%d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str(),
              secs);
  return o.pass ? 0 : 1;
}
