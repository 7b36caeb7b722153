#include "pilotopt/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pilotopt/parallel.hpp"

namespace pilotopt {

void GaConfig::validate() const {
  if (population_size < 1) throw std::invalid_argument("ga: population_size must be >= 1");
  if (generations < 1) throw std::invalid_argument("ga: generations must be >= 1");
  if (tournament_size < 1) throw std::invalid_argument("ga: tournament_size must be >= 1");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw std::invalid_argument("ga: crossover_rate must be in [0, 1]");
  if (mutation_rate && (*mutation_rate < 0.0 || *mutation_rate > 1.0))
    throw std::invalid_argument("ga: mutation_rate must be in [0, 1]");
  if (elitism_count < 0 || elitism_count > population_size)
    throw std::invalid_argument("ga: elitism_count must be in [0, population_size]");
  if (stall_generations < 1) throw std::invalid_argument("ga: stall_generations must be >= 1");
}

namespace {

// L distinct 1-based linear positions in [1, M*N].
class UnstructuredProblem : public GaProblem {
 public:
  UnstructuredProblem(int num_pilots, int num_channels, int block_length)
      : L_(num_pilots), M_(num_channels), N_(block_length), slots_(M_ * N_) {}

  int genome_length() const override { return L_; }

  Genome random_genome(Rng& rng) const override {
    Genome g(L_);
    for (int& v : g) v = static_cast<int>(rng.uniform_int(1, slots_));
    repair(g, rng);
    return g;
  }

  int random_gene(Rng& rng, int) const override {
    return static_cast<int>(rng.uniform_int(1, slots_));
  }

  // Duplicates are re-drawn uniformly from the unused slots, scanning genes
  // left to right.
  void repair(Genome& g, Rng& rng) const override {
    std::vector<std::uint8_t> used(slots_ + 1, 0);
    std::vector<int> dup;
    for (int j = 0; j < L_; ++j) {
      int& v = g[j];
      if (v < 1 || v > slots_) v = static_cast<int>(rng.uniform_int(1, slots_));
      if (used[v])
        dup.push_back(j);
      else
        used[v] = 1;
    }
    if (dup.empty()) return;
    std::vector<int> unused;
    unused.reserve(slots_ - (L_ - static_cast<int>(dup.size())));
    for (int p = 1; p <= slots_; ++p)
      if (!used[p]) unused.push_back(p);
    for (int j : dup) {
      const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(unused.size()) - 1);
      g[j] = unused[pick];
      unused[pick] = unused.back();
      unused.pop_back();
    }
  }

  PilotMask to_mask(const Genome& g) const override {
    return PilotMask::from_positions(M_, N_, g);
  }

 private:
  int L_, M_, N_, slots_;
};

// Genome [delta_1, tau_1, ..., delta_M, tau_M] for a fixed kappa >= 2.
class StructuredProblem : public GaProblem {
 public:
  StructuredProblem(int kappa, int num_channels, int block_length)
      : kappa_(kappa), M_(num_channels), N_(block_length) {
    // The kappa-1 explicit pilots span delta .. delta + (kappa-2)*tau; leave
    // room for tau = 1.
    max_delta_ = N_ - std::max(0, kappa_ - 2);
  }

  int genome_length() const override { return 2 * M_; }

  Genome random_genome(Rng& rng) const override {
    Genome g(2 * M_);
    for (int i = 0; i < M_; ++i) {
      g[2 * i] = static_cast<int>(rng.uniform_int(2, max_delta_));
      g[2 * i + 1] = static_cast<int>(rng.uniform_int(1, max_tau(g[2 * i])));
    }
    return g;
  }

  int random_gene(Rng& rng, int index) const override {
    if (index % 2 == 0) return static_cast<int>(rng.uniform_int(2, max_delta_));
    return static_cast<int>(rng.uniform_int(1, max_tau(2)));
  }

  void repair(Genome& g, Rng&) const override {
    for (int i = 0; i < M_; ++i) {
      int& delta = g[2 * i];
      int& tau = g[2 * i + 1];
      delta = std::clamp(delta, 2, max_delta_);
      tau = std::clamp(tau, 1, max_tau(delta));
    }
  }

  PilotMask to_mask(const Genome& g) const override {
    StructuredDistribution d;
    d.pilots_per_channel = kappa_;
    d.offset.reserve(M_);
    d.spacing.reserve(M_);
    for (int i = 0; i < M_; ++i) {
      d.offset.push_back(g[2 * i]);
      d.spacing.push_back(g[2 * i + 1]);
    }
    return structured_to_mask(d, M_, N_);
  }

 private:
  int max_tau(int delta) const {
    return kappa_ >= 3 ? (N_ - delta) / (kappa_ - 2) : 1;  // tau inert at kappa = 2
  }

  int kappa_, M_, N_;
  int max_delta_;
};

int tournament_pick(const std::vector<double>& fitness, const GaConfig& ga, Rng& rng) {
  const int P = static_cast<int>(fitness.size());
  int winner = static_cast<int>(rng.uniform_int(0, P - 1));
  for (int t = 1; t < ga.tournament_size; ++t) {
    const int c = static_cast<int>(rng.uniform_int(0, P - 1));
    if (fitness[c] < fitness[winner]) winner = c;
  }
  return winner;
}

struct FitnessCache {
  std::unordered_map<std::string, double> values;
  long long evaluations = 0;
};

// Decodes and scores a population; cache misses are evaluated concurrently
// but committed in first-seen order, so results do not depend on the worker
// count.
void evaluate_population(const std::vector<Genome>& pop, const GaProblem& prob,
                         const SystemConfig& cfg, FitnessCache& cache,
                         std::vector<double>& fitness, std::vector<PilotMask>* masks_out) {
  const int P = static_cast<int>(pop.size());
  fitness.assign(P, 0.0);
  std::vector<PilotMask> masks(P);
  std::vector<std::string> keys(P);
  for (int i = 0; i < P; ++i) {
    masks[i] = prob.to_mask(pop[i]);
    keys[i] = masks[i].canonical_key();
  }
  std::vector<int> miss;  // representative index per unseen key, first-seen order
  {
    std::unordered_map<std::string, int> seen;
    for (int i = 0; i < P; ++i) {
      if (cache.values.count(keys[i]) || seen.count(keys[i])) continue;
      seen.emplace(keys[i], i);
      miss.push_back(i);
    }
  }
  std::vector<double> vals(miss.size());
  parallel_for(static_cast<int>(miss.size()), [&](int j) {
    vals[j] = smoother_objective(masks[miss[j]], cfg);
  });
  for (size_t j = 0; j < miss.size(); ++j) cache.values.emplace(keys[miss[j]], vals[j]);
  cache.evaluations += static_cast<long long>(miss.size());
  for (int i = 0; i < P; ++i) fitness[i] = cache.values.at(keys[i]);
  if (masks_out) *masks_out = std::move(masks);
}

OptimizationResult run_ga(const GaProblem& prob, const SystemConfig& cfg, const GaConfig& ga) {
  ga.validate();
  Rng rng(ga.rng_seed);
  const int P = ga.population_size;

  std::vector<Genome> pop;
  pop.reserve(P);
  for (int i = 0; i < P; ++i) pop.push_back(prob.random_genome(rng));

  FitnessCache cache;
  std::vector<double> fitness;
  std::vector<PilotMask> masks;

  OptimizationResult res;
  res.seed = ga.rng_seed;
  Genome best_genome;
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int gen = 0; gen < ga.generations; ++gen) {
    if (gen > 0) pop = ga_step(pop, fitness, prob, ga, rng);
    evaluate_population(pop, prob, cfg, cache, fitness, &masks);
    const auto it = std::min_element(fitness.begin(), fitness.end());
    const int arg = static_cast<int>(it - fitness.begin());
    if (*it < best) {
      best = *it;
      best_genome = pop[arg];
      res.best_mask = masks[arg];
      stall = 0;
    } else {
      ++stall;
    }
    res.history.push_back(best);
    if (stall >= ga.stall_generations) break;
  }
  res.evaluations = cache.evaluations;
  res.best_genome = std::move(best_genome);
  // Invariant: the reported objective is a fresh evaluation of the winner.
  res.best_objective = smoother_objective(res.best_mask, cfg);
  return res;
}

}  // namespace

std::vector<Genome> ga_step(const std::vector<Genome>& population,
                            const std::vector<double>& fitness, const GaProblem& problem,
                            const GaConfig& ga, Rng& rng) {
  if (population.empty()) throw std::invalid_argument("ga_step: empty population");
  const int P = static_cast<int>(population.size());
  const int G = problem.genome_length();
  const double mu = ga.mutation_rate ? *ga.mutation_rate : 1.0 / G;

  std::vector<int> order(P);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitness[a] < fitness[b]; });

  std::vector<Genome> next;
  next.reserve(P);
  for (int e = 0; e < std::min(ga.elitism_count, P); ++e) next.push_back(population[order[e]]);

  Genome child_a, child_b;
  while (static_cast<int>(next.size()) < P) {
    child_a = population[tournament_pick(fitness, ga, rng)];
    child_b = population[tournament_pick(fitness, ga, rng)];
    if (rng.uniform() < ga.crossover_rate) {
      for (int gidx = 0; gidx < G; ++gidx)
        if (rng.uniform() < 0.5) std::swap(child_a[gidx], child_b[gidx]);
    }
    for (Genome* c : {&child_a, &child_b}) {
      for (int gidx = 0; gidx < G; ++gidx)
        if (rng.uniform() < mu) (*c)[gidx] = problem.random_gene(rng, gidx);
      problem.repair(*c, rng);
    }
    next.push_back(child_a);
    if (static_cast<int>(next.size()) < P) next.push_back(child_b);
  }
  return next;
}

OptimizationResult optimize_unstructured(const SystemConfig& cfg, int num_pilots,
                                         const GaConfig& ga) {
  cfg.validate();
  const int slots = cfg.num_channels * cfg.block_length;
  if (num_pilots < 1 || num_pilots > slots)
    throw std::invalid_argument("optimize_unstructured: need 1 <= L <= M*N");

  OptimizationResult res;
  if (num_pilots == slots) {
    // Unique feasible point.
    PilotMask all(cfg.num_channels, cfg.block_length);
    for (int k = 0; k < cfg.block_length; ++k)
      for (int i = 0; i < cfg.num_channels; ++i) all.set(i, k);
    res.best_mask = all;
    res.best_genome.resize(slots);
    std::iota(res.best_genome.begin(), res.best_genome.end(), 1);
    res.best_objective = smoother_objective(all, cfg);
    res.history = {res.best_objective};
    res.evaluations = 1;
    res.seed = ga.rng_seed;
  } else {
    UnstructuredProblem prob(num_pilots, cfg.num_channels, cfg.block_length);
    res = run_ga(prob, cfg, ga);
  }
  UnstructuredDistribution d;
  d.positions = res.best_mask.positions();
  res.unstructured = std::move(d);
  return res;
}

OptimizationResult optimize_structured(const SystemConfig& cfg, int pilots_per_channel,
                                       const GaConfig& ga) {
  cfg.validate();
  const int N = cfg.block_length;
  const int kappa = pilots_per_channel;
  if (kappa < 1 || kappa > N)
    throw std::invalid_argument(
        "optimize_structured: infeasible kappa (needs delta >= 2, tau >= 1, "
        "delta + tau*(kappa-2) <= N)");

  OptimizationResult res;
  StructuredDistribution d;
  d.pilots_per_channel = kappa;
  if (kappa == 1) {
    // Slot-1 pilots only; delta/tau are inert, reported at their lower bounds.
    d.offset.assign(cfg.num_channels, 2.0);
    d.spacing.assign(cfg.num_channels, 1.0);
    res.best_mask = structured_to_mask(d, cfg.num_channels, N);
    res.best_genome.assign(static_cast<size_t>(2) * cfg.num_channels, 1);
    for (int i = 0; i < cfg.num_channels; ++i) res.best_genome[2 * i] = 2;
    res.best_objective = smoother_objective(res.best_mask, cfg);
    res.history = {res.best_objective};
    res.evaluations = 1;
    res.seed = ga.rng_seed;
  } else {
    StructuredProblem prob(kappa, cfg.num_channels, N);
    res = run_ga(prob, cfg, ga);
    const Genome& g = res.best_genome;
    d.offset.assign(cfg.num_channels, 0.0);
    d.spacing.assign(cfg.num_channels, 0.0);
    for (int i = 0; i < cfg.num_channels; ++i) {
      d.offset[i] = g[2 * i];
      d.spacing[i] = g[2 * i + 1];
    }
  }
  res.structured = std::move(d);
  return res;
}

std::string optimization_result_json(const OptimizationResult& res, const SystemConfig& cfg,
                                     const GaConfig& ga) {
  nlohmann::json j;
  j["config"] = {{"num_channels", cfg.num_channels},
                 {"block_length", cfg.block_length},
                 {"symbol_energy", cfg.symbol_energy},
                 {"noise_psd", cfg.noise_psd},
                 {"snr_db", cfg.snr_db},
                 {"total_linewidth_hz", cfg.total_linewidth_hz},
                 {"symbol_rate_baud", cfg.symbol_rate_baud},
                 {"correlation", cfg.correlation},
                 {"pilot_point", {cfg.pilot_point.real(), cfg.pilot_point.imag()}}};
  int genome_len = 0;
  if (res.unstructured) genome_len = static_cast<int>(res.unstructured->positions.size());
  if (res.structured) genome_len = 2 * cfg.num_channels;
  j["ga_config"] = {{"population_size", ga.population_size},
                    {"generations", ga.generations},
                    {"tournament_size", ga.tournament_size},
                    {"crossover_rate", ga.crossover_rate},
                    {"mutation_rate", ga.mutation_rate ? *ga.mutation_rate
                                                       : (genome_len ? 1.0 / genome_len : 0.0)},
                    {"elitism_count", ga.elitism_count},
                    {"stall_generations", ga.stall_generations}};
  if (res.unstructured) {
    j["best_distribution"] = {{"type", "unstructured"},
                              {"positions", res.unstructured->positions}};
  } else if (res.structured) {
    j["best_distribution"] = {{"type", "structured"},
                              {"kappa", res.structured->pilots_per_channel},
                              {"delta", res.structured->offset},
                              {"tau", res.structured->spacing}};
  }
  j["best_J"] = res.best_objective;
  j["history"] = res.history;
  j["evaluations"] = res.evaluations;
  j["seed"] = res.seed;
  return j.dump(2);
}

}  // namespace pilotopt
