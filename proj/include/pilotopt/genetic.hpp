#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pilotopt/covariance_smoother.hpp"
#include "pilotopt/pilot_mask.hpp"
#include "pilotopt/pilot_patterns.hpp"
#include "pilotopt/rng.hpp"
#include "pilotopt/system_config.hpp"

namespace pilotopt {

struct GaConfig {
  int population_size = 200;
  int generations = 300;
  int tournament_size = 4;
  double crossover_rate = 0.9;
  // Per-gene reset probability; unset means 1/genome_length.
  std::optional<double> mutation_rate;
  int elitism_count = 2;
  std::uint64_t rng_seed = 1;
  int stall_generations = 50;  // stop early after this many without improvement

  void validate() const;  // throws std::invalid_argument
};

using Genome = std::vector<int>;

// Integer-genome problem: supplies feasible random genomes, per-gene reset
// values, the repair operator, and the genome -> mask decoding.
class GaProblem {
 public:
  virtual ~GaProblem() = default;
  virtual int genome_length() const = 0;
  virtual Genome random_genome(Rng& rng) const = 0;
  virtual int random_gene(Rng& rng, int index) const = 0;
  virtual void repair(Genome& g, Rng& rng) const = 0;
  virtual PilotMask to_mask(const Genome& g) const = 0;
};

struct OptimizationResult {
  PilotMask best_mask;
  Genome best_genome;
  double best_objective = 0.0;          // re-verified covariance objective
  std::vector<double> history;          // best-of-generation J
  long long evaluations = 0;            // objective evaluations (cache misses)
  std::uint64_t seed = 0;
  // Exactly one of these is set, matching the optimized family.
  std::optional<UnstructuredDistribution> unstructured;
  std::optional<StructuredDistribution> structured;
};

// One generation: elitism, tournament selection, uniform crossover, per-gene
// uniform-reset mutation, repair, in that order. Lower fitness is better.
std::vector<Genome> ga_step(const std::vector<Genome>& population,
                            const std::vector<double>& fitness, const GaProblem& problem,
                            const GaConfig& ga, Rng& rng);

// L distinct pilot positions anywhere in the M x N grid.
OptimizationResult optimize_unstructured(const SystemConfig& cfg, int num_pilots,
                                         const GaConfig& ga);

// Per-channel (delta_i, tau_i) under delta >= 2, tau >= 1,
// delta + tau*(kappa-2) <= N, with a slot-1 pilot in every channel.
OptimizationResult optimize_structured(const SystemConfig& cfg, int pilots_per_channel,
                                       const GaConfig& ga);

// JSON for persisting a finished optimization (config, ga_config,
// best_distribution, best_J, history, evaluations, seed).
std::string optimization_result_json(const OptimizationResult& res, const SystemConfig& cfg,
                                     const GaConfig& ga);

}  // namespace pilotopt
