#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "geofuse/dataset.hpp"
#include "geofuse/linear.hpp"
#include "geofuse/potential.hpp"

namespace geofuse {

struct TuningOptions {
  std::size_t inner_folds = 3;
  std::uint64_t seed = 0;
  TrainerConfig trainers;
};

struct GammaScore {
  double gamma;
  double macro_f1;
};

/// Inner-CV macro-F1 of the OvO ensemble for each (rule, gamma). Members are
/// trained once per inner fold and shared by all grid points and rules.
std::map<CombinerKind, std::vector<GammaScore>> score_gamma_grid(
    const Dataset& train, std::span<const BaseKind> kinds, std::span<const CombinerKind> rules,
    std::span<const double> grid, const TuningOptions& options = {});

/// Highest macro-F1 wins; exact ties go to the smallest gamma.
double select_gamma(std::span<const GammaScore> scores);

std::map<CombinerKind, PotentialParams> tune_gamma_all(const Dataset& train,
                                                        std::span<const BaseKind> kinds,
                                                        std::span<const CombinerKind> rules,
                                                        std::span<const double> grid,
                                                        const TuningOptions& options = {});

PotentialParams tune_gamma(const Dataset& train, std::span<const BaseKind> kinds, CombinerKind rule,
                           std::span<const double> grid, const TuningOptions& options = {});

}  // namespace geofuse
