#pragma once

#include "qstab/certify.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qstab {

struct ScanAxis {
  Index coord = 0;
  double min = 0.0;
  double max = 0.0;
  int steps = 2;

  double value(int k) const { return min + (max - min) * k / (steps - 1); }
};

// theta[coord] = scale * theta[source]^power, evaluated after axes and fixed values.
struct DerivedCoord {
  Index coord = 0;
  Index source = 0;
  double power = 1.0;
  double scale = 1.0;
};

struct ScanConfig {
  std::vector<ScanAxis> axes;  // at most two; the first axis varies slowest
  std::vector<std::pair<Index, double>> fixed;
  std::vector<DerivedCoord> derived;
  // Points on the variety whose corollary balls feed the in_ball column.
  std::vector<Vector> base_points;
  // Adds a column: the oracle's nearest point lies within its own corollary radius.
  bool guaranteed_column = false;
  bool use_oracle = true;
  bool reproducible = false;
  int workers = 1;
  CertifySettings settings;

  // Throws InvalidInput when the grid does not cover theta of length d.
  void validate(Index d) const;
  Index rows() const;
  Vector theta_at(Index row, Index d) const;
};

struct ScanRow {
  Vector theta;
  GapCertificate cert;
  std::optional<bool> in_ball;
  std::optional<bool> guaranteed;
};

// Oracle value, when the family has one and it is asked for.
CertifySettings with_oracle(const ParametricProblem& fam, const Vector& theta, CertifySettings s, bool use_oracle);

std::vector<ScanRow> run_scan(const ParametricProblem& fam, const ScanConfig& cfg);
void write_scan_csv(std::ostream& os, const ParametricProblem& fam, const ScanConfig& cfg,
                    const std::vector<ScanRow>& rows);

struct SweepConfig {
  std::vector<double> sigmas;
  int trials = 1;
  std::uint64_t seed = 0;
  bool use_oracle = true;
  bool reproducible = false;
  int workers = 1;
  CertifySettings settings;
};

struct SweepRow {
  double sigma = 0.0;
  int trials = 0;
  double tight_fraction = 0.0;
  double mean_gap_rel = 0.0;         // over trials with a finite gap
  double mean_recovery_error = 0.0;  // over trials with a recovered x
};

// theta = theta_bar + sigma * z with the same (theta_bar, z) for every sigma.
std::vector<SweepRow> run_noise_sweep(const ParametricProblem& fam, const SweepConfig& cfg);
void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows);

}  // namespace qstab
