#pragma once
/// Sampled checks of the smoothness hypotheses: inverse moments, small-ball
/// fits, ellipticity scans and the per-scenario hypothesis checklist.

#include <span>
#include <string>
#include <vector>

#include "lentparticle/scenario.hpp"
#include "lentparticle/stats.hpp"

namespace lp {

struct InverseMoment {
  Estimate estimate;
  double half_sample = 0.0;  // estimate on the first half of the samples
  double ratio = 0.0;        // full / half
  bool stable = false;
  std::size_t zeros = 0;
  std::string verdict;  // "stable", "unstable" or "infinite moment"
};

/// Mean of sample^-p; zeros are counted separately and force "infinite moment".
InverseMoment inverse_moment(std::span<const double> samples, double p);

struct SmallBallFit {
  double beta = 0.0;
  double r2 = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::string regime;  // "tauberian" or "non-tauberian"
  std::vector<double> eps, log_p, fitted;
  std::vector<std::size_t> counts;
  bool monotone = true;
  std::vector<std::string> warnings;
};

inline constexpr double kSmallBallBetaMin = 0.1;
inline constexpr double kSmallBallBetaMax = 4.0;

/// Fits log P(V <= eps) ~ r2 eps^-beta + k beta log eps + c0 with k = prefactor,
/// beta by golden-section search on the regression R^2. An empty grid uses 30
/// log-spaced points between the 1e-3 and 0.1 sample quantiles.
/// prefactor = 1/2 matches the eps^(beta/2) factor of stable subordinators.
SmallBallFit small_ball_fit(std::span<const double> samples, std::vector<double> eps_grid = {}, double prefactor = 0.0);

struct EllipticityReport {
  double min_ratio = 0.0;
  double margin = 0.0;  // min_ratio - 1
  bool pass = false;
  std::size_t probes = 0;
  HypothesisProbe argmin;
};

/// min over probes of lambda_min(gamma[c]) / (psi(u) / (1 + |x|^delta)); pass iff >= 1 - 1e-9.
/// delta = 0 means the plain bound psi(u) I.
EllipticityReport ellipticity_scan(const Scenario& sc, const EllipticityProfile& profile,
                                   std::span<const HypothesisProbe> probes);

/// lambda_min(Gamma - b I) on one path; the lower bound holds when >= -1e-10 (scaled).
double pathwise_lower_bound_margin(const SMat<double>& gamma, double bound);

enum class CheckStatus { Pass, Fail, NotCheckable };
const char* to_string(CheckStatus s);

struct CheckItem {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::Pass;
  bool hard = false;  // a failure makes validation fail
  std::string detail;
};

struct HypothesisReport {
  std::string scenario;
  std::vector<CheckItem> items;
  bool hard_failure() const;
};

HypothesisReport hypothesis_report(const Scenario& sc, int probe_budget, std::uint64_t seed = 1);

}  // namespace lp
