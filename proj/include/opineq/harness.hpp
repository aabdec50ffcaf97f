#pragma once

// Random instances, property suites and their reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opineq/random.hpp"
#include "opineq/serialize.hpp"

namespace opineq {

enum class MapKind { RandomKraus, Pinching, Identity };
enum class WeightMode { Uniform, RandomDirichlet };

const char* to_string(MapKind kind);
const char* to_string(WeightMode mode);

/// Recipe for one InequalityInstance. Maps are square (dim_out = dim).
struct InstanceSpec {
  std::uint64_t seed = 1;
  Index dim = 4;
  std::vector<std::size_t> k;  ///< operators per axis; n = k.size()
  std::vector<Interval> boxes;
  MultiFunc f;
  MultiFunc g;
  MapKind maps = MapKind::RandomKraus;
  int n_kraus = 2;
  WeightMode weights = WeightMode::Uniform;
  std::optional<AffineEnvelope> envelope;  ///< fitted when absent
};

inline constexpr Index kMaxSpecDim = 32;
inline constexpr std::size_t kMaxSpecArity = 4;

Json to_json(const InstanceSpec& spec);
/// Field-level InputError messages on malformed input.
InstanceSpec spec_from_json(const Json& j);

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of diag(R) divided out.
ComplexMatrix<double> random_unitary(Index dim, Rng& rng);

/// U diag(lambda) U* with lambda uniform in [m, M]. With `force_endpoints`
/// (and dim >= 2) the first two eigenvalues are exactly m and M.
HermitianOperator random_hermitian_in_box(Index dim, double m, double M, std::uint64_t seed,
                                          bool force_endpoints = false);

/// Materializes and checks an instance. Every 4th operator drawn carries
/// both box endpoints in its spectrum. `envelope_check` receives the
/// validation of the fitted (or supplied) envelope on the 201-point grid.
InequalityInstance build_instance(const InstanceSpec& spec,
                                  EnvelopeCheck* envelope_check = nullptr);

/// Outcome of one randomized trial.
struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string config;
  bool pass = false;
  double margin = 0.0;           ///< raw Loewner margin of the worst report
  double relative_margin = 0.0;  ///< margin / (1 + scale) of the worst report
  std::map<std::string, double> constants;
  std::vector<double> argpoint;  ///< of the worst report
  std::string message;           ///< why the trial failed; empty on success
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t fails = 0;
  double worst_relative_margin = 0.0;
  /// Worst relative margin per report tag and side, e.g. "ratio/positive-g/upper".
  std::map<std::string, double> worst_by_theorem;
  /// Counters (summed) and "max_" entries (maximized) over trials.
  std::map<std::string, double> metrics;
  std::vector<TrialRecord> records;
  std::vector<std::uint64_t> failure_seeds;
  double wall_time_s = 0.0;
};

Json to_json(const SuiteReport& r);
SuiteReport suite_report_from_json(const Json& j);

/// Suite tags accepted by run_suite, in "all" order.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);
std::size_t default_trials(const std::string& suite);

/// Trial `index` of a suite under `base_seed`. Its stream seed is
/// derive_seed(base_seed, index), so a trial replays alone. Exceptions
/// become failed records. The metric map is filled alongside.
TrialRecord run_trial(const std::string& suite, std::uint64_t base_seed, std::size_t index,
                      double tol, std::map<std::string, double>* metrics = nullptr);

/// Worker count from OPINEQ_THREADS; 1 when unset or invalid.
unsigned thread_count_from_env();

/// Runs trials 0..trials-1 on `threads` workers. The report does not depend
/// on the worker count. InputError for an unknown suite.
SuiteReport run_suite(const std::string& suite, std::size_t trials, std::uint64_t base_seed,
                      double tol = 1e-8, unsigned threads = 1);

}  // namespace opineq
