#ifndef OUQ_CONFIG_HPP
#define OUQ_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ouq/baseline.hpp"
#include "ouq/envelope.hpp"
#include "ouq/models.hpp"
#include "ouq/objective.hpp"

namespace ouq {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,       // unexpected error
  kExitConfig = 2,        // unreadable / malformed / inconsistent config
  kExitInfeasible = 3,    // moment constraints outside the moment space
  kExitBracketing = 4,    // quantile crossing not found
  kExitModel = 5,         // model evaluation / protocol error
};

struct EnvelopeTask {
  std::vector<double> thresholds;
};

struct QuantileTask {
  double p = 0.95;
  double search_lo = 0.0;
  double search_hi = 1.0;
  double resolution = 0.0;  // <= 0: (hi - lo) / 2^10
};

struct BaselineTask {
  std::vector<DistributionSpec> distributions;
  int sample_size = 100000;
  double p = 0.95;
  int bootstrap_resamples = 500;
  double ci_level = 0.9;
};

// Full task description parsed from one JSON document.
struct ProblemConfig {
  std::vector<InputSpec> inputs;
  ConstraintMode mode = ConstraintMode::Equality;

  std::string builtin_model;                     // exactly one of these
  std::optional<ExternalModelConfig> external_model;

  std::variant<EnvelopeTask, QuantileTask, BaselineTask> task;

  SolverConfig solver;
  int restarts = 3;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string output_prefix;

  std::shared_ptr<const Model> make_model() const;
  int model_dimension() const;
};

ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config(const std::string& json_text);

// Executes the configured task, writing result files under output_dir.
// Returns an ExitCode; diagnostics go to `diag`.
int run_task(const ProblemConfig& config, const std::string& output_dir,
             std::ostream& diag);

// Feasibility report without computation: constraint conversion per input,
// model handshake for external backends.
int validate_config(const ProblemConfig& config, std::ostream& diag);

int exit_code_for_current_exception(std::ostream& diag);

}  // namespace ouq

#endif
