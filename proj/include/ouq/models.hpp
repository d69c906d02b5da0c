#ifndef OUQ_MODELS_HPP
#define OUQ_MODELS_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ouq {

// Evaluation contract: a pure function of the input point. Implementations
// declaring themselves reentrant may be called concurrently; others are
// driven through one serialized batch channel.
class Model {
 public:
  virtual ~Model() = default;

  virtual int dimension() const = 0;
  virtual std::string output_units() const { return ""; }
  virtual bool reentrant() const = 0;

  // points: row-major, out.size() rows of dimension() columns.
  virtual void evaluate_batch(std::span<const double> points,
                              std::span<double> out) const = 0;

  double evaluate(std::span<const double> point) const;
};

// Water height of the flood model:
//   H = (Q / (300 Ks sqrt((Zm - Zv) / 5000)))^(3/5).
// Requires Q > 0, Ks > 0 and Zm > Zv.
double hydraulic_height(double flow, double strickler, double downstream,
                        double upstream);

// Builtin models: "linear" (first coordinate, any dimension) and
// "hydraulic" (dimension 4, output in meters).
std::shared_ptr<Model> make_builtin_model(const std::string& name, int dimension);
std::vector<std::string> builtin_model_names();

struct ExternalModelConfig {
  std::string command;
  std::string working_directory;
  int dimension = 1;
  int batch_limit = 1024;
  double timeout_seconds = 30.0;
  std::string output_units;
};

// Wraps a child process speaking the line protocol: one request object
// {"points": [[...], ...]} per batch, one response object {"values": [...]}
// of the same length and order. Responses are cached by the exact input
// bytes of each point.
std::shared_ptr<Model> make_external_model(const ExternalModelConfig& config);

}  // namespace ouq

#endif
