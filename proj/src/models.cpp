#include "ouq/models.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "ouq/errors.hpp"
#include "ouq/subprocess.hpp"

namespace ouq {

double Model::evaluate(std::span<const double> point) const {
  double out = 0.0;
  evaluate_batch(point, {&out, 1});
  return out;
}

double hydraulic_height(double flow, double strickler, double downstream,
                        double upstream) {
  if (!(flow > 0.0)) throw DomainError("hydraulic model: flow rate must be positive");
  if (!(strickler > 0.0))
    throw DomainError("hydraulic model: friction coefficient must be positive");
  if (!(upstream > downstream))
    throw DomainError("hydraulic model: upstream depth must exceed downstream depth");
  const double slope = (upstream - downstream) / 5000.0;
  return std::pow(flow / (300.0 * strickler * std::sqrt(slope)), 0.6);
}

namespace {

class LinearModel final : public Model {
 public:
  explicit LinearModel(int dimension) : dim_(dimension) {
    if (dimension < 1) throw ConfigError("linear model needs dimension >= 1");
  }
  int dimension() const override { return dim_; }
  bool reentrant() const override { return true; }
  void evaluate_batch(std::span<const double> points,
                      std::span<double> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = points[i * dim_];
  }

 private:
  int dim_;
};

class HydraulicModel final : public Model {
 public:
  int dimension() const override { return 4; }
  std::string output_units() const override { return "m"; }
  bool reentrant() const override { return true; }
  void evaluate_batch(std::span<const double> points,
                      std::span<double> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double* p = points.data() + i * 4;
      out[i] = hydraulic_height(p[0], p[1], p[2], p[3]);
    }
  }
};

class ExternalModel final : public Model {
 public:
  explicit ExternalModel(ExternalModelConfig config)
      : config_(std::move(config)),
        process_(config_.command, config_.working_directory) {
    if (config_.dimension < 1) throw ConfigError("external model needs dimension >= 1");
    if (config_.batch_limit < 1) throw ConfigError("external model batch size must be >= 1");
  }

  int dimension() const override { return config_.dimension; }
  std::string output_units() const override { return config_.output_units; }
  bool reentrant() const override { return false; }

  void evaluate_batch(std::span<const double> points,
                      std::span<double> out) const override {
    if (out.empty()) throw std::invalid_argument("external model: empty batch");
    std::lock_guard<std::mutex> lock(mutex_);

    const int d = config_.dimension;
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto it = cache_.find(key(points.subspan(i * d, d)));
      if (it != cache_.end())
        out[i] = it->second;
      else
        pending.push_back(i);
    }

    for (std::size_t start = 0; start < pending.size();
         start += static_cast<std::size_t>(config_.batch_limit)) {
      const std::size_t stop =
          std::min(pending.size(), start + static_cast<std::size_t>(config_.batch_limit));
      send_batch(points, {pending.data() + start, stop - start}, out);
    }
  }

 private:
  static std::string key(std::span<const double> point) {
    std::string k(point.size() * sizeof(double), '\0');
    std::memcpy(k.data(), point.data(), k.size());
    return k;
  }

  void send_batch(std::span<const double> points,
                  std::span<const std::size_t> rows, std::span<double> out) const {
    const int d = config_.dimension;
    nlohmann::json request;
    auto& pts = request["points"] = nlohmann::json::array();
    for (std::size_t row : rows) {
      nlohmann::json p = nlohmann::json::array();
      for (int c = 0; c < d; ++c) p.push_back(points[row * d + c]);
      pts.push_back(std::move(p));
    }
    process_.write_line(request.dump());

    const std::string line = process_.read_line(config_.timeout_seconds);
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("external model answered with malformed data");
    }
    if (!response.contains("values") || !response["values"].is_array())
      throw ProtocolError("external model response lacks a \"values\" array");
    const auto& values = response["values"];
    if (values.size() != rows.size())
      throw ProtocolError("external model returned " + std::to_string(values.size()) +
                          " values for " + std::to_string(rows.size()) + " points");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!values[i].is_number())
        throw ProtocolError("external model returned a non-numeric value");
      const double v = values[i].get<double>();
      out[rows[i]] = v;
      cache_.emplace(key(points.subspan(rows[i] * d, d)), v);
    }
  }

  ExternalModelConfig config_;
  mutable ChildProcess process_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, double> cache_;
};

}  // namespace

std::shared_ptr<Model> make_builtin_model(const std::string& name, int dimension) {
  if (name == "linear") return std::make_shared<LinearModel>(dimension);
  if (name == "hydraulic") {
    if (dimension != 4 && dimension != 0)
      throw ConfigError("hydraulic model has dimension 4");
    return std::make_shared<HydraulicModel>();
  }
  throw ConfigError("unknown builtin model '" + name + "'");
}

std::vector<std::string> builtin_model_names() { return {"linear", "hydraulic"}; }

std::shared_ptr<Model> make_external_model(const ExternalModelConfig& config) {
  return std::make_shared<ExternalModel>(config);
}

}  // namespace ouq
