#pragma once

// Fully connected network with an evidential output head, layer-wise
// reverse-mode backpropagation and an Adam trainer.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "evreg/dataset.hpp"
#include "evreg/losses.hpp"

namespace evreg {

enum class Activation { ReLU };

/// Output head. ν = (nu_hi + nu_lo)/2 + (nu_hi - nu_lo)/2 · tanh(p_last);
/// the defaults give ν = 8 + 5·tanh(p) for n = 2.
struct HeadConfig {
  std::size_t n = 2;
  double r = 1.0;
  double nu_lo = 3.0;
  double nu_hi = 13.0;

  /// n(n+3)/2 + 1
  std::size_t output_dim() const { return n * (n + 3) / 2 + 1; }
  void validate() const;
};

struct NetworkConfig {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden{32, 32};
  Activation activation = Activation::ReLU;
  HeadConfig head;

  std::size_t output_dim() const { return head.output_dim(); }
};

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out × in, row-major
  std::vector<double> bias;
};

struct ModelState {
  NetworkConfig config;
  std::vector<Layer> layers;
  std::uint64_t seed = 0;

  std::size_t parameter_count() const;
  /// Per layer: weights row-major, then bias.
  std::vector<double> flat() const;
  void set_flat(std::span<const double> params);
};

struct TrainConfig {
  std::size_t epochs = 2000;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> gradient;
};

struct TrainResult {
  ModelState model;
  std::vector<double> history;
};

/// Fan-in scaled normal weights (std √(2/fan_in)), zero biases.
ModelState init(const NetworkConfig& config, std::uint64_t seed);

/// Raw head outputs p of length n(n+3)/2 + 1.
Vector forward(const ModelState& model, std::span<const double> input);

CoupledHeadParams head_transform(std::span<const double> p, const HeadConfig& head);

/// Mean coupled NLL over the batch and its gradient w.r.t. `flat()`.
LossGrad loss_and_grad(const ModelState& model, std::span<const Record> batch);

/// Throws NonFiniteLoss carrying the offending epoch (0-based).
TrainResult train(ModelState model, const Dataset& data, const TrainConfig& cfg);

UncertaintyReport predict(const ModelState& model, std::span<const double> input);

inline constexpr const char* kModelFormat = "evreg.model/1";

nlohmann::json to_json(const ModelState& model);
ModelState model_from_json(const nlohmann::json& j);
void save_model(const ModelState& model, const std::filesystem::path& path);
ModelState load_model(const std::filesystem::path& path);

}  // namespace evreg
