#include "evreg/net.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "evreg/errors.hpp"
#include "evreg/rng.hpp"

namespace evreg {

void HeadConfig::validate() const {
  const double nd = static_cast<double>(n);
  if (n == 0) throw DomainError("HeadConfig: n must be positive");
  if (!(r > 0.0)) throw DomainError("HeadConfig: r must be positive");
  if (!(nu_lo >= nd + 1.0)) throw DomainError("HeadConfig: nu_lo must be at least n + 1");
  if (!(nu_hi > nu_lo)) throw DomainError("HeadConfig: nu_hi must exceed nu_lo");
}

void TrainConfig::validate() const {
  if (epochs == 0) throw DomainError("TrainConfig: epochs must be positive");
  if (!(learning_rate >= 0.0)) throw DomainError("TrainConfig: learning rate must be non-negative");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw DomainError("TrainConfig: Adam betas must lie in (0, 1)");
  }
  if (!(adam_eps > 0.0)) throw DomainError("TrainConfig: Adam epsilon must be positive");
}

std::size_t ModelState::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& layer : layers) count += layer.weights.size() + layer.bias.size();
  return count;
}

std::vector<double> ModelState::flat() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const Layer& layer : layers) {
    out.insert(out.end(), layer.weights.begin(), layer.weights.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

void ModelState::set_flat(std::span<const double> params) {
  if (params.size() != parameter_count()) throw DimensionMismatch("ModelState::set_flat: wrong parameter count");
  std::size_t k = 0;
  for (Layer& layer : layers) {
    for (double& w : layer.weights) w = params[k++];
    for (double& b : layer.bias) b = params[k++];
  }
}

ModelState init(const NetworkConfig& config, std::uint64_t seed) {
  config.head.validate();
  if (config.input_dim == 0) throw DomainError("NetworkConfig: input_dim must be positive");
  ModelState model;
  model.config = config;
  model.seed = seed;
  RngStream rng(seed);

  std::vector<std::size_t> widths{config.input_dim};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(config.output_dim());
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    Layer layer;
    layer.in = widths[k];
    layer.out = widths[k + 1];
    layer.weights.resize(layer.in * layer.out);
    layer.bias.assign(layer.out, 0.0);
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.in));
    for (double& w : layer.weights) w = scale * rng.normal();
    model.layers.push_back(std::move(layer));
  }
  return model;
}

namespace {

// Activations of every layer for one input; acts[0] is the input.
struct Trace {
  std::vector<Vector> acts;
};

void forward_trace(const ModelState& model, std::span<const double> input, Trace& trace) {
  if (input.size() != model.config.input_dim) {
    throw DimensionMismatch("forward: expected input dimension " + std::to_string(model.config.input_dim) +
                            ", got " + std::to_string(input.size()));
  }
  trace.acts.resize(model.layers.size() + 1);
  trace.acts[0].assign(input.begin(), input.end());
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    const Layer& layer = model.layers[k];
    const Vector& a = trace.acts[k];
    Vector& z = trace.acts[k + 1];
    z.assign(layer.out, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double s = layer.bias[o];
      const double* row = layer.weights.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) s += row[i] * a[i];
      z[o] = s;
    }
    const bool hidden = k + 1 < model.layers.size();
    if (hidden) {
      for (double& v : z) v = std::max(v, 0.0);
    }
  }
}

}  // namespace

Vector forward(const ModelState& model, std::span<const double> input) {
  Trace trace;
  forward_trace(model, input, trace);
  return trace.acts.back();
}

CoupledHeadParams head_transform(std::span<const double> p, const HeadConfig& head) {
  const std::size_t n = head.n;
  if (p.size() != head.output_dim()) throw DimensionMismatch("head_transform: wrong number of raw outputs");
  CoupledHeadParams h;
  h.mu0.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
  h.ell.assign(p.begin() + static_cast<std::ptrdiff_t>(n), p.end() - 1);
  const double mid = 0.5 * (head.nu_hi + head.nu_lo);
  const double half = 0.5 * (head.nu_hi - head.nu_lo);
  double nu = mid + half * std::tanh(p.back());
  // tanh saturates to ±1 in double precision; keep ν inside the open interval.
  nu = std::clamp(nu, std::nextafter(head.nu_lo, head.nu_hi), std::nextafter(head.nu_hi, head.nu_lo));
  h.nu = nu;
  h.r = head.r;
  assert(h.nu > head.nu_lo && h.nu < head.nu_hi);
  return h;
}

LossGrad loss_and_grad(const ModelState& model, std::span<const Record> batch) {
  if (batch.empty()) throw DomainError("loss_and_grad: empty batch");
  const HeadConfig& head = model.config.head;
  const std::size_t n = head.n;
  const double half = 0.5 * (head.nu_hi - head.nu_lo);

  LossGrad out;
  out.gradient.assign(model.parameter_count(), 0.0);

  // Offsets of each layer's block in the flat layout.
  std::vector<std::size_t> offset(model.layers.size());
  std::size_t acc = 0;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    offset[k] = acc;
    acc += model.layers[k].weights.size() + model.layers[k].bias.size();
  }

  Trace trace;
  Vector input(1);
  Vector delta;
  Vector prev_delta;
  for (const Record& rec : batch) {
    input[0] = rec.t;
    forward_trace(model, input, trace);
    const Vector& p = trace.acts.back();
    const CoupledHeadParams h = head_transform(p, head);
    const LossValue lv = coupled_niw_nll(rec.y, h);
    out.loss += lv.value;

    // dL/dp: μ and ℓ pass through unchanged (ℓ diagonal is already in log
    // space), ν goes through the tanh map.
    delta.assign(p.size(), 0.0);
    const std::size_t head_params = n + packed_size(n);
    for (std::size_t k = 0; k < head_params; ++k) delta[k] = lv.gradient[k];
    const double th = std::tanh(p.back());
    delta.back() = lv.gradient[head_params] * half * (1.0 - th * th);

    for (std::size_t k = model.layers.size(); k-- > 0;) {
      const Layer& layer = model.layers[k];
      const Vector& a = trace.acts[k];
      double* gw = out.gradient.data() + offset[k];
      double* gb = gw + layer.weights.size();
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        double* row = gw + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) row[i] += d * a[i];
        gb[o] += d;
      }
      if (k == 0) break;
      // Back through Wᵀ and the ReLU gate of layer k-1's output.
      prev_delta.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = layer.weights.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) prev_delta[i] += row[i] * d;
      }
      for (std::size_t i = 0; i < layer.in; ++i)
        if (!(a[i] > 0.0)) prev_delta[i] = 0.0;
      std::swap(delta, prev_delta);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

TrainResult train(ModelState model, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.records.empty()) throw DomainError("train: empty dataset");
  if (data.n != model.config.head.n) throw DimensionMismatch("train: dataset dimension does not match head");

  const std::size_t count = data.records.size();
  const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size > count) ? count : cfg.batch_size;
  RngStream rng(cfg.seed);

  std::vector<double> params = model.flat();
  std::vector<double> m(params.size(), 0.0);
  std::vector<double> v(params.size(), 0.0);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Record> scratch;

  TrainResult result;
  result.history.reserve(cfg.epochs);
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < count) {
      // Fisher–Yates with the trainer's own stream.
      for (std::size_t i = count - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(order[i], order[j]);
      }
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < count; start += batch) {
      const std::size_t stop = std::min(count, start + batch);
      LossGrad lg;
      if (batch == count) {
        lg = loss_and_grad(model, data.records);
      } else {
        scratch.clear();
        for (std::size_t i = start; i < stop; ++i) scratch.push_back(data.records[order[i]]);
        lg = loss_and_grad(model, scratch);
      }
      if (!std::isfinite(lg.loss)) {
        throw NonFiniteLoss(epoch, "train: non-finite loss at epoch " + std::to_string(epoch));
      }
      epoch_loss += lg.loss * static_cast<double>(stop - start);

      beta1_pow *= cfg.adam_beta1;
      beta2_pow *= cfg.adam_beta2;
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = lg.gradient[k];
        m[k] = cfg.adam_beta1 * m[k] + (1.0 - cfg.adam_beta1) * g;
        v[k] = cfg.adam_beta2 * v[k] + (1.0 - cfg.adam_beta2) * g * g;
        const double m_hat = m[k] / (1.0 - beta1_pow);
        const double v_hat = v[k] / (1.0 - beta2_pow);
        params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
      }
      model.set_flat(params);
    }
    epoch_loss /= static_cast<double>(count);
    if (!std::isfinite(epoch_loss)) {
      throw NonFiniteLoss(epoch, "train: non-finite loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(epoch_loss);
  }
  result.model = std::move(model);
  return result;
}

UncertaintyReport predict(const ModelState& model, std::span<const double> input) {
  return uncertainty_from_head(head_transform(forward(model, input), model.config.head));
}

nlohmann::json to_json(const ModelState& model) {
  using nlohmann::json;
  const NetworkConfig& c = model.config;
  json layers = json::array();
  for (const Layer& layer : model.layers) {
    layers.push_back({{"in", layer.in}, {"out", layer.out}, {"weights", layer.weights}, {"bias", layer.bias}});
  }
  return json{{"format", kModelFormat},
              {"seed", model.seed},
              {"config",
               {{"input_dim", c.input_dim},
                {"hidden", c.hidden},
                {"activation", "relu"},
                {"head", {{"n", c.head.n}, {"r", c.head.r}, {"nu_lo", c.head.nu_lo}, {"nu_hi", c.head.nu_hi}}}}},
              {"layers", layers}};
}

ModelState model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != kModelFormat) {
    throw DomainError("model checkpoint: unsupported format tag");
  }
  ModelState model;
  model.seed = j.at("seed").get<std::uint64_t>();
  const auto& c = j.at("config");
  model.config.input_dim = c.at("input_dim").get<std::size_t>();
  model.config.hidden = c.at("hidden").get<std::vector<std::size_t>>();
  if (c.at("activation").get<std::string>() != "relu") throw DomainError("model checkpoint: unknown activation");
  const auto& h = c.at("head");
  model.config.head = HeadConfig{h.at("n").get<std::size_t>(), h.at("r").get<double>(), h.at("nu_lo").get<double>(),
                                 h.at("nu_hi").get<double>()};
  model.config.head.validate();
  for (const auto& lj : j.at("layers")) {
    Layer layer;
    layer.in = lj.at("in").get<std::size_t>();
    layer.out = lj.at("out").get<std::size_t>();
    layer.weights = lj.at("weights").get<std::vector<double>>();
    layer.bias = lj.at("bias").get<std::vector<double>>();
    if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
      throw DimensionMismatch("model checkpoint: layer shape mismatch");
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

void save_model(const ModelState& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_json(model).dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

ModelState load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return model_from_json(nlohmann::json::parse(in));
}

}  // namespace evreg
