#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "teleran/sim/rng.hpp"

namespace teleran::nn {

// Raised when training produces non-finite values.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully connected network: ReLU on hidden layers, identity output.
// Parameters live in one flat vector; per layer the weights are stored
// row-major as [out][in], followed by the biases.
class DenseNet {
 public:
  // Intermediate activations of one forward pass; activations[0] is the input.
  struct Tape {
    std::vector<std::vector<double>> activations;
  };

  explicit DenseNet(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  double& weight(std::size_t layer, std::size_t out, std::size_t in);
  double& bias(std::size_t layer, std::size_t out);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init_uniform(sim::RngStream& rng);

  std::vector<double> forward(std::span<const double> x) const;
  // Forward pass that keeps the intermediates for backward(); returns the
  // output stored in the tape.
  std::span<const double> forward(std::span<const double> x, Tape& tape) const;

  // Adds the gradient of <upstream, forward(x)> w.r.t. every parameter into
  // `param_grad` and returns the gradient w.r.t. the input.
  std::vector<double> backward(const Tape& tape, std::span<const double> upstream,
                               std::span<double> param_grad) const;

  // FNV-1a over the parameter bytes.
  std::uint64_t checksum() const;

  bool operator==(const DenseNet& other) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + sizes_[layer + 1] * sizes_[layer]; }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Expected parameter count of an S x h1 x ... x A network.
std::size_t parameter_count_for(const std::vector<std::size_t>& layer_sizes);

enum class OptimizerKind { kAdam, kSgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Fixed-learning-rate optimiser over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerConfig cfg, std::size_t parameter_count);

  const OptimizerConfig& config() const { return cfg_; }
  std::uint64_t step_count() const { return steps_; }

  // One descent step. Throws TrainingDiverged if any gradient is non-finite;
  // parameters are left untouched in that case.
  void apply(std::span<double> params, std::span<const double> grads);

 private:
  OptimizerConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t steps_ = 0;
};

inline void apply_update(DenseNet& net, std::span<const double> grads, Optimizer& opt) {
  opt.apply(net.parameters(), grads);
}

// Binary checkpoint, little-endian:
//   8 bytes  magic "TLRNNET1"
//   u32      format version (1)
//   u32      number of layer sizes L+1
//   u64[L+1] layer sizes
//   f64[P]   parameters in the flat layout described on DenseNet
void write_checkpoint(std::ostream& out, const DenseNet& net);
DenseNet read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const DenseNet& net);
DenseNet load_checkpoint(const std::filesystem::path& path);

}  // namespace teleran::nn
