#include "teleran/nn/dense_net.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "teleran/common.hpp"

namespace teleran::nn {

std::size_t parameter_count_for(const std::vector<std::size_t>& layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  return n;
}

DenseNet::DenseNet(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  require(sizes_.size() >= 2, "DenseNet: need at least input and output sizes");
  for (auto s : sizes_) require(s > 0, "DenseNet: layer sizes must be positive");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(offset);
    offset += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(offset, 0.0);
}

double& DenseNet::weight(std::size_t layer, std::size_t out, std::size_t in) {
  require(layer < layer_count() && out < sizes_[layer + 1] && in < sizes_[layer], "DenseNet: weight index");
  return params_[weight_offset(layer) + out * sizes_[layer] + in];
}

double& DenseNet::bias(std::size_t layer, std::size_t out) {
  require(layer < layer_count() && out < sizes_[layer + 1], "DenseNet: bias index");
  return params_[bias_offset(layer) + out];
}

void DenseNet::init_uniform(sim::RngStream& rng) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t end = bias_offset(l) + sizes_[l + 1];
    for (std::size_t k = weight_offset(l); k < end; ++k) params_[k] = rng.uniform(-bound, bound);
  }
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
  Tape tape;
  const auto out = forward(x, tape);
  return {out.begin(), out.end()};
}

std::span<const double> DenseNet::forward(std::span<const double> x, Tape& tape) const {
  require(x.size() == input_size(), "DenseNet::forward: input dimension mismatch");
  tape.activations.resize(sizes_.size());
  tape.activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    const std::vector<double>& a = tape.activations[l];
    std::vector<double>& z = tape.activations[l + 1];
    z.resize(out);
    const bool hidden = l + 1 < layer_count();
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = hidden ? std::max(acc, 0.0) : acc;
    }
  }
  return tape.activations.back();
}

std::vector<double> DenseNet::backward(const Tape& tape, std::span<const double> upstream,
                                       std::span<double> param_grad) const {
  require(tape.activations.size() == sizes_.size(), "DenseNet::backward: tape does not match network");
  require(upstream.size() == output_size(), "DenseNet::backward: upstream dimension mismatch");
  require(param_grad.size() == params_.size(), "DenseNet::backward: gradient buffer size mismatch");
  std::vector<double> delta(upstream.begin(), upstream.end());
  std::vector<double> prev;
  for (std::size_t l = layer_count(); l-- > 0;) {
    const std::size_t in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    double* gw = param_grad.data() + weight_offset(l);
    double* gb = param_grad.data() + bias_offset(l);
    const std::vector<double>& a = tape.activations[l];
    prev.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      const double* row = w + o * in;
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        grow[i] += d * a[i];
        prev[i] += row[i] * d;
      }
    }
    if (l > 0) {
      // ReLU gate; the subgradient at 0 is 0.
      for (std::size_t i = 0; i < in; ++i) {
        if (!(a[i] > 0.0)) prev[i] = 0.0;
      }
    }
    delta.swap(prev);
  }
  return delta;
}

std::uint64_t DenseNet::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : params_) {
    const auto bits = std::bit_cast<std::uint64_t>(p);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Optimizer::Optimizer(OptimizerConfig cfg, std::size_t parameter_count) : cfg_(cfg) {
  require(cfg_.learning_rate > 0.0, "optimizer: learning rate must be positive");
  if (cfg_.kind == OptimizerKind::kAdam) {
    m_.assign(parameter_count, 0.0);
    v_.assign(parameter_count, 0.0);
  }
}

void Optimizer::apply(std::span<double> params, std::span<const double> grads) {
  require(params.size() == grads.size(), "optimizer: gradient shape mismatch");
  for (std::size_t k = 0; k < grads.size(); ++k) {
    if (!std::isfinite(grads[k])) {
      throw TrainingDiverged("non-finite gradient at parameter " + std::to_string(k) + " after " +
                             std::to_string(steps_) + " optimizer steps");
    }
  }
  ++steps_;
  const double lr = cfg_.learning_rate;
  if (cfg_.kind == OptimizerKind::kSgd) {
    for (std::size_t k = 0; k < grads.size(); ++k) params[k] -= lr * grads[k];
    return;
  }
  require(m_.size() == params.size(), "optimizer: state sized for a different network");
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const double g = grads[k];
    m_[k] = b1 * m_[k] + (1.0 - b1) * g;
    v_[k] = b2 * v_[k] + (1.0 - b2) * g * g;
    params[k] -= lr * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + cfg_.epsilon);
  }
}

namespace {

constexpr std::array<char, 8> kMagic{'T', 'L', 'R', 'N', 'N', 'E', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw InputError("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const DenseNet& net) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (auto s : net.layer_sizes()) put_le<std::uint64_t>(out, s);
  for (double p : net.parameters()) put_le<double>(out, p);
}

DenseNet read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw InputError("checkpoint: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) throw InputError("checkpoint: unsupported version " + std::to_string(version));
  const auto count = get_le<std::uint32_t>(in);
  if (count < 2 || count > 64) throw InputError("checkpoint: implausible layer count");
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes) s = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  DenseNet net(sizes);
  for (double& p : net.parameters()) p = get_le<double>(in);
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const DenseNet& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("checkpoint: cannot write " + path.string());
  write_checkpoint(out, net);
  if (!out) throw InputError("checkpoint: write failed for " + path.string());
}

DenseNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace teleran::nn
