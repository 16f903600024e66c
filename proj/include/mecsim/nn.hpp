#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mecsim/rng.hpp"

namespace mecsim {

enum class OutputActivation { identity, sigmoid };

// Fully connected network with rectifier hidden units. Weights are stored
// row-major per layer, w[l][i * in + j] mapping input j to output i.
struct Mlp {
  std::vector<int> dims;
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
  OutputActivation out_act = OutputActivation::identity;

  Mlp() = default;
  // Weights and biases uniform in +-1/sqrt(fan_in).
  Mlp(std::vector<int> layer_dims, OutputActivation out, Rng& rng);

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  std::size_t layer_count() const { return w.size(); }
  bool same_architecture(const Mlp& other) const;
};

// Activations kept by a forward pass for the matching backward pass.
struct ForwardCache {
  std::vector<std::vector<double>> act;  // act[0] is the input
  std::vector<std::vector<double>> pre;  // pre-activations per layer
};

std::vector<double> forward(const Mlp& net, const std::vector<double>& x,
                            ForwardCache* cache = nullptr);

// Parameter gradients of the scalar contraction output . grad_out.
struct Gradients {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
  static Gradients zeros_like(const Mlp& net);
};

// Accumulating form: adds this sample's gradients into *acc (skipped when
// null) and optionally reports the gradient with respect to the input.
void backward_acc(const Mlp& net, const ForwardCache& cache,
                  const std::vector<double>& grad_out, Gradients* acc,
                  std::vector<double>* input_grad);
Gradients backward(const Mlp& net, const ForwardCache& cache,
                   const std::vector<double>& grad_out);

// Adaptive-moment optimizer state, one slot per parameter.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> mw, vw, mb, vb;

  AdamState() = default;
  AdamState(const Mlp& net, double learning_rate);
};

void adam_step(AdamState& state, Mlp& net, const Gradients& grads);

// Rescales the whole gradient set so its global L2 norm is at most max_norm.
void clip_gradients(Gradients& grads, double max_norm);

// target <- tau * online + (1 - tau) * target, per parameter.
void soft_update(Mlp& target, const Mlp& online, double tau);
void hard_update(Mlp& target, const Mlp& online);

struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s2;
};

// Fixed-capacity ring with FIFO eviction and uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return cap_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

 private:
  std::size_t cap_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

// Checkpoint format: one ASCII header line "mlp d0 d1 ... dn", then the raw
// little-endian 64-bit floats of every layer (weights row-major, then biases).
void save_checkpoint(const Mlp& net, const std::string& path);
// Loads into an existing net; the header dims must match the net's.
void load_checkpoint(Mlp& net, const std::string& path);

}  // namespace mecsim
