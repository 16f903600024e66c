#include "mecsim/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mecsim/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace mecsim {

Mlp::Mlp(std::vector<int> layer_dims, OutputActivation out, Rng& rng)
    : dims(std::move(layer_dims)), out_act(out) {
  if (dims.size() < 2) throw ContractError("Mlp: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw ContractError("Mlp: layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out_n = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> wl(static_cast<std::size_t>(in) * out_n);
    for (double& x : wl) x = rng.uniform(-bound, bound);
    w.push_back(std::move(wl));
    // Biases share the weight range; an exact zero would park rectifier units
    // on their kink whenever the previous layer goes fully dark.
    std::vector<double> bl(out_n);
    for (double& x : bl) x = rng.uniform(-bound, bound);
    b.push_back(std::move(bl));
  }
}

bool Mlp::same_architecture(const Mlp& other) const {
  return dims == other.dims && out_act == other.out_act;
}

std::vector<double> forward(const Mlp& net, const std::vector<double>& x, ForwardCache* cache) {
  if (static_cast<int>(x.size()) != net.input_dim())
    throw ContractError("forward: input size mismatch");
  std::vector<double> cur = x;
  if (cache) {
    cache->act.clear();
    cache->pre.clear();
    cache->act.push_back(cur);
  }
  const std::size_t L = net.layer_count();
  for (std::size_t l = 0; l < L; ++l) {
    const int in = net.dims[l], out = net.dims[l + 1];
    std::vector<double> z(out);
    const std::vector<double>& wl = net.w[l];
    for (int i = 0; i < out; ++i) {
      double acc = net.b[l][i];
      const double* row = wl.data() + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) acc += row[j] * cur[j];
      z[i] = acc;
    }
    if (cache) cache->pre.push_back(z);
    const bool last = (l + 1 == L);
    if (!last) {
      for (double& v : z) v = std::max(0.0, v);
    } else if (net.out_act == OutputActivation::sigmoid) {
      for (double& v : z) v = 1.0 / (1.0 + std::exp(-v));
    }
    cur = std::move(z);
    if (cache) cache->act.push_back(cur);
  }
  return cur;
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.w.emplace_back(net.w[l].size(), 0.0);
    g.b.emplace_back(net.b[l].size(), 0.0);
  }
  return g;
}

void backward_acc(const Mlp& net, const ForwardCache& cache,
                  const std::vector<double>& grad_out, Gradients* acc,
                  std::vector<double>* input_grad) {
  const std::size_t L = net.layer_count();
  if (cache.act.size() != L + 1 || cache.pre.size() != L)
    throw ContractError("backward: cache does not match the network");
  if (static_cast<int>(grad_out.size()) != net.output_dim())
    throw ContractError("backward: grad_out size mismatch");
  if (acc && (acc->w.size() != L || acc->b.size() != L))
    throw ContractError("backward: gradient accumulator shape mismatch");

  std::vector<double> delta = grad_out;
  if (net.out_act == OutputActivation::sigmoid) {
    const std::vector<double>& y = cache.act.back();
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= y[i] * (1.0 - y[i]);
  }
  for (std::size_t li = L; li-- > 0;) {
    const int in = net.dims[li], out = net.dims[li + 1];
    const std::vector<double>& a_in = cache.act[li];
    if (acc) {
      std::vector<double>& gw = acc->w[li];
      std::vector<double>& gb = acc->b[li];
      for (int i = 0; i < out; ++i) {
        gb[i] += delta[i];
        double* row = gw.data() + static_cast<std::size_t>(i) * in;
        for (int j = 0; j < in; ++j) row[j] += delta[i] * a_in[j];
      }
    }
    std::vector<double> prev(in, 0.0);
    const std::vector<double>& wl = net.w[li];
    for (int i = 0; i < out; ++i) {
      const double* row = wl.data() + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) prev[j] += row[j] * delta[i];
    }
    if (li > 0) {
      const std::vector<double>& pre = cache.pre[li - 1];
      for (int j = 0; j < in; ++j) {
        if (pre[j] <= 0.0) prev[j] = 0.0;
      }
    }
    delta = std::move(prev);
  }
  if (input_grad) *input_grad = std::move(delta);
}

Gradients backward(const Mlp& net, const ForwardCache& cache,
                   const std::vector<double>& grad_out) {
  Gradients g = Gradients::zeros_like(net);
  backward_acc(net, cache, grad_out, &g, nullptr);
  return g;
}

AdamState::AdamState(const Mlp& net, double learning_rate) : lr(learning_rate) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    mw.emplace_back(net.w[l].size(), 0.0);
    vw.emplace_back(net.w[l].size(), 0.0);
    mb.emplace_back(net.b[l].size(), 0.0);
    vb.emplace_back(net.b[l].size(), 0.0);
  }
}

namespace {

void adam_update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, const AdamState& st, double bc1, double bc2) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * g[i];
    v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * g[i] * g[i];
    const double mh = m[i] / bc1;
    const double vh = v[i] / bc2;
    p[i] -= st.lr * mh / (std::sqrt(vh) + st.eps);
  }
}

}  // namespace

void adam_step(AdamState& state, Mlp& net, const Gradients& grads) {
  if (state.mw.size() != net.layer_count() || grads.w.size() != net.layer_count())
    throw ContractError("adam_step: shape mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    adam_update(net.w[l], grads.w[l], state.mw[l], state.vw[l], state, bc1, bc2);
    adam_update(net.b[l], grads.b[l], state.mb[l], state.vb[l], state, bc1, bc2);
  }
}

void clip_gradients(Gradients& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ContractError("clip_gradients: max_norm must be positive");
  double sq = 0.0;
  for (const auto& layer : grads.w) {
    for (double v : layer) sq += v * v;
  }
  for (const auto& layer : grads.b) {
    for (double v : layer) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& layer : grads.w) {
    for (double& v : layer) v *= scale;
  }
  for (auto& layer : grads.b) {
    for (double& v : layer) v *= scale;
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_architecture(online))
    throw ContractError("soft_update: architecture mismatch");
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    for (std::size_t i = 0; i < target.w[l].size(); ++i)
      target.w[l][i] = tau * online.w[l][i] + (1.0 - tau) * target.w[l][i];
    for (std::size_t i = 0; i < target.b[l].size(); ++i)
      target.b[l][i] = tau * online.b[l][i] + (1.0 - tau) * target.b[l][i];
  }
}

void hard_update(Mlp& target, const Mlp& online) {
  if (!target.same_architecture(online))
    throw ContractError("hard_update: architecture mismatch");
  target.w = online.w;
  target.b = online.b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : cap_(capacity) {
  if (capacity == 0) throw ContractError("ReplayBuffer: capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < cap_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
    next_ = (next_ + 1) % cap_;
  }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (n > data_.size())
    throw ContractError("ReplayBuffer::sample: fewer stored transitions than requested");
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(data_[rng.uniform_int(static_cast<int>(data_.size()))]);
  }
  return out;
}

void save_checkpoint(const Mlp& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out << "mlp";
  for (int d : net.dims) out << ' ' << d;
  out << '\n';
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    out.write(reinterpret_cast<const char*>(net.w[l].data()),
              static_cast<std::streamsize>(net.w[l].size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(net.b[l].data()),
              static_cast<std::streamsize>(net.b[l].size() * sizeof(double)));
  }
  if (!out) throw ConfigError("failed while writing checkpoint: " + path);
}

void load_checkpoint(Mlp& net, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("checkpoint missing header: " + path);
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "mlp") throw ConfigError("not a checkpoint file: " + path);
  std::vector<int> dims;
  int d;
  while (hs >> d) dims.push_back(d);
  if (dims != net.dims)
    throw ConfigError("checkpoint layer dims do not match the network: " + path);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    in.read(reinterpret_cast<char*>(net.w[l].data()),
            static_cast<std::streamsize>(net.w[l].size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(net.b[l].data()),
            static_cast<std::streamsize>(net.b[l].size() * sizeof(double)));
  }
  if (!in) throw ConfigError("checkpoint truncated: " + path);
}

}  // namespace mecsim
