#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mecsim/checks.hpp"
#include "mecsim/errors.hpp"
#include "mecsim/nn.hpp"

using namespace mecsim;

namespace {

Mlp zeroed(std::vector<int> dims, OutputActivation act) {
  Rng rng(0);
  Mlp net(std::move(dims), act, rng);
  for (auto& layer : net.w) std::fill(layer.begin(), layer.end(), 0.0);
  for (auto& layer : net.b) std::fill(layer.begin(), layer.end(), 0.0);
  return net;
}

}  // namespace

TEST_CASE("forward basics") {
  SUBCASE("zero weights leave only the output bias") {
    Mlp net = zeroed({3, 4, 2}, OutputActivation::identity);
    net.b.back() = {1.5, -2.5};
    const std::vector<double> y = forward(net, {0.3, -0.4, 0.9});
    CHECK(y[0] == 1.5);
    CHECK(y[1] == -2.5);
  }
  SUBCASE("identity-constructed single layer passes the input through") {
    Mlp net = zeroed({3, 3}, OutputActivation::identity);
    for (int i = 0; i < 3; ++i) net.w[0][i * 3 + i] = 1.0;
    const std::vector<double> x = {0.2, -1.0, 3.5};
    CHECK(forward(net, x) == x);
  }
  SUBCASE("bounded outputs stay strictly inside (0, 1)") {
    Rng rng(5);
    Mlp net({4, 8, 6}, OutputActivation::sigmoid, rng);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> x(4);
      for (double& v : x) v = rng.gaussian() * 3.0;
      for (double y : forward(net, x)) {
        CHECK(y > 0.0);
        CHECK(y < 1.0);
      }
    }
  }
  SUBCASE("input size mismatch is a contract error") {
    Mlp net = zeroed({3, 2}, OutputActivation::identity);
    CHECK_THROWS_AS(forward(net, {1.0, 2.0}), ContractError);
  }
}

TEST_CASE("backward correctness") {
  SUBCASE("linear net gradients are the outer product") {
    Mlp net = zeroed({3, 2}, OutputActivation::identity);
    const std::vector<double> x = {0.3, -0.7, 1.1};
    const std::vector<double> go = {2.0, -1.0};
    ForwardCache cache;
    forward(net, x, &cache);
    const Gradients g = backward(net, cache, go);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(g.w[0][i * 3 + j] == doctest::Approx(go[i] * x[j]));
      CHECK(g.b[0][i] == doctest::Approx(go[i]));
    }
  }
  SUBCASE("zero upstream gradient zeroes everything") {
    Rng rng(6);
    Mlp net({3, 5, 2}, OutputActivation::sigmoid, rng);
    ForwardCache cache;
    forward(net, {0.1, 0.2, 0.3}, &cache);
    const Gradients g = backward(net, cache, {0.0, 0.0});
    for (const auto& layer : g.w) {
      for (double v : layer) CHECK(v == 0.0);
    }
  }
  SUBCASE("finite differences agree for both output activations") {
    const CheckOutcome r = check_gradients(10, 99);
    INFO(r.detail);
    CHECK(r.pass);
  }
  SUBCASE("input gradient flows through") {
    Rng rng(7);
    Mlp net({2, 6, 1}, OutputActivation::identity, rng);
    ForwardCache cache;
    std::vector<double> x = {0.4, -0.2};
    forward(net, x, &cache);
    std::vector<double> ig;
    backward_acc(net, cache, {1.0}, nullptr, &ig);
    REQUIRE(ig.size() == 2);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      std::vector<double> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (forward(net, xp)[0] - forward(net, xm)[0]) / (2.0 * h);
      CHECK(ig[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("adam") {
  Rng rng(8);
  SUBCASE("zero gradients leave fresh parameters unchanged") {
    Mlp net({2, 3, 1}, OutputActivation::identity, rng);
    const Mlp before = net;
    AdamState st(net, 0.01);
    adam_step(st, net, Gradients::zeros_like(net));
    CHECK(net.w == before.w);
    CHECK(net.b == before.b);
  }
  SUBCASE("first step moves by almost exactly the learning rate against the sign") {
    Mlp net = zeroed({1, 1}, OutputActivation::identity);
    net.w[0][0] = 0.5;
    AdamState st(net, 0.01);
    Gradients g = Gradients::zeros_like(net);
    g.w[0][0] = 3.0;
    adam_step(st, net, g);
    // bias-corrected first step: lr * g / (|g| + eps)
    CHECK(net.w[0][0] == doctest::Approx(0.5 - 0.01 * 3.0 / (3.0 + 1e-8)).epsilon(1e-12));
  }
  SUBCASE("updates are deterministic") {
    Rng ra(9), rb(9);
    Mlp a({3, 8, 2}, OutputActivation::identity, ra);
    Mlp b({3, 8, 2}, OutputActivation::identity, rb);
    AdamState sa(a, 0.01), sb(b, 0.01);
    for (int it = 0; it < 25; ++it) {
      ForwardCache ca, cb;
      forward(a, {0.1, 0.2, 0.3}, &ca);
      forward(b, {0.1, 0.2, 0.3}, &cb);
      adam_step(sa, a, backward(a, ca, {1.0, -1.0}));
      adam_step(sb, b, backward(b, cb, {1.0, -1.0}));
    }
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);
  }
}

TEST_CASE("target updates") {
  Rng rng(10);
  Mlp online({3, 6, 2}, OutputActivation::identity, rng);
  Mlp target({3, 6, 2}, OutputActivation::identity, rng);
  SUBCASE("tau one copies, tau zero freezes, tau half averages") {
    Mlp t1 = target;
    soft_update(t1, online, 1.0);
    CHECK(t1.w == online.w);
    Mlp t0 = target;
    soft_update(t0, online, 0.0);
    CHECK(t0.w == target.w);
    Mlp th = target;
    soft_update(th, online, 0.5);
    for (std::size_t l = 0; l < th.layer_count(); ++l) {
      for (std::size_t i = 0; i < th.w[l].size(); ++i) {
        CHECK(th.w[l][i] == doctest::Approx(0.5 * (online.w[l][i] + target.w[l][i])));
      }
    }
  }
  SUBCASE("hard update is idempotent") {
    Mlp t = target;
    hard_update(t, online);
    const Mlp once = t;
    hard_update(t, online);
    CHECK(t.w == once.w);
    CHECK(t.b == once.b);
  }
  SUBCASE("architecture mismatch is rejected") {
    Rng r2(11);
    Mlp other({3, 7, 2}, OutputActivation::identity, r2);
    CHECK_THROWS_AS(soft_update(other, online, 0.5), ContractError);
    CHECK_THROWS_AS(hard_update(other, online), ContractError);
  }
}

TEST_CASE("replay buffer") {
  SUBCASE("capacity two drops the oldest of three") {
    ReplayBuffer buf(2);
    buf.push({{1.0}, {0.0}, 0.0, {0.0}});
    buf.push({{2.0}, {0.0}, 0.0, {0.0}});
    buf.push({{3.0}, {0.0}, 0.0, {0.0}});
    CHECK(buf.size() == 2);
    bool has1 = false, has2 = false, has3 = false;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      if (buf.at(i).s[0] == 1.0) has1 = true;
      if (buf.at(i).s[0] == 2.0) has2 = true;
      if (buf.at(i).s[0] == 3.0) has3 = true;
    }
    CHECK(!has1);
    CHECK(has2);
    CHECK(has3);
  }
  SUBCASE("sampling is uniform") {
    ReplayBuffer buf(16);
    for (int i = 0; i < 10; ++i) buf.push({{static_cast<double>(i)}, {0.0}, 0.0, {0.0}});
    Rng rng(12);
    std::vector<int> hits(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; i += 10) {
      for (const Transition& t : buf.sample(10, rng)) {
        ++hits[static_cast<int>(t.s[0])];
      }
    }
    for (int h : hits) {
      const double freq = static_cast<double>(h) / draws;
      CHECK(freq > 0.09);
      CHECK(freq < 0.11);
    }
  }
  SUBCASE("sampling is deterministic under a fixed seed") {
    ReplayBuffer buf(8);
    for (int i = 0; i < 8; ++i) buf.push({{static_cast<double>(i)}, {0.0}, 0.0, {0.0}});
    Rng r1(13), r2(13);
    const auto a = buf.sample(5, r1);
    const auto b = buf.sample(5, r2);
    for (int i = 0; i < 5; ++i) CHECK(a[i].s[0] == b[i].s[0]);
  }
  SUBCASE("underfull sampling is an error") {
    ReplayBuffer buf(8);
    buf.push({{1.0}, {0.0}, 0.0, {0.0}});
    Rng rng(14);
    CHECK_THROWS_AS(buf.sample(2, rng), ContractError);
  }
}

TEST_CASE("checkpoints") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "mecsim_test_ckpt.bin").string();
  Rng rng(15);
  Mlp net({4, 6, 3}, OutputActivation::sigmoid, rng);
  save_checkpoint(net, path);

  SUBCASE("round trip restores every parameter") {
    Mlp fresh({4, 6, 3}, OutputActivation::sigmoid, rng);
    load_checkpoint(fresh, path);
    CHECK(fresh.w == net.w);
    CHECK(fresh.b == net.b);
  }
  SUBCASE("dims mismatch is rejected") {
    Mlp other({4, 7, 3}, OutputActivation::sigmoid, rng);
    CHECK_THROWS_AS(load_checkpoint(other, path), ConfigError);
  }
  SUBCASE("missing file is rejected") {
    Mlp other({4, 6, 3}, OutputActivation::sigmoid, rng);
    CHECK_THROWS_AS(load_checkpoint(other, path + ".missing"), ConfigError);
  }
  std::remove(path.c_str());
}
