#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "bmc/cost_local.hpp"
#include "bmc/error.hpp"
#include "bmc/learner.hpp"
#include "bmc/oracle.hpp"
#include "bmc/qnetwork.hpp"

namespace bmc {
namespace {

TEST(Swap, ReproducesSwapSequence) {
  const auto a = parse_bmc("YXXYYX", 2, 3);
  const auto b = apply_swap(a, SwapAction{3});
  EXPECT_EQ(render_bmc(b), "YXYXYX");
  EXPECT_EQ(render_bmc(apply_swap(b, SwapAction{1})), "YXYXXY");
}

TEST(Swap, SameDimensionAndRangeErrors) {
  const auto c = parse_bmc("YXXYYX", 2, 3);
  EXPECT_FALSE(swap_allowed(c, SwapAction{2}));
  EXPECT_THROW(apply_swap(c, SwapAction{2}), std::logic_error);
  EXPECT_THROW(apply_swap(c, SwapAction{0}), ValidationError);
  EXPECT_THROW(apply_swap(c, SwapAction{6}), ValidationError);
  EXPECT_EQ(action_mask(c), (std::vector<bool>{true, false, true, false, true}));
  EXPECT_EQ(action_mask(parse_bmc("XXXX", 1, 4)), (std::vector<bool>(3, false)));
}

TEST(Swap, PreservesValidity) {
  std::mt19937_64 rng(1);
  auto c = standard_curve(StandardCurve::kZOrder, Grid{3, 4});
  for (int i = 0; i < 200; ++i) {
    const auto mask = action_mask(c);
    std::vector<int> allowed;
    for (std::size_t a = 0; a < mask.size(); ++a) {
      if (mask[a]) allowed.push_back(static_cast<int>(a) + 1);
    }
    c = apply_swap(c, SwapAction{allowed[rng() % allowed.size()]});
    const auto slots = c.slots_lsb_first();
    for (int d = 0; d < 3; ++d) EXPECT_EQ(std::count(slots.begin(), slots.end(), d), 4);
  }
}

TEST(State, OneHotEncoding) {
  const auto enc = encode_state(parse_bmc("XYZ", 3, 1));
  EXPECT_EQ(enc, (std::vector<double>{0, 0, 1, 0, 1, 0, 1, 0, 0}));
  const auto c = parse_bmc("YXXYYX", 2, 3);
  EXPECT_EQ(decode_state(encode_state(c), c.grid()), c);
  std::vector<double> bad(enc);
  bad[0] = 1;
  EXPECT_THROW(decode_state(bad, Grid{3, 1}), ValidationError);
}

TEST(Reward, NormalisedCostReduction) {
  EXPECT_NEAR(reward(175, 90, 175), 85.0 / 175.0, 1e-12);
  EXPECT_NEAR(reward(90, 48, 175), 42.0 / 175.0, 1e-12);
  EXPECT_LT(reward(90, 120, 175), 0.0);
  EXPECT_THROW(reward(1, 1, 0), ValidationError);
}

TEST(Greedy, MaskedArgmaxWithLowestTie) {
  const std::vector<double> q{5, 9, 9, 1};
  EXPECT_EQ(greedy_action(q, {true, true, true, true}), 2);
  EXPECT_EQ(greedy_action(q, {true, false, true, true}), 3);
  EXPECT_EQ(greedy_action(q, {false, false, false, false}), 0);
}

TEST(Replay, RingBufferEvictsOldest) {
  ReplayMemory m(3);
  for (int i = 0; i < 5; ++i) m.push(Transition{{}, i + 1, 0.0, {}, {}, false});
  ASSERT_EQ(m.size(), 3U);
  EXPECT_EQ(m[0].action, 3);
  EXPECT_EQ(m[2].action, 5);
  std::mt19937_64 rng(1);
  EXPECT_EQ(m.sample(10, rng).size(), 10U);
  EXPECT_THROW(ReplayMemory(0), ValidationError);
}

TEST(Config, JsonOverridesAndRejectsUnknownKeys) {
  const auto c = learner_config_from_json(nlohmann::json{{"episodes", 7}, {"discount", 0.5}});
  EXPECT_EQ(c.episodes, 7);
  EXPECT_EQ(c.steps_per_episode, 30);
  EXPECT_DOUBLE_EQ(c.discount, 0.5);
  EXPECT_THROW(learner_config_from_json(nlohmann::json{{"epochs", 3}}), ValidationError);
  EXPECT_THROW(learner_config_from_json(nlohmann::json{{"discount", 1.5}}), ValidationError);
  EXPECT_EQ(learner_config_from_json(to_json(c)).episodes, 7);
}

TEST(Config, EpsilonSchedule) {
  const LearnerConfig c;
  EXPECT_DOUBLE_EQ(c.epsilon_at(0, 100), 1.0);
  EXPECT_NEAR(c.epsilon_at(25, 100), 0.55, 1e-12);
  EXPECT_DOUBLE_EQ(c.epsilon_at(50, 100), 0.1);
  EXPECT_DOUBLE_EQ(c.epsilon_at(99, 100), 0.1);
}

// Central differences against the analytic gradient.
double max_relative_gradient_error(int inputs, std::vector<int> hidden, int outputs, std::uint64_t seed) {
  QNetwork net(inputs, std::move(hidden), outputs, seed);
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> xs(4, std::vector<double>(static_cast<std::size_t>(inputs)));
  for (auto& x : xs) {
    for (auto& v : x) v = u(rng);
  }
  // Keep biases away from zero so no ReLU sits exactly on its kink.
  for (auto& p : net.parameters()) p += 0.01 * u(rng);
  std::vector<QNetwork::Sample> batch;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    batch.push_back({xs[i], static_cast<int>(i % static_cast<std::size_t>(outputs)), u(rng)});
  }
  std::vector<double> grad;
  net.loss_and_gradient(batch, grad);
  double worst = 0;
  const double h = 1e-6;
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = net.loss(batch);
    params[i] = saved - h;
    const double down = net.loss(batch);
    params[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
  }
  return worst;
}

TEST(QNetwork, GradientMatchesFiniteDifferences) {
  EXPECT_LT(max_relative_gradient_error(6, {8, 8}, 5, 1), 1e-4);
  EXPECT_LT(max_relative_gradient_error(3, {4}, 2, 2), 1e-4);
}

TEST(QNetwork, ShapesAndErrors) {
  const QNetwork net(4, {3}, 2, 0);
  EXPECT_EQ(net.parameters().size(), 4U * 3 + 3 + 3 * 2 + 2);
  EXPECT_EQ(net.forward(std::vector<double>{1, 2, 3, 4}).size(), 2U);
  EXPECT_THROW(net.forward(std::vector<double>{1, 2}), ValidationError);
  EXPECT_THROW(QNetwork(0, {3}, 2, 0), ValidationError);
}

TEST(QNetwork, AdamReducesLoss) {
  QNetwork net(3, {16}, 2, 4);
  AdamOptimizer opt(net.parameters().size(), 1e-2);
  const std::vector<double> x{0.5, -0.2, 0.1};
  const std::vector<QNetwork::Sample> batch{{x, 1, 3.0}};
  std::vector<double> grad;
  const double before = net.loss(batch);
  for (int i = 0; i < 200; ++i) {
    net.loss_and_gradient(batch, grad);
    opt.step(net.parameters(), grad);
  }
  EXPECT_LT(net.loss(batch), before * 1e-3);
}

TEST(TrainStep, FitsFixedTargets) {
  // Terminal transitions with fixed rewards: the loss must fall toward zero.
  const auto c = parse_bmc("XYXYXY", 2, 3);
  const auto state = encode_state(c);
  ReplayMemory memory(64);
  for (int a = 1; a <= 5; ++a) memory.push(Transition{state, a, 0.1 * a, state, action_mask(c), true});
  LearnerConfig config;
  config.batch_size = 4;
  config.learning_rate = 1e-2;
  QNetwork net(static_cast<int>(state.size()), {16}, 5, 1);
  AdamOptimizer opt(net.parameters().size(), config.learning_rate);
  std::mt19937_64 rng(2);
  const double first = train_step(memory, net, opt, config, rng);
  double last = first;
  for (int i = 0; i < 300; ++i) last = train_step(memory, net, opt, config, rng);
  EXPECT_LT(last, first * 1e-2);
  const auto q = net.forward(state);
  for (int a = 1; a <= 5; ++a) EXPECT_NEAR(q[static_cast<std::size_t>(a - 1)], 0.1 * a, 0.02);

  config.batch_size = 100;
  EXPECT_THROW(train_step(memory, net, opt, config, rng), ValidationError);
}

Workload stretched_workload() {
  // Wide, flat queries on an 8x8 grid.
  Workload w{Grid{2, 3}, {}};
  for (Coord y = 0; y < 8; ++y) w.queries.push_back({GridPoint{0, y}, GridPoint{7, y}});
  return w;
}

LearnerConfig small_config(std::uint64_t seed) {
  LearnerConfig c;
  c.episodes = 10;
  c.steps_per_episode = 30;
  c.batch_size = 16;
  c.hidden = {32, 32};
  c.seed = seed;
  return c;
}

TEST(Learner, DeterministicUnderSeed) {
  const auto s = summarize_workload(stretched_workload());
  const auto init = standard_curve(StandardCurve::kZOrder, Grid{2, 3});
  const auto a = learn_bmc(init, s, small_config(3));
  const auto b = learn_bmc(init, s, small_config(3));
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].cost, b.trace[i].cost);
    EXPECT_EQ(a.trace[i].epsilon, b.trace[i].epsilon);
  }
  EXPECT_EQ(a.best, b.best);
}

TEST(Learner, ReturnsBestCurveSeen) {
  const auto s = summarize_workload(stretched_workload());
  const auto init = standard_curve(StandardCurve::kZOrder, Grid{2, 3});
  const auto r = learn_bmc(init, s, small_config(1));
  EXPECT_EQ(r.trace.size(), 300U);
  EXPECT_DOUBLE_EQ(r.initial_cost, combined_cost(init, s));
  double best = r.initial_cost;
  for (const auto& row : r.trace) {
    best = std::min(best, row.cost);
    EXPECT_NEAR(row.ratio, row.cost / r.initial_cost, 1e-12);
  }
  EXPECT_DOUBLE_EQ(r.best_cost, best);
  EXPECT_DOUBLE_EQ(combined_cost(r.best, s), r.best_cost);
  EXPECT_LE(r.best_cost, r.initial_cost);
  // Row scans favour the y-major curve, which the search must reach.
  EXPECT_EQ(render_bmc(r.best), "YYYXXX");
}

TEST(Learner, WorksWithCustomCost) {
  // Cost is the rank of the most significant X; pushing X down lowers it.
  const auto cost = [](const BmcSpec& c) { return 1.0 + c.rank(0, c.bits() - 1); };
  const auto r = learn_bmc(standard_curve(StandardCurve::kZOrder, Grid{2, 3}), cost, small_config(2));
  EXPECT_DOUBLE_EQ(r.best_cost, 3.0);
}

TEST(Learner, RejectsMismatchedGrids) {
  const auto s = summarize_workload(stretched_workload());
  EXPECT_THROW(learn_bmc(parse_bmc("XYXY", 2, 2), s, small_config(1)), ValidationError);
  auto bad = small_config(1);
  bad.episodes = 0;
  EXPECT_THROW(learn_bmc(parse_bmc("XYXYXY", 2, 3), s, bad), ValidationError);
}

TEST(Learner, TraceCsv) {
  const std::vector<TraceRow> rows{{1, 10.0, 1.0, 1.0}, {2, 5.0, 0.5, 0.9}};
  const auto path = std::filesystem::temp_directory_path() / "bmc_trace_test.csv";
  write_trace_csv(path, rows);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  std::filesystem::remove(path);
  EXPECT_EQ(header, "step,cost,ratio,epsilon");
  EXPECT_EQ(first.substr(0, 5), "1,10,");
}

}  // namespace
}  // namespace bmc
