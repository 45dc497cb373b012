#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bmc/cost_local.hpp"
#include "bmc/curve.hpp"
#include "bmc/qnetwork.hpp"

namespace bmc {

// Swap the bits at positions `position` and `position + 1`, counted 1-based
// from the least significant end. Valid range [1, d*l - 1].
struct SwapAction {
  int position;
};

// True when both slots exist and belong to different dimensions.
bool swap_allowed(const BmcSpec& curve, SwapAction action);
// Throws std::logic_error on a same-dimension swap, ValidationError when out of range.
BmcSpec apply_swap(const BmcSpec& curve, SwapAction action);

// mask[a - 1] is true when position a may be swapped.
std::vector<bool> action_mask(const BmcSpec& curve);

// One-hot rows, most significant slot first; dimension k sets column d-1-k
// (for d = 3: X -> 001, Y -> 010, Z -> 100).
std::vector<double> encode_state(const BmcSpec& curve);
BmcSpec decode_state(std::span<const double> encoded, Grid grid);

// (cost_prev - cost_next) / cost_initial. Throws ValidationError if
// cost_initial is not positive.
double reward(double cost_prev, double cost_next, double cost_initial);

// Position (1-based) of the highest-valued allowed action; ties go to the
// lowest position. Returns 0 when nothing is allowed.
int greedy_action(std::span<const double> q_values, const std::vector<bool>& mask);

struct Transition {
  std::vector<double> state;
  int action;  // 1-based position
  double reward;
  std::vector<double> next_state;
  std::vector<bool> next_mask;
  bool terminal = false;
};

class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  // Uniform with replacement.
  std::vector<const Transition*> sample(std::size_t count, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

struct LearnerConfig {
  int episodes = 50;
  int steps_per_episode = 30;
  std::size_t memory_capacity = 4096;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double discount = 0.9;
  // Exploration probability, annealed linearly from start to end over the
  // first `anneal_fraction` of all steps.
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  double anneal_fraction = 0.5;
  std::vector<int> hidden = {128, 128};
  std::uint64_t seed = 0;
  // Treat the last step of each episode as terminal (target = reward).
  bool terminal_at_episode_end = false;

  void validate() const;
  double epsilon_at(long step, long total_steps) const;
};

nlohmann::json to_json(const LearnerConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
LearnerConfig learner_config_from_json(const nlohmann::json& j);
LearnerConfig load_learner_config(const std::filesystem::path& path);

// One gradient step on the squared temporal-difference error over a sampled
// batch. Targets are r + discount * max over allowed next actions of the
// online network. Returns the batch loss before the update. Throws
// ValidationError if the memory holds fewer than batch_size transitions.
double train_step(const ReplayMemory& memory, QNetwork& network, AdamOptimizer& optimizer,
                  const LearnerConfig& config, std::mt19937_64& rng);

struct TraceRow {
  long step;      // 1-based global step
  double cost;    // cost of the curve reached by this step
  double ratio;   // cost / initial cost
  double epsilon;
};

struct LearnResult {
  BmcSpec best;
  double best_cost;
  double initial_cost;
  std::vector<TraceRow> trace;
  QNetwork network;
};

using CurveCostFn = std::function<double(const BmcSpec&)>;

// Deep Q-learning over adjacent cross-dimension swaps. Each episode restarts
// from `initial`; returns the lowest-cost curve seen in any step.
LearnResult learn_bmc(const BmcSpec& initial, const CurveCostFn& cost, const LearnerConfig& config);
LearnResult learn_bmc(const BmcSpec& initial, const WorkloadSummary& summary,
                      const LearnerConfig& config);

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace);

}  // namespace bmc
