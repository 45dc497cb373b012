#include "bmc/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bmc/error.hpp"

namespace bmc {

bool swap_allowed(const BmcSpec& curve, SwapAction action) {
  if (action.position < 1 || action.position > curve.width() - 1) return false;
  return curve.slot(action.position - 1) != curve.slot(action.position);
}

BmcSpec apply_swap(const BmcSpec& curve, SwapAction action) {
  if (action.position < 1 || action.position > curve.width() - 1) {
    throw ValidationError("swap position " + std::to_string(action.position) + " outside [1, " +
                          std::to_string(curve.width() - 1) + "]");
  }
  if (!swap_allowed(curve, action)) {
    throw std::logic_error("swap of two bits from the same dimension");
  }
  auto slots = curve.slots_lsb_first();
  std::swap(slots[static_cast<std::size_t>(action.position - 1)],
            slots[static_cast<std::size_t>(action.position)]);
  return BmcSpec(curve.grid(), std::move(slots));
}

std::vector<bool> action_mask(const BmcSpec& curve) {
  std::vector<bool> mask(static_cast<std::size_t>(std::max(curve.width() - 1, 0)));
  for (int a = 1; a < curve.width(); ++a) mask[static_cast<std::size_t>(a - 1)] = swap_allowed(curve, {a});
  return mask;
}

std::vector<double> encode_state(const BmcSpec& curve) {
  const int d = curve.dims();
  std::vector<double> out(static_cast<std::size_t>(curve.width() * d), 0.0);
  for (int row = 0; row < curve.width(); ++row) {
    const int dim = curve.slot(curve.width() - 1 - row);
    out[static_cast<std::size_t>(row * d + (d - 1 - dim))] = 1.0;
  }
  return out;
}

BmcSpec decode_state(std::span<const double> encoded, Grid grid) {
  grid.validate();
  const int d = grid.dims;
  if (static_cast<int>(encoded.size()) != grid.width() * d) {
    throw ValidationError("encoded state has the wrong length");
  }
  std::vector<int> lsb_first(static_cast<std::size_t>(grid.width()));
  for (int row = 0; row < grid.width(); ++row) {
    int hot = -1;
    for (int c = 0; c < d; ++c) {
      const double v = encoded[static_cast<std::size_t>(row * d + c)];
      if (v == 1.0) {
        if (hot >= 0) throw ValidationError("encoded state row has several hot entries");
        hot = c;
      } else if (v != 0.0) {
        throw ValidationError("encoded state is not one-hot");
      }
    }
    if (hot < 0) throw ValidationError("encoded state row has no hot entry");
    lsb_first[static_cast<std::size_t>(grid.width() - 1 - row)] = d - 1 - hot;
  }
  return BmcSpec(grid, std::move(lsb_first));
}

double reward(double cost_prev, double cost_next, double cost_initial) {
  if (!(cost_initial > 0.0)) throw ValidationError("initial cost must be positive");
  return (cost_prev - cost_next) / cost_initial;
}

int greedy_action(std::span<const double> q_values, const std::vector<bool>& mask) {
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size() && i < q_values.size(); ++i) {
    if (!mask[i]) continue;
    if (best == 0 || q_values[i] > best_value) {
      best = static_cast<int>(i) + 1;
      best_value = q_values[i];
    }
  }
  return best;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ValidationError("replay memory capacity must be positive");
}

void ReplayMemory::push(Transition t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t count, std::mt19937_64& rng) const {
  if (items_.empty()) throw ValidationError("cannot sample from an empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(&items_[pick(rng)]);
  return out;
}

void LearnerConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("learner config: " + what); };
  if (episodes < 1) fail("episodes must be >= 1");
  if (steps_per_episode < 1) fail("steps_per_episode must be >= 1");
  if (memory_capacity < 1) fail("memory_capacity must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(discount >= 0.0 && discount < 1.0)) fail("discount must be in [0, 1)");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) fail("epsilon_start must be in [0, 1]");
  if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) fail("epsilon_end must be in [0, 1]");
  if (!(anneal_fraction > 0.0 && anneal_fraction <= 1.0)) fail("anneal_fraction must be in (0, 1]");
  if (hidden.empty()) fail("at least one hidden layer is required");
  for (int h : hidden) {
    if (h < 1) fail("hidden widths must be positive");
  }
}

double LearnerConfig::epsilon_at(long step, long total_steps) const {
  const double horizon = anneal_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return epsilon_end;
  const double t = static_cast<double>(step) / horizon;
  return epsilon_start + (epsilon_end - epsilon_start) * t;
}

nlohmann::json to_json(const LearnerConfig& c) {
  return {{"episodes", c.episodes},
          {"steps_per_episode", c.steps_per_episode},
          {"memory_capacity", c.memory_capacity},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"discount", c.discount},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"anneal_fraction", c.anneal_fraction},
          {"hidden", c.hidden},
          {"seed", c.seed},
          {"terminal_at_episode_end", c.terminal_at_episode_end}};
}

LearnerConfig learner_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("learner config must be a JSON object");
  LearnerConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "episodes") c.episodes = value.get<int>();
      else if (key == "steps_per_episode") c.steps_per_episode = value.get<int>();
      else if (key == "memory_capacity") c.memory_capacity = value.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "discount") c.discount = value.get<double>();
      else if (key == "epsilon_start") c.epsilon_start = value.get<double>();
      else if (key == "epsilon_end") c.epsilon_end = value.get<double>();
      else if (key == "anneal_fraction") c.anneal_fraction = value.get<double>();
      else if (key == "hidden") c.hidden = value.get<std::vector<int>>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "terminal_at_episode_end") c.terminal_at_episode_end = value.get<bool>();
      else throw ValidationError("learner config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("learner config: ") + e.what());
  }
  c.validate();
  return c;
}

LearnerConfig load_learner_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return learner_config_from_json(j);
}

double train_step(const ReplayMemory& memory, QNetwork& network, AdamOptimizer& optimizer,
                  const LearnerConfig& config, std::mt19937_64& rng) {
  if (memory.size() == 0 || memory.size() < config.batch_size) {
    throw ValidationError("replay memory holds fewer transitions than one batch");
  }
  const auto batch = memory.sample(config.batch_size, rng);
  std::vector<QNetwork::Sample> samples;
  samples.reserve(batch.size());
  for (const Transition* t : batch) {
    double target = t->reward;
    if (!t->terminal && config.discount > 0.0) {
      const auto next_q = network.forward(t->next_state);
      const int a = greedy_action(next_q, t->next_mask);
      if (a > 0) target += config.discount * next_q[static_cast<std::size_t>(a - 1)];
    }
    samples.push_back({t->state, t->action - 1, target});
  }
  std::vector<double> grad;
  const double loss = network.loss_and_gradient(samples, grad);
  optimizer.step(network.parameters(), grad);
  return loss;
}

LearnResult learn_bmc(const BmcSpec& initial, const CurveCostFn& cost, const LearnerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const int actions = initial.width() - 1;
  const double initial_cost = cost(initial);
  LearnResult result{initial, initial_cost, initial_cost, {}, {}};
  const auto initial_mask = action_mask(initial);
  if (std::none_of(initial_mask.begin(), initial_mask.end(), [](bool b) { return b; })) {
    return result;  // a single-dimension curve has no alternatives
  }
  if (!(initial_cost > 0.0)) throw ValidationError("initial curve has zero cost; nothing to learn");

  result.network = QNetwork(initial.width() * initial.dims(), config.hidden, actions,
                            rng());
  AdamOptimizer optimizer(result.network.parameters().size(), config.learning_rate);
  ReplayMemory memory(config.memory_capacity);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const long total_steps = static_cast<long>(config.episodes) * config.steps_per_episode;
  long step = 0;
  result.trace.reserve(static_cast<std::size_t>(total_steps));
  for (int episode = 0; episode < config.episodes; ++episode) {
    BmcSpec state = initial;
    double state_cost = initial_cost;
    auto encoded = encode_state(state);
    auto mask = action_mask(state);
    for (int t = 0; t < config.steps_per_episode; ++t, ++step) {
      const double epsilon = config.epsilon_at(step, total_steps);
      int action;
      if (coin(rng) < epsilon) {
        std::vector<int> allowed;
        for (std::size_t i = 0; i < mask.size(); ++i) {
          if (mask[i]) allowed.push_back(static_cast<int>(i) + 1);
        }
        std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
        action = allowed[pick(rng)];
      } else {
        action = greedy_action(result.network.forward(encoded), mask);
      }

      BmcSpec next = apply_swap(state, {action});
      const double next_cost = cost(next);
      const double r = reward(state_cost, next_cost, initial_cost);
      auto next_encoded = encode_state(next);
      auto next_mask = action_mask(next);
      const bool terminal = config.terminal_at_episode_end && t + 1 == config.steps_per_episode;
      memory.push({encoded, action, r, next_encoded, next_mask, terminal});
      if (memory.size() >= config.batch_size) {
        train_step(memory, result.network, optimizer, config, rng);
      }

      if (next_cost < result.best_cost) {
        result.best_cost = next_cost;
        result.best = next;
      }
      result.trace.push_back({step + 1, next_cost, next_cost / initial_cost, epsilon});

      state = std::move(next);
      state_cost = next_cost;
      encoded = std::move(next_encoded);
      mask = std::move(next_mask);
    }
  }
  return result;
}

LearnResult learn_bmc(const BmcSpec& initial, const WorkloadSummary& summary,
                      const LearnerConfig& config) {
  if (!(initial.grid() == summary.tables.grid())) {
    throw ValidationError("initial curve and workload summary use different grids");
  }
  return learn_bmc(initial, [&](const BmcSpec& c) { return combined_cost(c, summary); }, config);
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "step,cost,ratio,epsilon\n";
  out.precision(17);
  for (const auto& row : trace) {
    out << row.step << ',' << row.cost << ',' << row.ratio << ',' << row.epsilon << '\n';
  }
  if (!out) throw IoError("write error on " + path.string());
}

}  // namespace bmc
