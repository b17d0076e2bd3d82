#pragma once

#include <cstdint>
#include <vector>

#include "precritic/vocab.hpp"
#include "precritic/world.hpp"

namespace precritic {

// Layout of the critic's input vector. The state block comes first, the
// candidate-action block second, so two candidates at one state differ only
// at indices >= action_offset().
//
//   state:  bias | instruction (hashed) | screen one-hot | last-k history kinds
//           | step_count / max_steps | hashed (world, instruction, screen)
//   action: action one-hot | action kind | hashed (world, screen, action)
//           | hashed (world, instruction, screen, action)
//           | hashed (world, instruction, element label)
// The element label is the screen the element opens, the way a button's text
// names its destination on a real screen. Done, and actions without an edge,
// are labelled by the current screen.
struct FeatureSpec {
  std::size_t screens = 0;
  std::size_t actions = 0;
  std::size_t instruction_buckets = 64;
  std::size_t history_k = 3;
  std::size_t goal_cross_buckets = 2048;
  std::size_t transition_cross_buckets = 2048;
  std::size_t decision_cross_buckets = 4096;
  std::size_t label_cross_buckets = 4096;

  static FeatureSpec for_vocab(const Vocab& vocab);

  std::size_t instruction_offset() const { return 1; }
  std::size_t screen_offset() const { return instruction_offset() + instruction_buckets; }
  std::size_t history_offset() const { return screen_offset() + screens; }
  std::size_t step_offset() const { return history_offset() + history_k * (kActionKindCount + 1); }
  std::size_t goal_cross_offset() const { return step_offset() + 1; }
  std::size_t action_offset() const { return goal_cross_offset() + goal_cross_buckets; }
  std::size_t kind_offset() const { return action_offset() + actions; }
  std::size_t transition_cross_offset() const { return kind_offset() + kActionKindCount; }
  std::size_t decision_cross_offset() const {
    return transition_cross_offset() + transition_cross_buckets;
  }
  std::size_t label_cross_offset() const {
    return decision_cross_offset() + decision_cross_buckets;
  }
  std::size_t dimension() const { return label_cross_offset() + label_cross_buckets; }

  std::uint64_t hash() const;
};

// Sparse view of a fixed-length vector; indices strictly increasing.
struct FeatureVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  bool operator==(const FeatureVector&) const = default;
  std::vector<double> dense() const;
};

// Deterministic. Throws ValidationError if the screen or action template is
// not in the vocabulary.
FeatureVector featurize(const FeatureSpec& spec, const Vocab& vocab, const World& world,
                        const EnvState& state, const Action& action);

}  // namespace precritic
