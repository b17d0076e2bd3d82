#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "precritic/world.hpp"

namespace precritic {

// Structural family of a generated world. Mobile worlds use Click, LongPress,
// Scroll, Type, Back and Home; web worlds lean on Type, never LongPress, and
// have no Home button.
enum class Family { Mobile, Web };

std::string_view family_name(Family family);
std::optional<Family> family_from_name(std::string_view name);

struct GeneratorParams {
  int screens = 8;        // regular screens, traps come on top
  int branching = 2;      // forward edges per screen
  double trap_probability = 0.0;
  int tasks = 1;
  int destinations = 3;   // distinct goal screens tasks are drawn from
  Family family = Family::Mobile;
  int min_distance = 2;   // preferred minimum start-to-goal edge count
};

// Throws ValidationError on out-of-range parameters.
void validate(const GeneratorParams& params);

// Same seed and params give an identical World (and serialization). The
// world is named "<family>-<seed>". Throws ValidationError if no valid task
// set is found within the retry budget.
World generate_world(std::uint64_t seed, const GeneratorParams& params);

struct WorldEntry {
  World world;
  Family family = Family::Mobile;
};

// Named collection of worlds; lookup by World::name().
class WorldSet {
 public:
  void add(World world, Family family);

  const std::vector<WorldEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  // Throws std::out_of_range for an unknown name.
  const World& get(std::string_view name) const;
  const WorldEntry* find(std::string_view name) const;
  std::vector<const World*> pointers() const;

 private:
  std::vector<WorldEntry> entries_;
};

}  // namespace precritic
