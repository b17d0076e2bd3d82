#include "precritic/world_gen.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

#include "precritic/error.hpp"
#include "precritic/rng.hpp"

namespace precritic {

std::string_view family_name(Family family) {
  return family == Family::Mobile ? "mobile" : "web";
}

std::optional<Family> family_from_name(std::string_view name) {
  if (name == "mobile") return Family::Mobile;
  if (name == "web") return Family::Web;
  return std::nullopt;
}

void validate(const GeneratorParams& p) {
  if (p.screens < 3) throw ValidationError("generator: screens must be >= 3");
  if (p.branching < 1) throw ValidationError("generator: branching must be >= 1");
  if (!(p.trap_probability >= 0.0 && p.trap_probability < 1.0)) {
    throw ValidationError("generator: trap probability must be in [0, 1)");
  }
  if (p.tasks < 1) throw ValidationError("generator: tasks must be >= 1");
  if (p.destinations < 1) throw ValidationError("generator: destinations must be >= 1");
  if (p.min_distance < 1) throw ValidationError("generator: min_distance must be >= 1");
}

namespace {

constexpr int kMaxAttempts = 200;

class Builder {
 public:
  Builder(const GeneratorParams& params, Rng& rng) : params_(params), rng_(rng) {}

  ScreenId add_screen(std::string id) {
    screens_.push_back({std::move(id), {}});
    return static_cast<ScreenId>(screens_.size() - 1);
  }

  bool has_action(ScreenId from, const Action& a) const {
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const Edge& e) { return e.from == from && e.action == a; });
  }

  void add_edge(ScreenId from, Action action, ScreenId to, bool irreversible = false) {
    if (kind_takes_target(action.kind) && action.kind != ActionKind::Scroll) {
      screens_[from].elements.push_back(action.target);
    }
    edges_.push_back({from, std::move(action), to, irreversible});
  }

  // Forward navigation edge with a family-dependent action kind.
  void add_forward(ScreenId from, ScreenId to) {
    const double u = uniform01(rng_);
    ActionKind kind;
    if (params_.family == Family::Mobile) {
      kind = u < 0.6    ? ActionKind::Click
             : u < 0.75 ? ActionKind::LongPress
             : u < 0.9  ? ActionKind::Scroll
                        : ActionKind::Type;
    } else {
      kind = u < 0.55 ? ActionKind::Click : u < 0.85 ? ActionKind::Type : ActionKind::Scroll;
    }
    if (kind == ActionKind::Scroll) {
      for (const char* dir : {"down", "up"}) {
        Action a = Action::scroll(dir);
        if (!has_action(from, a)) {
          add_edge(from, std::move(a), to);
          return;
        }
      }
      kind = ActionKind::Click;
    }
    const std::string element =
        "e" + std::to_string(from) + "_" + std::to_string(screens_[from].elements.size());
    add_edge(from, Action{kind, element}, to);
  }

  std::vector<Screen> screens_;
  std::vector<Edge> edges_;

 private:
  const GeneratorParams& params_;
  Rng& rng_;
};

std::vector<int> bfs_to(const std::vector<Screen>& screens, const std::vector<Edge>& edges,
                        ScreenId goal) {
  std::vector<std::vector<ScreenId>> reverse(screens.size());
  for (const auto& e : edges) reverse[e.to].push_back(e.from);
  std::vector<int> dist(screens.size(), -1);
  std::deque<ScreenId> queue{goal};
  dist[goal] = 0;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (auto p : reverse[s]) {
      if (dist[p] < 0) {
        dist[p] = dist[s] + 1;
        queue.push_back(p);
      }
    }
  }
  return dist;
}

}  // namespace

World generate_world(std::uint64_t seed, const GeneratorParams& params) {
  validate(params);
  Rng rng = make_rng(derive_seed(seed, {stable_hash("generate_world"),
                                        static_cast<std::uint64_t>(params.family)}));
  Builder b(params, rng);
  const int n = params.screens;
  for (int i = 0; i < n; ++i) b.add_screen("s" + std::to_string(i));

  // Spanning tree rooted at the home screen keeps every screen reachable.
  std::vector<ScreenId> parent(n, 0);
  std::vector<int> depth(n, 0);
  std::vector<int> forward(n, 0);
  for (int i = 1; i < n; ++i) {
    const int lo = std::max(0, i - 3);
    parent[i] = static_cast<ScreenId>(lo + static_cast<int>(uniform_index(rng, i - lo)));
    depth[i] = depth[parent[i]] + 1;
    b.add_forward(parent[i], static_cast<ScreenId>(i));
    ++forward[parent[i]];
  }
  for (int i = 0; i < n; ++i) {
    while (forward[i] < params.branching) {
      const int lo = std::max(0, i - 4);
      const int hi = std::min(n - 1, i + 2);
      int to = lo + static_cast<int>(uniform_index(rng, hi - lo + 1));
      if (to == i) to = (i + 1) % n;
      b.add_forward(static_cast<ScreenId>(i), static_cast<ScreenId>(to));
      ++forward[i];
    }
  }
  const double back_p = params.family == Family::Mobile ? 1.0 : 0.9;
  for (int i = 1; i < n; ++i) {
    if (bernoulli(rng, back_p)) b.add_edge(i, Action::back(), parent[i]);
    if (params.family == Family::Mobile && bernoulli(rng, 0.4)) b.add_edge(i, Action::home(), 0);
  }

  // Irreversible traps: terminal screens with no way out.
  std::vector<int> trap_sources;
  for (int i = 1; i < n; ++i) {
    if (params.trap_probability > 0.0 && bernoulli(rng, params.trap_probability)) {
      trap_sources.push_back(i);
    }
  }
  if (params.trap_probability > 0.0 && trap_sources.empty()) {
    trap_sources.push_back(1 + static_cast<int>(uniform_index(rng, n - 1)));
  }
  std::vector<bool> is_trap(n, false);
  for (std::size_t k = 0; k < trap_sources.size(); ++k) {
    const int from = trap_sources[k];
    const ScreenId trap = b.add_screen("x" + std::to_string(k));
    is_trap.push_back(true);
    const ActionKind kind =
        params.family == Family::Mobile ? ActionKind::LongPress : ActionKind::Click;
    b.add_edge(from, Action{kind, "del" + std::to_string(from)}, trap, true);
  }

  // Goals are drawn from a few destination screens, preferring deep ones.
  std::vector<ScreenId> candidates;
  for (int i = 1; i < n; ++i) {
    if (depth[i] >= 2) candidates.push_back(i);
  }
  if (candidates.empty()) {
    for (int i = 1; i < n; ++i) candidates.push_back(i);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(std::min<std::size_t>(candidates.size(), params.destinations));
  std::sort(candidates.begin(), candidates.end());

  std::vector<Task> tasks;
  std::set<std::pair<ScreenId, ScreenId>> used;
  int attempts = 0;
  while (static_cast<int>(tasks.size()) < params.tasks) {
    if (++attempts > kMaxAttempts * params.tasks) {
      throw ValidationError("generator: no valid task set after bounded retries (seed " +
                            std::to_string(seed) + ")");
    }
    const ScreenId goal = candidates[uniform_index(rng, candidates.size())];
    const auto dist = bfs_to(b.screens_, b.edges_, goal);
    std::vector<ScreenId> starts;
    for (int s = 0; s < n; ++s) {
      if (dist[s] >= params.min_distance && !used.count({static_cast<ScreenId>(s), goal})) starts.push_back(s);
    }
    if (starts.empty()) {
      // Small worlds: the farthest unused starts, then repeats.
      int best = 0;
      for (int s = 0; s < n; ++s) {
        if (!used.count({static_cast<ScreenId>(s), goal})) best = std::max(best, dist[s]);
      }
      for (int s = 0; s < n; ++s) {
        const bool fresh = !used.count({static_cast<ScreenId>(s), goal});
        if (best >= 1 ? (fresh && dist[s] == best) : dist[s] >= 1) starts.push_back(s);
      }
      if (starts.empty()) continue;
    }
    const ScreenId start = starts[uniform_index(rng, starts.size())];
    used.insert({start, goal});
    Task t;
    t.id = "t" + std::to_string(tasks.size());
    t.instruction_id = static_cast<int>(goal);
    t.start = start;
    t.goal = {goal};
    t.max_steps = 2 * (dist[start] + 1) + 4;
    tasks.push_back(std::move(t));
  }

  return World(std::move(b.screens_), std::move(b.edges_), 0, std::move(tasks),
               std::string(family_name(params.family)) + "-" + std::to_string(seed));
}

void WorldSet::add(World world, Family family) {
  if (find(world.name())) throw ValidationError("duplicate world name '" + world.name() + "'");
  entries_.push_back({std::move(world), family});
}

const WorldEntry* WorldSet::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.world.name() == name) return &e;
  }
  return nullptr;
}

const World& WorldSet::get(std::string_view name) const {
  if (const auto* e = find(name)) return e->world;
  throw std::out_of_range("unknown world '" + std::string(name) + "'");
}

std::vector<const World*> WorldSet::pointers() const {
  std::vector<const World*> out;
  for (const auto& e : entries_) out.push_back(&e.world);
  return out;
}

}  // namespace precritic
