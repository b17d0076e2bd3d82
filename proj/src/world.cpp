#include "precritic/world.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "precritic/error.hpp"

namespace precritic {

using nlohmann::json;

World::World(std::vector<Screen> screens, std::vector<Edge> edges, ScreenId home,
             std::vector<Task> tasks, std::string name)
    : name_(std::move(name)), screens_(std::move(screens)), home_(home), tasks_(std::move(tasks)) {
  const auto n = static_cast<ScreenId>(screens_.size());
  if (n == 0) throw ValidationError("world has no screens");
  for (ScreenId i = 0; i < n; ++i) {
    const auto& s = screens_[i];
    if (s.id.empty()) throw ValidationError("screen " + std::to_string(i) + " has an empty id");
    if (!screen_index_.emplace(s.id, i).second) {
      throw ValidationError("duplicate screen id '" + s.id + "'");
    }
    std::set<std::string> seen;
    for (const auto& e : s.elements) {
      if (!seen.insert(e).second) {
        throw ValidationError("screen '" + s.id + "' lists element '" + e + "' twice");
      }
    }
  }
  if (home_ >= n) throw ValidationError("home screen does not exist");

  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) throw ValidationError("edge endpoint does not exist");
    const auto& from = screens_[e.from];
    validate_action(e.action);
    if (e.action.is_done()) {
      throw ValidationError("screen '" + from.id + "': Done cannot label an edge");
    }
    if (e.action.kind == ActionKind::Click || e.action.kind == ActionKind::LongPress ||
        e.action.kind == ActionKind::Type) {
      if (std::find(from.elements.begin(), from.elements.end(), e.action.target) ==
          from.elements.end()) {
        throw ValidationError("edge " + to_string(e.action) + " from '" + from.id +
                              "' targets element '" + e.action.target + "' not on the screen");
      }
    }
    if (e.action.kind == ActionKind::Home && e.to != home_) {
      throw ValidationError("Home edge from '" + from.id + "' does not point to the home screen");
    }
  }

  edges_ = std::move(edges);
  std::stable_sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    if (a.from != b.from) return a.from < b.from;
    return a.action < b.action;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].from == edges_[i - 1].from && edges_[i].action == edges_[i - 1].action) {
      throw ValidationError("screen '" + screens_[edges_[i].from].id + "' has two edges for " +
                            to_string(edges_[i].action));
    }
  }
  edge_begin_.assign(n + 1, 0);
  for (const auto& e : edges_) ++edge_begin_[e.from + 1];
  for (ScreenId i = 0; i < n; ++i) edge_begin_[i + 1] += edge_begin_[i];

  std::vector<std::vector<ScreenId>> reverse(n);
  for (const auto& e : edges_) reverse[e.to].push_back(e.from);

  std::set<std::string> task_ids;
  distance_.reserve(tasks_.size());
  for (const auto& t : tasks_) {
    if (!task_ids.insert(t.id).second) throw ValidationError("duplicate task id '" + t.id + "'");
    if (t.start >= n) throw ValidationError("task '" + t.id + "': start screen does not exist");
    if (t.goal.empty()) throw ValidationError("task '" + t.id + "': empty goal set");
    if (t.max_steps <= 0) throw ValidationError("task '" + t.id + "': max_steps must be positive");

    std::vector<int> dist(n, -1);
    std::deque<ScreenId> queue;
    for (auto g : t.goal) {
      if (g >= n) throw ValidationError("task '" + t.id + "': goal screen does not exist");
      if (dist[g] != 0) {
        dist[g] = 0;
        queue.push_back(g);
      }
    }
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
    if (dist[t.start] < 0) {
      throw ValidationError("task '" + t.id + "': goal unreachable from start '" +
                            screens_[t.start].id + "'");
    }
    distance_.push_back(std::move(dist));
  }
}

std::optional<ScreenId> World::find_screen(std::string_view id) const {
  auto it = screen_index_.find(std::string(id));
  if (it == screen_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> World::find_task(std::string_view id) const {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].id == id) return i;
  }
  return std::nullopt;
}

std::span<const Edge> World::out_edges(ScreenId screen) const {
  return std::span<const Edge>(edges_).subspan(edge_begin_.at(screen),
                                                edge_begin_[screen + 1] - edge_begin_[screen]);
}

const Edge* World::find_edge(ScreenId from, const Action& action) const {
  const auto out = out_edges(from);
  auto it = std::lower_bound(out.begin(), out.end(), action,
                             [](const Edge& e, const Action& a) { return e.action < a; });
  if (it == out.end() || it->action != action) return nullptr;
  return &*it;
}

bool World::is_goal(std::size_t task, ScreenId screen) const {
  return distance_.at(task).at(screen) == 0;
}

std::optional<int> World::screen_distance(std::size_t task, ScreenId screen) const {
  const int d = distance_.at(task).at(screen);
  if (d < 0) return std::nullopt;
  return d;
}

EnvState initial_state(const World& world, std::size_t task) {
  EnvState state;
  state.task = task;
  state.screen = world.tasks().at(task).start;
  return state;
}

StepResult step(const World& world, const EnvState& state, const Action& action) {
  if (state.terminal) throw std::logic_error("step on a terminal state");
  StepResult result{state, false};
  result.state.history.push_back(action);
  if (action.is_done()) {
    result.state.terminal = true;
    return result;
  }
  if (const Edge* e = world.find_edge(state.screen, action)) {
    result.state.screen = e->to;
  } else {
    result.penalized = true;
  }
  return result;
}

std::vector<Action> available_actions(const World& world, const EnvState& state) {
  std::vector<Action> out;
  for (const auto& e : world.out_edges(state.screen)) out.push_back(e.action);
  out.push_back(Action::done());
  std::sort(out.begin(), out.end());
  return out;
}

bool is_available(const World& world, const EnvState& state, const Action& action) {
  return action.is_done() || world.find_edge(state.screen, action) != nullptr;
}

bool is_success(const World& world, const EnvState& state) {
  return state.terminal && world.is_goal(state.task, state.screen);
}

std::optional<int> distance_to_goal(const World& world, const EnvState& state) {
  if (state.terminal) {
    if (is_success(world, state)) return 0;
    return std::nullopt;
  }
  auto d = world.screen_distance(state.task, state.screen);
  if (!d) return std::nullopt;
  return *d + 1;
}

std::vector<Action> optimal_actions(const World& world, const EnvState& state) {
  const auto d = distance_to_goal(world, state);
  if (!d) {
    throw ValidationError("goal unreachable from screen '" + world.screen(state.screen).id + "'");
  }
  std::vector<Action> out;
  if (state.terminal) return out;
  if (world.is_goal(state.task, state.screen)) {
    out.push_back(Action::done());
    return out;
  }
  for (const auto& e : world.out_edges(state.screen)) {
    const auto next = world.screen_distance(state.task, e.to);
    if (next && *next + 1 == *d - 1) out.push_back(e.action);
  }
  return out;  // out_edges is already sorted
}

EnvState replay(const World& world, std::size_t task, std::span<const Action> history) {
  EnvState state = initial_state(world, task);
  for (const auto& a : history) state = step(world, state, a).state;
  return state;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(where + ": unknown field '" + key + "'");
    }
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key + ": expected string");
  return v.get<std::string>();
}

const json& array_field(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_array()) throw ParseError(where + "." + key + ": expected array");
  return v;
}

}  // namespace

World world_from_json(const json& j, std::string name) {
  if (!j.is_object()) throw ParseError("world: expected object");
  reject_unknown(j, {"screens", "edges", "home", "tasks"}, "world");

  std::vector<Screen> screens;
  std::unordered_map<std::string, ScreenId> index;
  const auto& js = array_field(j, "screens", "world");
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string at = "screens[" + std::to_string(i) + "]";
    reject_unknown(js[i], {"id", "elements"}, at);
    Screen s;
    s.id = string_field(js[i], "id", at);
    for (const auto& e : array_field(js[i], "elements", at)) {
      if (!e.is_string()) throw ParseError(at + ".elements: expected strings");
      s.elements.push_back(e.get<std::string>());
    }
    index.emplace(s.id, static_cast<ScreenId>(screens.size()));
    screens.push_back(std::move(s));
  }
  auto resolve = [&](const std::string& id, const std::string& where) {
    auto it = index.find(id);
    if (it == index.end()) throw ValidationError(where + ": unknown screen '" + id + "'");
    return it->second;
  };

  std::vector<Edge> edges;
  const auto& je = array_field(j, "edges", "world");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string at = "edges[" + std::to_string(i) + "]";
    reject_unknown(je[i], {"from", "action", "to", "irreversible"}, at);
    Edge e;
    e.from = resolve(string_field(je[i], "from", at), at + ".from");
    e.action = action_from_json(field(je[i], "action", at), at + ".action");
    e.to = resolve(string_field(je[i], "to", at), at + ".to");
    const auto& irr = field(je[i], "irreversible", at);
    if (!irr.is_boolean()) throw ParseError(at + ".irreversible: expected bool");
    e.irreversible = irr.get<bool>();
    edges.push_back(std::move(e));
  }

  const ScreenId home = resolve(string_field(j, "home", "world"), "home");

  std::vector<Task> tasks;
  const auto& jt = array_field(j, "tasks", "world");
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string at = "tasks[" + std::to_string(i) + "]";
    reject_unknown(jt[i], {"id", "instruction_id", "start", "goal", "max_steps"}, at);
    Task t;
    t.id = string_field(jt[i], "id", at);
    const auto& instr = field(jt[i], "instruction_id", at);
    if (!instr.is_number_integer()) throw ParseError(at + ".instruction_id: expected integer");
    t.instruction_id = instr.get<int>();
    t.start = resolve(string_field(jt[i], "start", at), at + ".start");
    for (const auto& g : array_field(jt[i], "goal", at)) {
      if (!g.is_string()) throw ParseError(at + ".goal: expected strings");
      t.goal.push_back(resolve(g.get<std::string>(), at + ".goal"));
    }
    const auto& ms = field(jt[i], "max_steps", at);
    if (!ms.is_number_integer()) throw ParseError(at + ".max_steps: expected integer");
    t.max_steps = ms.get<int>();
    tasks.push_back(std::move(t));
  }

  return World(std::move(screens), std::move(edges), home, std::move(tasks), std::move(name));
}

json world_to_json(const World& world) {
  json j;
  j["screens"] = json::array();
  for (const auto& s : world.screens()) {
    j["screens"].push_back({{"id", s.id}, {"elements", s.elements}});
  }
  j["edges"] = json::array();
  for (const auto& e : world.edges()) {
    j["edges"].push_back({{"from", world.screen(e.from).id},
                          {"action", to_json(e.action)},
                          {"to", world.screen(e.to).id},
                          {"irreversible", e.irreversible}});
  }
  j["home"] = world.screen(world.home()).id;
  j["tasks"] = json::array();
  for (const auto& t : world.tasks()) {
    json goal = json::array();
    for (auto g : t.goal) goal.push_back(world.screen(g).id);
    j["tasks"].push_back({{"id", t.id},
                          {"instruction_id", t.instruction_id},
                          {"start", world.screen(t.start).id},
                          {"goal", goal},
                          {"max_steps", t.max_steps}});
  }
  return j;
}

std::string serialize_world(const World& world) { return world_to_json(world).dump(2) + "\n"; }

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
  try {
    return world_from_json(j, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_world(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << serialize_world(world);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace precritic
