#include <algorithm>
#include <random>

#include "planlearn/errors.hpp"
#include "planlearn/evaluation.hpp"

namespace planlearn {

namespace {

Expression var(std::string name, std::vector<int> params) {
  return Expression::variable(LiftedKey{std::move(name), std::move(params)});
}

GroundAtom atom(std::string name, std::vector<std::string> args) {
  return GroundAtom{std::move(name), std::move(args)};
}

double energy_of(const State& s, const std::string& rover) {
  return s.fluents.at(atom("energy", {rover}));
}

bool is_base(const State& s, const std::string& wp) {
  auto it = s.literals.find(atom("base", {wp}));
  return it != s.literals.end() && it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rover world: two rovers with distinct battery usage walk a six-waypoint
// graph, scanning and recharging at base waypoints. All fluent values live on
// a small lattice (ratio-spaced distances, two usage rates, one recharge
// level), so clean corpora survive discretisation exactly.

GeneratorWorld make_rover_world() {
  GeneratorWorld world;
  world.name = "rover";
  world.objects = {"rov1", "rov2", "wpa", "wpb", "wpc", "wpd", "wpe", "wpf", "wpg", "wph"};
  world.min_len = 6;
  world.max_len = 12;

  Domain d;
  d.name = "rover";
  {
    ActionModel goto_model;
    goto_model.name = "goto";
    goto_model.arity = 3;
    Expression cost = Expression::binary(BinOp::Mul, var("dist", {1, 2}), var("bat_usage", {0}));
    goto_model.preconditions = {
        LogicalCondition{{"at", {0, 1}}, true},
        NumericCondition{Comparator::Ge, var("energy", {0}), cost},
    };
    goto_model.effects = {
        DeleteEffect{{"at", {0, 1}}},
        AddEffect{{"at", {0, 2}}},
        NumericEffect{NumericEffectKind::Decrease, {"energy", {0}}, cost},
    };
    d.actions.push_back(std::move(goto_model));
  }
  auto instrument_action = [](const std::string& name, const std::string& predicate) {
    ActionModel m;
    m.name = name;
    m.arity = 2;
    m.preconditions = {LogicalCondition{{"at", {0, 1}}, true}};
    m.effects = {AddEffect{{predicate, {1}}}};
    return m;
  };
  d.actions.push_back(instrument_action("scan", "scanned"));
  d.actions.push_back(instrument_action("sample_soil", "sampled"));
  d.actions.push_back(instrument_action("take_image", "imaged"));
  d.actions.push_back(instrument_action("calibrate", "calibrated"));
  {
    ActionModel recharge;
    recharge.name = "recharge";
    recharge.arity = 2;
    recharge.preconditions = {
        LogicalCondition{{"at", {0, 1}}, true},
        LogicalCondition{{"base", {1}}, true},
    };
    recharge.effects = {
        NumericEffect{NumericEffectKind::Assign, {"energy", {0}}, Expression::constant(500)},
    };
    d.actions.push_back(std::move(recharge));
  }
  world.reference = std::move(d);

  world.sample_initial = [](std::mt19937_64& rng) {
    const std::vector<std::string> rovers = {"rov1", "rov2"};
    const std::vector<std::string> wps = {"wpa", "wpb", "wpc", "wpd", "wpe", "wpf", "wpg", "wph"};
    // Well separated so discretisation never merges neighbouring distances,
    // and coarse enough that derived energy levels repeat across traces.
    const std::vector<double> dist_pool = {10, 20, 40};

    State s;
    std::uniform_int_distribution<std::size_t> wp_pick(0, wps.size() - 1);
    std::uniform_int_distribution<std::size_t> dist_pick(0, dist_pool.size() - 1);

    std::vector<std::string> at = {wps[wp_pick(rng)], wps[wp_pick(rng)]};
    for (std::size_t r = 0; r < rovers.size(); ++r)
      for (const auto& w : wps) s.literals[atom("at", {rovers[r], w})] = (w == at[r]);
    std::uniform_int_distribution<int> survey_coin(0, 1);
    for (const auto& w : wps) {
      // Half the survey work predates the trace, so instrument predicates
      // stay mixed at every stage of a walk.
      for (const char* p : {"scanned", "sampled", "imaged", "calibrated"})
        s.literals[atom(p, {w})] = survey_coin(rng) == 0;
      s.literals[atom("base", {w})] = (w == "wpa" || w == "wpb" || w == "wpc");
    }
    for (const auto& a : wps)
      for (const auto& b : wps)
        if (a != b) s.fluents[atom("dist", {a, b})] = dist_pool[dist_pick(rng)];
    s.fluents[atom("bat_usage", {"rov1"})] = 3;
    s.fluents[atom("bat_usage", {"rov2"})] = 5;
    s.fluents[atom("energy", {"rov1"})] = 500;
    s.fluents[atom("energy", {"rov2"})] = 500;
    return s;
  };

  // Keeps walks alive and varied: a rover only enters a non-base waypoint
  // with enough energy to leave to anywhere (max leg costs 5*40=200, floor
  // 60), recharges when genuinely low, and never repeats survey work.
  world.policy = [](const ActionInstance& a, const State& s) {
    if (a.name == "goto") {
      double e = energy_of(s, a.args[0]);
      double cost = s.fluents.at(atom("dist", {a.args[1], a.args[2]})) *
                    s.fluents.at(atom("bat_usage", {a.args[0]}));
      double left = e - cost;
      if (left < 60) return false;
      return is_base(s, a.args[2]) || left >= 260;
    }
    if (a.name == "recharge") return energy_of(s, a.args[0]) <= 400;
    if (a.name == "scan") return !s.literals.at(atom("scanned", {a.args[1]}));
    if (a.name == "sample_soil") return !s.literals.at(atom("sampled", {a.args[1]}));
    if (a.name == "take_image") return !s.literals.at(atom("imaged", {a.args[1]}));
    if (a.name == "calibrate") return !s.literals.at(atom("calibrated", {a.args[1]}));
    return true;
  };
  return world;
}

// ---------------------------------------------------------------------------
// Tanker world: pumps fill tanks at fixed rates up to capacity, drains remove
// a fixed amount. Exercises increase effects and <= preconditions over sums.

GeneratorWorld make_tanker_world() {
  GeneratorWorld world;
  world.name = "tanker";
  world.objects = {"tank1", "tank2", "tank3", "pump1", "pump2"};
  world.min_len = 4;
  world.max_len = 10;

  Domain d;
  d.name = "tanker";
  {
    ActionModel pump;
    pump.name = "pump";
    pump.arity = 2;  // (pump ?p ?t)
    pump.preconditions = {
        LogicalCondition{{"connected", {0, 1}}, true},
        NumericCondition{Comparator::Le,
                         Expression::binary(BinOp::Add, var("volume", {1}), var("rate", {0})),
                         var("capacity", {1})},
    };
    pump.effects = {
        NumericEffect{NumericEffectKind::Increase, {"volume", {1}}, var("rate", {0})},
    };
    d.actions.push_back(std::move(pump));
  }
  {
    ActionModel drain;
    drain.name = "drain";
    drain.arity = 1;
    drain.preconditions = {
        NumericCondition{Comparator::Ge, var("volume", {0}), Expression::constant(30)},
    };
    drain.effects = {
        NumericEffect{NumericEffectKind::Decrease, {"volume", {0}}, Expression::constant(30)},
    };
    d.actions.push_back(std::move(drain));
  }
  world.reference = std::move(d);

  world.sample_initial = [](std::mt19937_64& rng) {
    const std::vector<std::string> tanks = {"tank1", "tank2", "tank3"};
    const std::vector<std::string> pumps = {"pump1", "pump2"};
    const std::vector<double> volumes = {0, 35, 70};
    const std::vector<double> capacities = {200, 300};

    State s;
    std::uniform_int_distribution<std::size_t> vol_pick(0, volumes.size() - 1);
    std::uniform_int_distribution<std::size_t> cap_pick(0, capacities.size() - 1);
    std::uniform_int_distribution<std::size_t> tank_pick(0, tanks.size() - 1);

    for (const auto& p : pumps)
      for (const auto& t : tanks) s.literals[atom("connected", {p, t})] = false;
    for (const auto& p : pumps) {
      // Each pump reaches two distinct tanks.
      std::size_t first = tank_pick(rng), second = tank_pick(rng);
      while (second == first) second = tank_pick(rng);
      s.literals[atom("connected", {p, tanks[first]})] = true;
      s.literals[atom("connected", {p, tanks[second]})] = true;
    }
    for (const auto& t : tanks) {
      s.fluents[atom("volume", {t})] = volumes[vol_pick(rng)];
      s.fluents[atom("capacity", {t})] = capacities[cap_pick(rng)];
    }
    s.fluents[atom("rate", {"pump1"})] = 7;
    s.fluents[atom("rate", {"pump2"})] = 11;
    return s;
  };
  world.policy = nullptr;
  return world;
}

// ---------------------------------------------------------------------------
// Blocks world: classic four-block tower manipulation, logical only.

GeneratorWorld make_blocks_world() {
  GeneratorWorld world;
  world.name = "blocks";
  world.objects = {"b1", "b2", "b3", "b4"};
  world.min_len = 4;
  world.max_len = 12;

  Domain d;
  d.name = "blocks";
  {
    ActionModel pickup;
    pickup.name = "pickup";
    pickup.arity = 1;
    pickup.preconditions = {
        LogicalCondition{{"clear", {0}}, true},
        LogicalCondition{{"ontable", {0}}, true},
        LogicalCondition{{"handempty", {}}, true},
    };
    pickup.effects = {
        DeleteEffect{{"ontable", {0}}},
        DeleteEffect{{"clear", {0}}},
        DeleteEffect{{"handempty", {}}},
        AddEffect{{"holding", {0}}},
    };
    d.actions.push_back(std::move(pickup));
  }
  {
    ActionModel putdown;
    putdown.name = "putdown";
    putdown.arity = 1;
    putdown.preconditions = {LogicalCondition{{"holding", {0}}, true}};
    putdown.effects = {
        DeleteEffect{{"holding", {0}}},
        AddEffect{{"clear", {0}}},
        AddEffect{{"ontable", {0}}},
        AddEffect{{"handempty", {}}},
    };
    d.actions.push_back(std::move(putdown));
  }
  {
    ActionModel stack;
    stack.name = "stack";
    stack.arity = 2;
    stack.preconditions = {
        LogicalCondition{{"holding", {0}}, true},
        LogicalCondition{{"clear", {1}}, true},
    };
    stack.effects = {
        DeleteEffect{{"holding", {0}}},
        DeleteEffect{{"clear", {1}}},
        AddEffect{{"clear", {0}}},
        AddEffect{{"on", {0, 1}}},
        AddEffect{{"handempty", {}}},
    };
    d.actions.push_back(std::move(stack));
  }
  {
    ActionModel unstack;
    unstack.name = "unstack";
    unstack.arity = 2;
    unstack.preconditions = {
        LogicalCondition{{"on", {0, 1}}, true},
        LogicalCondition{{"clear", {0}}, true},
        LogicalCondition{{"handempty", {}}, true},
    };
    unstack.effects = {
        DeleteEffect{{"on", {0, 1}}},
        DeleteEffect{{"clear", {0}}},
        DeleteEffect{{"handempty", {}}},
        AddEffect{{"holding", {0}}},
        AddEffect{{"clear", {1}}},
    };
    d.actions.push_back(std::move(unstack));
  }
  world.reference = std::move(d);

  world.sample_initial = [](std::mt19937_64& rng) {
    std::vector<std::string> blocks = {"b1", "b2", "b3", "b4"};
    std::shuffle(blocks.begin(), blocks.end(), rng);

    State s;
    for (const auto& a : blocks) {
      s.literals[atom("ontable", {a})] = false;
      s.literals[atom("clear", {a})] = false;
      s.literals[atom("holding", {a})] = false;
      for (const auto& b : blocks)
        if (a != b) s.literals[atom("on", {a, b})] = false;
    }
    s.literals[atom("handempty", {})] = true;

    // Partition the shuffled blocks into random towers.
    std::uniform_int_distribution<int> coin(0, 1);
    std::string below;
    for (const auto& b : blocks) {
      if (below.empty() || coin(rng) == 0) {
        s.literals[atom("ontable", {b})] = true;  // start a new tower
      } else {
        s.literals[atom("on", {b, below})] = true;
      }
      below = b;
    }
    for (const auto& b : blocks) {
      bool covered = false;
      for (const auto& a : blocks)
        if (a != b && s.literals[atom("on", {a, b})]) covered = true;
      s.literals[atom("clear", {b})] = !covered;
    }
    return s;
  };
  world.policy = nullptr;
  return world;
}

const std::vector<std::string>& builtin_world_names() {
  static const std::vector<std::string> names = {"rover", "tanker", "blocks"};
  return names;
}

GeneratorWorld make_world(const std::string& name) {
  if (name == "rover") return make_rover_world();
  if (name == "tanker") return make_tanker_world();
  if (name == "blocks") return make_blocks_world();
  throw PipelineError("unknown generator world: " + name);
}

}  // namespace planlearn
