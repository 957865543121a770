#pragma once

#include <map>
#include <string>
#include <vector>

#include "planlearn/errors.hpp"

namespace planlearn {

// A grounded atom: predicate or fluent head applied to object names.
// The same shape serves both roles; occurrence context disambiguates.
struct GroundAtom {
  std::string name;
  std::vector<std::string> args;

  auto operator<=>(const GroundAtom&) const = default;
};

using PredicateAtom = GroundAtom;
using FluentAtom = GroundAtom;

std::string to_string(const GroundAtom& a);

// A full snapshot of the world. Atoms absent from both maps are unknown
// (open world), never implicitly false.
struct State {
  int index = 0;
  std::map<PredicateAtom, bool> literals;
  std::map<FluentAtom, double> fluents;

  bool operator==(const State&) const = default;
};

struct ActionInstance {
  std::string name;
  std::vector<std::string> args;
  int start = 0;
  int end = 1;  // always start + 1: traces record a state between actions

  bool operator==(const ActionInstance&) const = default;
};

std::string to_string(const ActionInstance& a);

// Alternating actions/states; states 0..n contiguous, |states| = |actions|+1,
// and action k runs from state k to state k+1.
struct PlanTrace {
  std::vector<ActionInstance> actions;
  std::vector<State> states;

  bool operator==(const PlanTrace&) const = default;
};

// Parses the line-oriented trace format:
//
//   #Actions
//   [0][1] (goto rov1 wp1 wp2)
//   ...
//   #States
//   [0] (at rov1 wp1) (not (at rov1 wp2)) (= (energy rov1) 450) ...
//
// Throws TraceError: Kind::Syntax with line/column, Kind::IndexGap on
// inconsistent indices or state/action count mismatch, Kind::Duplicate when
// a state states the same atom twice.
PlanTrace parse_plan_trace(const std::string& text);

// Deterministic inverse of parse_plan_trace: literals sorted before fluents,
// both in atom order. parse(serialize(t)) == t structurally.
std::string serialize_plan_trace(const PlanTrace& trace);

}  // namespace planlearn
