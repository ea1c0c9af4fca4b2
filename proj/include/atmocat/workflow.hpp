#pragma once

#include <map>
#include <string>
#include <vector>

#include "atmocat/store.hpp"

namespace atmocat {

// A binding source: either a concrete layer or the output of an earlier step.
struct BindingSource {
  enum Kind { Layer, StepOutput } kind = Layer;
  std::int64_t layer_id = 0;   // when kind == Layer
  std::size_t step_index = 0;  // when kind == StepOutput
  std::string output_name;
};

struct PlanStep {
  std::int64_t profile_id = 0;
  std::map<std::string, BindingSource> input_bindings;  // input name -> source
};

struct WorkflowPlan {
  std::vector<PlanStep> steps;
  std::string goal_kind;
};

struct AvailableLayer {
  std::int64_t layer_id = 0;
  std::string data_kind;
};

// Shortest chain of analysis profiles producing goal_kind from the
// available layer kinds; ties resolve to the lexicographically smallest
// profile-id sequence. Empty plan when the goal is already a layer kind.
// Throws NoPlan when unreachable. Breadth-first forward chaining over the
// set of producible kinds, so multi-input profiles compose correctly.
WorkflowPlan compose(const std::vector<AvailableLayer>& layers,
                     const std::vector<AnalysisProfile>& profiles,
                     const std::string& goal_kind);

struct PlanCheck {
  bool valid = true;
  std::vector<std::string> violations;
};

// Independent re-check of every plan invariant: all inputs bound, no
// forward references, bindings type-check, final step produces the goal.
PlanCheck validate_plan(const WorkflowPlan& plan,
                        const std::vector<AvailableLayer>& layers,
                        const std::vector<AnalysisProfile>& profiles);

std::string plan_to_json(const WorkflowPlan& plan);

}  // namespace atmocat
