#include "atmocat/workflow.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include <json.hpp>

#include "atmocat/errors.hpp"

using nlohmann::json;

namespace atmocat {

namespace {

using KindSet = std::set<std::string>;

bool inputs_available(const AnalysisProfile& p, const KindSet& kinds) {
  for (const auto& in : p.inputs)
    if (!kinds.count(in.data_kind)) return false;
  return true;
}

// Deterministic input binding: a layer of the right kind wins (smallest id),
// else the earliest prior step with a matching output.
BindingSource bind_input(const std::string& kind,
                         const std::vector<AvailableLayer>& layers,
                         const std::vector<PlanStep>& prior,
                         const std::vector<AnalysisProfile>& profiles) {
  const AvailableLayer* best = nullptr;
  for (const auto& l : layers)
    if (l.data_kind == kind && (!best || l.layer_id < best->layer_id)) best = &l;
  if (best) {
    BindingSource s;
    s.kind = BindingSource::Layer;
    s.layer_id = best->layer_id;
    return s;
  }
  for (std::size_t i = 0; i < prior.size(); ++i) {
    auto it = std::find_if(profiles.begin(), profiles.end(), [&](const auto& p) {
      return p.profile_id == prior[i].profile_id;
    });
    if (it == profiles.end()) continue;
    for (const auto& out : it->outputs)
      if (out.data_kind == kind) {
        BindingSource s;
        s.kind = BindingSource::StepOutput;
        s.step_index = i;
        s.output_name = out.name;
        return s;
      }
  }
  throw NoPlan("unbindable input of kind " + kind);
}

}  // namespace

WorkflowPlan compose(const std::vector<AvailableLayer>& layers,
                     const std::vector<AnalysisProfile>& profiles,
                     const std::string& goal_kind) {
  for (const auto& p : profiles)
    if (p.inputs.empty() || p.outputs.empty())
      throw NoPlan("profile " + std::to_string(p.profile_id) + " has malformed I/O");

  KindSet base;
  for (const auto& l : layers) base.insert(l.data_kind);

  WorkflowPlan plan;
  plan.goal_kind = goal_kind;
  if (base.count(goal_kind)) return plan;  // zero steps needed

  std::vector<AnalysisProfile> sorted = profiles;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.profile_id < b.profile_id; });

  // BFS over producible-kind sets; per set keep the lexicographically
  // smallest profile-id sequence at the current depth.
  using Seq = std::vector<std::int64_t>;
  std::map<KindSet, Seq> frontier{{base, {}}};
  std::set<KindSet> seen{base};
  const std::size_t max_depth = sorted.size() + 4;

  for (std::size_t depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
    std::map<KindSet, Seq> next;
    std::optional<Seq> winner;
    for (const auto& [kinds, seq] : frontier) {
      for (const auto& p : sorted) {
        if (!inputs_available(p, kinds)) continue;
        KindSet grown = kinds;
        bool produces_goal = false;
        for (const auto& out : p.outputs) {
          grown.insert(out.data_kind);
          if (out.data_kind == goal_kind) produces_goal = true;
        }
        Seq candidate = seq;
        candidate.push_back(p.profile_id);
        if (produces_goal && (!winner || candidate < *winner)) winner = candidate;
        if (seen.count(grown)) continue;
        auto it = next.find(grown);
        if (it == next.end() || candidate < it->second) next[grown] = candidate;
      }
    }
    if (winner) {
      for (std::int64_t pid : *winner) {
        auto it = std::find_if(sorted.begin(), sorted.end(),
                               [&](const auto& p) { return p.profile_id == pid; });
        PlanStep step;
        step.profile_id = pid;
        for (const auto& in : it->inputs)
          step.input_bindings[in.name] =
              bind_input(in.data_kind, layers, plan.steps, profiles);
        plan.steps.push_back(std::move(step));
      }
      return plan;
    }
    for (const auto& [kinds, seq] : next) seen.insert(kinds);
    frontier = std::move(next);
  }
  throw NoPlan("goal kind " + goal_kind + " is unreachable");
}

PlanCheck validate_plan(const WorkflowPlan& plan,
                        const std::vector<AvailableLayer>& layers,
                        const std::vector<AnalysisProfile>& profiles) {
  PlanCheck check;
  auto violate = [&](const std::string& v) {
    check.valid = false;
    check.violations.push_back(v);
  };

  auto profile_of = [&](std::int64_t id) -> const AnalysisProfile* {
    for (const auto& p : profiles)
      if (p.profile_id == id) return &p;
    return nullptr;
  };

  KindSet layer_kinds;
  std::set<std::int64_t> layer_ids;
  for (const auto& l : layers) {
    layer_kinds.insert(l.data_kind);
    layer_ids.insert(l.layer_id);
  }

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    const AnalysisProfile* p = profile_of(step.profile_id);
    if (!p) {
      violate("unknown profile " + std::to_string(step.profile_id));
      continue;
    }
    for (const auto& in : p->inputs) {
      auto it = step.input_bindings.find(in.name);
      if (it == step.input_bindings.end()) {
        violate("step " + std::to_string(i) + ": input '" + in.name + "' unbound");
        continue;
      }
      const BindingSource& src = it->second;
      if (src.kind == BindingSource::Layer) {
        if (!layer_ids.count(src.layer_id))
          violate("step " + std::to_string(i) + ": unknown layer " +
                  std::to_string(src.layer_id));
        else {
          auto l = std::find_if(layers.begin(), layers.end(), [&](const auto& a) {
            return a.layer_id == src.layer_id;
          });
          if (l->data_kind != in.data_kind)
            violate("step " + std::to_string(i) + ": kind mismatch for '" + in.name + "'");
        }
      } else {
        if (src.step_index >= i) {
          violate("step " + std::to_string(i) + ": forward reference");
          continue;
        }
        const AnalysisProfile* sp = profile_of(plan.steps[src.step_index].profile_id);
        bool ok = false;
        if (sp)
          for (const auto& out : sp->outputs)
            if (out.name == src.output_name && out.data_kind == in.data_kind) ok = true;
        if (!ok)
          violate("step " + std::to_string(i) + ": bad step-output binding for '" +
                  in.name + "'");
      }
    }
  }

  bool goal_met = layer_kinds.count(plan.goal_kind) && plan.steps.empty();
  if (!plan.steps.empty()) {
    const AnalysisProfile* last = profile_of(plan.steps.back().profile_id);
    if (last)
      for (const auto& out : last->outputs)
        if (out.data_kind == plan.goal_kind) goal_met = true;
  }
  if (!goal_met) violate("goal unmet");
  return check;
}

std::string plan_to_json(const WorkflowPlan& plan) {
  json steps = json::array();
  for (const auto& s : plan.steps) {
    json bindings = json::object();
    for (const auto& [name, src] : s.input_bindings) {
      if (src.kind == BindingSource::Layer)
        bindings[name] = {{"layerId", src.layer_id}};
      else
        bindings[name] = {{"step", src.step_index}, {"output", src.output_name}};
    }
    steps.push_back({{"profileId", s.profile_id}, {"inputs", bindings}});
  }
  return json{{"goalKind", plan.goal_kind}, {"steps", steps}}.dump();
}

}  // namespace atmocat
