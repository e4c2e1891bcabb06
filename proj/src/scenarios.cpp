#include <algorithm>

#include "tmc/error.hpp"
#include "tmc/simgen.hpp"

namespace tmc::simgen {

using intersection::Approach;
using intersection::Binding;
using intersection::Movement;

namespace {

std::vector<Binding> eb_wb_movements() {
  std::vector<Binding> out;
  for (auto a : {Approach::EB, Approach::WB}) {
    for (auto m : {Movement::Left, Movement::Thru, Movement::Right}) {
      out.push_back({a, m});
    }
  }
  return out;
}

Scenario ideal() {
  Scenario s{"ideal", "reference layout, clean detections, mixed traffic",
             intersection::reference_intersection(), {}, {}};
  ScriptSpec spec;
  spec.vehicles = 40;
  s.script = generate_script(s.config, spec, 11);
  s.sim.seed = 101;
  return s;
}

Scenario eb_wb_in_range() {
  Scenario s{"eb_wb_in_range", "EB/WB traffic with ingress zones inside sensor range",
             intersection::reference_intersection(), {}, {}};
  ScriptSpec spec;
  spec.vehicles = 24;
  spec.movements = eb_wb_movements();
  s.script = generate_script(s.config, spec, 23);
  s.sim.seed = 202;
  return s;
}

Scenario eb_wb_long_range() {
  Scenario s = eb_wb_in_range();
  s.name = "eb_wb_long_range";
  s.description = "same traffic with EB/WB ingress zones 60 m out, beyond sensor range";
  const auto base = s.config;
  for (auto& z : s.config.zones) {
    if (z.kind != intersection::ZoneKind::Ingress) {
      continue;
    }
    if (z.binds({Approach::EB, Movement::Thru}) || z.binds({Approach::EB, Movement::Left}) ||
        z.binds({Approach::EB, Movement::Right})) {
      z.center.east = -60.0;
    } else if (z.binds({Approach::WB, Movement::Thru}) || z.binds({Approach::WB, Movement::Left}) ||
               z.binds({Approach::WB, Movement::Right})) {
      z.center.east = 60.0;
    }
  }
  s.config.validate();
  return s;
}

Scenario slow_heavy() {
  Scenario s{"slow_heavy", "slow heavy vehicles dwelling in zones for many frames",
             intersection::reference_intersection(), {}, {}};
  ScriptSpec spec;
  spec.vehicles = 20;
  spec.classes = {5, 6};
  spec.min_speed = 3.0;
  spec.max_speed = 3.0;
  s.script = generate_script(s.config, spec, 37);
  s.sim.seed = 303;
  return s;
}

Scenario burst() {
  Scenario s{"burst", "platoons at the minimum clearance",
             intersection::reference_intersection(), {}, {}};
  ScriptSpec spec;
  spec.vehicles = 40;
  spec.clearance_right = 2.05;
  spec.clearance_other = 2.05;
  spec.clearance_jitter = 0.45;
  spec.spread = 0.0;
  s.script = generate_script(s.config, spec, 41);
  s.sim.seed = 404;
  return s;
}

Scenario dual_overlap() {
  Scenario s{"dual_overlap", "both sensors see every zone, 5 Hz",
             intersection::reference_intersection(), {}, {}};
  ScriptSpec spec;
  spec.vehicles = 40;
  s.script = generate_script(s.config, spec, 53);
  s.sim.frame_rate = 5.0;
  for (auto& sensor : s.sim.sensors) {
    sensor.visibility = 80.0;
  }
  s.sim.seed = 505;
  return s;
}

}  // namespace

std::vector<Scenario> scenario_suite() {
  return {ideal(), eb_wb_long_range(), eb_wb_in_range(), slow_heavy(), burst(), dual_overlap()};
}

const Scenario& scenario(const std::string& name) {
  static const std::vector<Scenario> suite = scenario_suite();
  auto it = std::find_if(suite.begin(), suite.end(),
                         [&](const Scenario& s) { return s.name == name; });
  if (it == suite.end()) {
    throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + name + "'");
  }
  return *it;
}

}  // namespace tmc::simgen
