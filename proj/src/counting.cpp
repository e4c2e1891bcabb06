#include "tmc/counting.hpp"

#include <algorithm>
#include <optional>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::counting {

using intersection::Binding;
using intersection::IntersectionConfig;
using intersection::Zone;
using intersection::ZoneKind;

namespace {

struct Cluster {
  double first_t;
  double last_t;
  std::string last_frame;
  double max_length;
};

bool any_permissible(const Zone& z, double t, const intersection::PhaseSchedule& s) {
  return std::any_of(z.bindings.begin(), z.bindings.end(), [&](const Binding& b) {
    return intersection::permissible(b.approach, b.movement, t, s);
  });
}

MovementEvent make_event(const Zone& z, const Cluster& c, const IntersectionConfig& cfg) {
  const Binding* label = nullptr;
  for (const auto& b : z.bindings) {
    if (intersection::permissible(b.approach, b.movement, c.first_t, cfg.schedule)) {
      label = &b;
      break;
    }
  }
  if (label == nullptr) {
    label = &z.bindings.front();
  }
  return {label->approach,
          label->movement,
          c.first_t,
          cfg.classes.classify(c.max_length).id,
          c.max_length,
          z.id};
}

// Greedy single pass over one zone's time-ordered triggers.
std::vector<MovementEvent> cluster_zone(const Zone& z, const std::vector<ZoneTrigger>& triggers,
                                        double min_headway, const CountingParams& params,
                                        const IntersectionConfig& cfg) {
  std::vector<MovementEvent> events;
  std::optional<Cluster> cur;
  for (const auto& trig : triggers) {
    if (!cur) {
      cur = Cluster{trig.t, trig.t, trig.frame_id, trig.detection_length};
      continue;
    }
    const double gap = trig.t - cur->last_t;
    bool join = gap <= kTimeEpsilon || gap < params.cluster_gap - kTimeEpsilon ||
                (trig.frame_id != cur->last_frame && gap < params.dedup_window - kTimeEpsilon);
    if (!join && params.absorb && gap < min_headway - kTimeEpsilon) {
      join = true;
    }
    if (join) {
      cur->last_t = std::max(cur->last_t, trig.t);
      cur->last_frame = trig.frame_id;
      cur->max_length = std::max(cur->max_length, trig.detection_length);
    } else {
      events.push_back(make_event(z, *cur, cfg));
      cur = Cluster{trig.t, trig.t, trig.frame_id, trig.detection_length};
    }
  }
  if (cur) {
    events.push_back(make_event(z, *cur, cfg));
  }
  return events;
}

void sort_events(std::vector<MovementEvent>& events, const IntersectionConfig& cfg) {
  auto zone_rank = [&](const std::string& id) {
    for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
      if (cfg.zones[i].id == id) {
        return i;
      }
    }
    return cfg.zones.size();
  };
  std::stable_sort(events.begin(), events.end(), [&](const auto& a, const auto& b) {
    if (a.t != b.t) {
      return a.t < b.t;
    }
    return zone_rank(a.zone_id) < zone_rank(b.zone_id);
  });
}

}  // namespace

std::vector<ZoneSeries> extract_triggers(const ingest::NedStream& stream,
                                         const IntersectionConfig& cfg) {
  std::vector<ZoneSeries> out;
  out.reserve(cfg.zones.size());
  for (const auto& z : cfg.zones) {
    out.push_back({z.id, {}});
  }
  for (const auto& frame : stream.frames) {
    for (const auto& det : frame.detections) {
      for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
        const Zone& z = cfg.zones[i];
        if (intersection::point_in_zone(det.center, z) &&
            any_permissible(z, frame.t, cfg.schedule)) {
          out[i].triggers.push_back({z.id, frame.t, det.length, det.frame_id});
        }
      }
    }
  }
  return out;
}

std::vector<MovementEvent> cluster_triggers(const std::vector<ZoneSeries>& series,
                                            const IntersectionConfig& cfg,
                                            const CountingParams& params) {
  params.validate();
  std::vector<MovementEvent> events;
  for (const auto& s : series) {
    const Zone& z = cfg.zone(s.zone_id);
    if (z.kind != ZoneKind::Ingress) {
      continue;
    }
    const double headway = z.right_bound() ? params.min_headway_right : params.min_headway_other;
    auto zone_events = cluster_zone(z, s.triggers, headway, params, cfg);
    events.insert(events.end(), zone_events.begin(), zone_events.end());
  }
  sort_events(events, cfg);
  return events;
}

std::vector<MovementEvent> count_rights_from_egress(const std::vector<ZoneSeries>& series,
                                                    const IntersectionConfig& cfg,
                                                    const CountingParams& params) {
  params.validate();
  std::vector<MovementEvent> events;
  for (const auto& s : series) {
    const Zone& z = cfg.zone(s.zone_id);
    if (z.kind != ZoneKind::Egress || !z.right_surrogate) {
      continue;
    }
    if (z.bindings.size() != 1 || z.bindings.front().movement != intersection::Movement::Right) {
      throw Error(ErrorKind::MisconfiguredSurrogate,
                  "egress zone '" + z.id +
                      "' must bind exactly one right turn to serve as a surrogate");
    }
    auto zone_events = cluster_zone(z, s.triggers, params.min_headway_right, params, cfg);
    events.insert(events.end(), zone_events.begin(), zone_events.end());
  }
  sort_events(events, cfg);
  return events;
}

std::vector<MovementEvent> count_events(const ingest::NedStream& stream,
                                        const IntersectionConfig& cfg,
                                        const CountingParams& params) {
  const auto series = extract_triggers(stream, cfg);
  auto events = cluster_triggers(series, cfg, params);
  auto rights = count_rights_from_egress(series, cfg, params);
  events.insert(events.end(), rights.begin(), rights.end());
  sort_events(events, cfg);
  return events;
}

report::TmcTable estimate_tmc(const std::vector<MovementEvent>& events, double bin_seconds,
                              double session_start, double session_end, int num_classes) {
  report::TmcTable table(bin_seconds, session_start, session_end, num_classes);
  for (const auto& e : events) {
    table.add(table.bin_of(e.t), e.approach, e.movement, e.vehicle_class);
  }
  return table;
}

std::string events_to_csv(const std::vector<MovementEvent>& events) {
  std::string out = "t,approach,movement,class,length\n";
  for (const auto& e : events) {
    out += text::format_double(e.t);
    out += ',';
    out += intersection::to_string(e.approach);
    out += ',';
    out += intersection::to_string(e.movement);
    out += ',' + std::to_string(e.vehicle_class) + ',' + text::format_double(e.representative_length) +
           '\n';
  }
  return out;
}

}  // namespace tmc::counting
