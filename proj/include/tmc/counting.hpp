#pragma once

#include <string>
#include <vector>

#include "tmc/counting_params.hpp"
#include "tmc/ingest.hpp"
#include "tmc/intersection.hpp"
#include "tmc/tmc_table.hpp"

namespace tmc::counting {

/// Timestamps closer than this are treated as equal when comparing gaps to
/// thresholds; UNIX-second doubles carry ~2.4e-7 s of rounding.
inline constexpr double kTimeEpsilon = 1e-6;

struct ZoneTrigger {
  std::string zone_id;
  double t = 0.0;
  double detection_length = 0.0;
  std::string frame_id;

  bool operator==(const ZoneTrigger&) const = default;
};

/// Time-ordered triggers of one zone.
struct ZoneSeries {
  std::string zone_id;
  std::vector<ZoneTrigger> triggers;
};

struct MovementEvent {
  intersection::Approach approach = intersection::Approach::NB;
  intersection::Movement movement = intersection::Movement::Thru;
  double t = 0.0;  ///< first trigger of the cluster
  int vehicle_class = 0;
  double representative_length = 0.0;
  std::string zone_id;

  bool operator==(const MovementEvent&) const = default;
};

/// One series per zone, in config order. A detection triggers a zone when its
/// centroid lies inside and at least one of the zone's bindings is
/// permissible at the frame time.
std::vector<ZoneSeries> extract_triggers(const ingest::NedStream& stream,
                                         const intersection::IntersectionConfig& cfg);

/// Greedy per-zone clustering of ingress triggers into vehicles. Egress zones
/// are skipped; use count_rights_from_egress for right-turn surrogates.
std::vector<MovementEvent> cluster_triggers(const std::vector<ZoneSeries>& series,
                                            const intersection::IntersectionConfig& cfg,
                                            const CountingParams& params);

/// Right-turn counts from surrogate egress zones. Throws
/// Error(MisconfiguredSurrogate) if a surrogate binds anything but a single
/// right turn.
std::vector<MovementEvent> count_rights_from_egress(
    const std::vector<ZoneSeries>& series, const intersection::IntersectionConfig& cfg,
    const CountingParams& params);

/// Ingress and surrogate events merged in (t, zone order) order.
std::vector<MovementEvent> count_events(const ingest::NedStream& stream,
                                        const intersection::IntersectionConfig& cfg,
                                        const CountingParams& params);

report::TmcTable estimate_tmc(const std::vector<MovementEvent>& events, double bin_seconds,
                              double session_start, double session_end, int num_classes = 6);

/// CSV `t,approach,movement,class,length`.
std::string events_to_csv(const std::vector<MovementEvent>& events);

}  // namespace tmc::counting
