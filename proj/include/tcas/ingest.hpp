#pragma once

// Raw touch events -> swipes.
//
// Canonical raw-event CSV (UTF-8, header required):
//   user_id,device,session,action,timestamp_ms,x,y,touch_major,touch_minor
// Segmented output appends `swipe_id`, dense per user in time order.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tcas/types.hpp"

namespace tcas::ingest {

enum class Action { down, move, up };

std::string_view to_string(Action a);

struct TouchEvent {
  double x = 0;
  double y = 0;
  std::int64_t t = 0;  // ms
  double major = 0;    // fingertip major axis, px
  double minor = 0;    // fingertip minor axis, px
  Action action = Action::move;

  bool operator==(const TouchEvent&) const = default;
};

/// All events of one (user, device, session), ordered by timestamp.
struct EventStream {
  std::string user;
  Device device = Device::phone;
  std::string session;
  std::vector<TouchEvent> events;
};

/// Remaps canonical column names to the column names of a foreign layout.
/// Unmapped canonical columns are looked up under their own name.
struct ColumnMap {
  std::map<std::string, std::string> canonical_to_source;
  std::string source_name(const std::string& canonical) const;
};

extern const std::vector<std::string> kEventColumns;

/// Reads canonical (or remapped) rows and groups them by (user, device,
/// session). Groups come out in key order; events are stably sorted by time.
/// Throws SchemaError on missing/extra columns and ValueError on bad fields,
/// both carrying the offending line number.
std::vector<EventStream> parse_events(std::istream& in,
                                      const ColumnMap& columns = {});

struct Swipe {
  std::string user;
  Device device = Device::phone;
  std::string session;
  int id = -1;
  std::vector<TouchEvent> events;

  std::size_t size() const noexcept { return events.size(); }
  std::int64_t t_start() const { return events.front().t; }
  std::int64_t t_end() const { return events.back().t; }
};

struct SegmentationReport {
  std::size_t swipes = 0;
  std::size_t orphan_events = 0;         // move/up seen before any down
  std::size_t overlapping_downs = 0;     // down while a swipe is open
  std::size_t duplicate_timestamps = 0;  // later event of an equal-t pair
  std::size_t unterminated = 0;          // stream ended inside a swipe

  SegmentationReport& operator+=(const SegmentationReport& o);
};

struct Segmentation {
  std::vector<Swipe> swipes;
  SegmentationReport report;
};

/// Each down..up span becomes one swipe. Lenient: every anomaly is discarded
/// and counted rather than raised.
Segmentation segment_swipes(const EventStream& stream);

struct TapFilterResult {
  std::vector<Swipe> kept;
  std::size_t removed_count = 0;
  double removed_fraction = 0;
};

/// Keeps swipes with at least `min_points` events.
TapFilterResult filter_taps(std::vector<Swipe> swipes,
                            std::size_t min_points = 6);

struct Dataset {
  std::string id;
  Device device = Device::phone;
  std::map<std::string, std::vector<Swipe>> users;

  std::size_t swipe_count() const;
};

/// Groups swipes of one device by user and assigns dense per-user swipe ids in
/// time order (start timestamp, then session).
Dataset assemble_dataset(std::vector<Swipe> swipes, Device device,
                         std::string id = "primary");

/// Throws DataError unless events run down..up with strictly increasing t.
void validate(const Swipe& s);

void write_events_csv(std::ostream& out, const Dataset& ds);
void write_swipes_csv(std::ostream& out, const Dataset& ds);

/// Reads a segmented-swipe CSV back; swipe ids are taken from the file.
Dataset read_swipes_csv(std::istream& in, std::string id = "primary");

struct SynthConfig {
  std::size_t n_users = 20;
  std::size_t swipes_per_user = 200;
  Device device = Device::phone;
  std::uint64_t seed = 7;
};

/// Desk-scale substitute for the gated datasets: each user gets a latent
/// style (speed, curvature, finger size, duration, preferred direction and
/// screen region) drawn from a seeded master distribution.
Dataset synth_dataset(const SynthConfig& cfg);

}  // namespace tcas::ingest
