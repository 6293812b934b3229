#include "tcas/ingest.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <tuple>

#include "tcas/csv.hpp"
#include "tcas/errors.hpp"

namespace tcas::ingest {

const std::vector<std::string> kEventColumns = {
    "user_id", "device", "session",     "action",     "timestamp_ms",
    "x",       "y",      "touch_major", "touch_minor"};

std::string_view to_string(Action a) {
  switch (a) {
    case Action::down: return "down";
    case Action::move: return "move";
    case Action::up: return "up";
  }
  return "move";
}

std::string ColumnMap::source_name(const std::string& canonical) const {
  auto it = canonical_to_source.find(canonical);
  return it == canonical_to_source.end() ? canonical : it->second;
}

SegmentationReport& SegmentationReport::operator+=(const SegmentationReport& o) {
  swipes += o.swipes;
  orphan_events += o.orphan_events;
  overlapping_downs += o.overlapping_downs;
  duplicate_timestamps += o.duplicate_timestamps;
  unterminated += o.unterminated;
  return *this;
}

std::size_t Dataset::swipe_count() const {
  std::size_t n = 0;
  for (const auto& [_, s] : users) n += s.size();
  return n;
}

namespace {

Action parse_action(const std::string& s, std::size_t line) {
  if (s == "down") return Action::down;
  if (s == "move") return Action::move;
  if (s == "up") return Action::up;
  throw ValueError(line, "invalid action '" + s + "' (expected down|move|up)");
}

Device parse_device_field(const std::string& s, std::size_t line) {
  if (s == "phone") return Device::phone;
  if (s == "tablet") return Device::tablet;
  throw ValueError(line, "invalid device '" + s + "' (expected phone|tablet)");
}

// Maps header positions to canonical column indices; -1 for ignored columns.
std::vector<int> resolve_header(const std::vector<std::string>& header,
                                const std::vector<std::string>& canonical,
                                const ColumnMap& columns, bool allow_extra,
                                std::size_t line) {
  std::vector<int> slot(header.size(), -1);
  for (std::size_t c = 0; c < canonical.size(); ++c) {
    const std::string src = columns.source_name(canonical[c]);
    auto it = std::find(header.begin(), header.end(), src);
    if (it == header.end())
      throw SchemaError(line, "missing column '" + src + "'");
    auto pos = static_cast<std::size_t>(it - header.begin());
    if (slot[pos] != -1)
      throw SchemaError(line, "column '" + src + "' mapped twice");
    slot[pos] = static_cast<int>(c);
  }
  if (!allow_extra) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (slot[i] == -1)
        throw SchemaError(line, "unexpected column '" + header[i] + "'");
  }
  return slot;
}

struct Row {
  std::string user;
  Device device;
  std::string session;
  TouchEvent ev;
  std::int64_t swipe_id = -1;
};

Row parse_row(const std::vector<std::string>& fields,
              const std::vector<int>& slot, std::size_t n_canonical,
              const std::vector<std::string>& names, std::size_t line) {
  if (fields.size() != slot.size())
    throw SchemaError(line, "expected " + std::to_string(slot.size()) +
                                " fields, found " + std::to_string(fields.size()));
  std::vector<const std::string*> v(n_canonical, nullptr);
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (slot[i] >= 0) v[static_cast<std::size_t>(slot[i])] = &fields[i];

  Row r;
  r.user = *v[0];
  if (r.user.empty()) throw ValueError(line, "empty user_id");
  r.device = parse_device_field(*v[1], line);
  r.session = *v[2];
  r.ev.action = parse_action(*v[3], line);
  r.ev.t = csv::parse_int(*v[4], line, names[4]);
  r.ev.x = csv::parse_double(*v[5], line, names[5]);
  r.ev.y = csv::parse_double(*v[6], line, names[6]);
  r.ev.major = csv::parse_double(*v[7], line, names[7]);
  r.ev.minor = csv::parse_double(*v[8], line, names[8]);
  if (r.ev.major < 0 || r.ev.minor < 0)
    throw ValueError(line, "negative fingertip axis");
  if (n_canonical > 9) r.swipe_id = csv::parse_int(*v[9], line, names[9]);
  return r;
}

}  // namespace

std::vector<EventStream> parse_events(std::istream& in, const ColumnMap& columns) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError(1, "missing header");
  const bool remapped = !columns.canonical_to_source.empty();
  auto slot = resolve_header(fields, kEventColumns, columns, remapped, reader.line());

  using Key = std::tuple<std::string, Device, std::string>;
  std::map<Key, EventStream> groups;
  while (reader.next(fields)) {
    Row r = parse_row(fields, slot, kEventColumns.size(), kEventColumns, reader.line());
    auto& g = groups[Key{r.user, r.device, r.session}];
    if (g.events.empty()) {
      g.user = r.user;
      g.device = r.device;
      g.session = r.session;
    }
    g.events.push_back(r.ev);
  }

  std::vector<EventStream> out;
  out.reserve(groups.size());
  for (auto& [_, g] : groups) {
    std::stable_sort(g.events.begin(), g.events.end(),
                     [](const TouchEvent& a, const TouchEvent& b) { return a.t < b.t; });
    out.push_back(std::move(g));
  }
  return out;
}

Segmentation segment_swipes(const EventStream& stream) {
  Segmentation seg;
  auto& rep = seg.report;
  std::optional<Swipe> cur;

  auto close = [&] {
    seg.swipes.push_back(std::move(*cur));
    cur.reset();
  };

  for (const TouchEvent& e : stream.events) {
    if (!cur) {
      if (e.action != Action::down) {
        ++rep.orphan_events;
        continue;
      }
      cur.emplace();
      cur->user = stream.user;
      cur->device = stream.device;
      cur->session = stream.session;
      cur->events.push_back(e);
      continue;
    }
    if (e.t <= cur->events.back().t) {
      ++rep.duplicate_timestamps;
      if (e.action == Action::up) {
        // The finger lifted at a timestamp we already hold: end there.
        if (cur->events.size() >= 2) {
          cur->events.back().action = Action::up;
          close();
        } else {
          cur.reset();
        }
      }
      continue;
    }
    if (e.action == Action::down) {
      ++rep.overlapping_downs;
      continue;
    }
    cur->events.push_back(e);
    if (e.action == Action::up) close();
  }
  if (cur) ++rep.unterminated;
  rep.swipes = seg.swipes.size();
  return seg;
}

TapFilterResult filter_taps(std::vector<Swipe> swipes, std::size_t min_points) {
  if (min_points < 1) throw ConfigError("min_points must be >= 1");
  TapFilterResult r;
  const std::size_t total = swipes.size();
  for (auto& s : swipes) {
    if (s.size() >= min_points)
      r.kept.push_back(std::move(s));
    else
      ++r.removed_count;
  }
  r.removed_fraction = total == 0 ? 0.0 : static_cast<double>(r.removed_count) /
                                               static_cast<double>(total);
  return r;
}

void validate(const Swipe& s) {
  if (s.events.size() < 2) throw DataError("swipe has fewer than 2 events");
  if (s.events.front().action != Action::down ||
      s.events.back().action != Action::up)
    throw DataError("swipe of user " + s.user + " does not run down..up");
  for (std::size_t i = 1; i < s.events.size(); ++i)
    if (s.events[i].t <= s.events[i - 1].t)
      throw DataError("swipe of user " + s.user +
                      " has non-increasing timestamps");
}

Dataset assemble_dataset(std::vector<Swipe> swipes, Device device, std::string id) {
  Dataset ds;
  ds.id = std::move(id);
  ds.device = device;
  for (auto& s : swipes) {
    if (s.device != device) continue;
    validate(s);
    ds.users[s.user].push_back(std::move(s));
  }
  for (auto& [_, list] : ds.users) {
    std::stable_sort(list.begin(), list.end(), [](const Swipe& a, const Swipe& b) {
      return std::tie(a.events.front().t, a.session) <
             std::tie(b.events.front().t, b.session);
    });
    for (std::size_t i = 0; i < list.size(); ++i) list[i].id = static_cast<int>(i);
  }
  return ds;
}

namespace {

void write_csv(std::ostream& out, const Dataset& ds, bool with_id) {
  for (std::size_t i = 0; i < kEventColumns.size(); ++i)
    out << (i ? "," : "") << kEventColumns[i];
  if (with_id) out << ",swipe_id";
  out << '\n';
  for (const auto& [user, list] : ds.users) {
    for (const Swipe& s : list) {
      for (const TouchEvent& e : s.events) {
        out << user << ',' << to_string(s.device) << ',' << s.session << ','
            << to_string(e.action) << ',' << e.t << ',' << csv::format(e.x) << ','
            << csv::format(e.y) << ',' << csv::format(e.major) << ','
            << csv::format(e.minor);
        if (with_id) out << ',' << s.id;
        out << '\n';
      }
    }
  }
}

}  // namespace

void write_events_csv(std::ostream& out, const Dataset& ds) { write_csv(out, ds, false); }
void write_swipes_csv(std::ostream& out, const Dataset& ds) { write_csv(out, ds, true); }

Dataset read_swipes_csv(std::istream& in, std::string id) {
  std::vector<std::string> names = kEventColumns;
  names.push_back("swipe_id");
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError(1, "missing header");
  auto slot = resolve_header(fields, names, {}, false, reader.line());

  Dataset ds;
  ds.id = std::move(id);
  bool have_device = false;
  std::map<std::pair<std::string, std::int64_t>, Swipe> swipes;
  while (reader.next(fields)) {
    Row r = parse_row(fields, slot, names.size(), names, reader.line());
    if (!have_device) {
      ds.device = r.device;
      have_device = true;
    } else if (r.device != ds.device) {
      throw ValueError(reader.line(), "mixed devices in one swipe file");
    }
    auto& s = swipes[{r.user, r.swipe_id}];
    if (s.events.empty()) {
      s.user = r.user;
      s.device = r.device;
      s.session = r.session;
      s.id = static_cast<int>(r.swipe_id);
    }
    s.events.push_back(r.ev);
  }
  for (auto& [key, s] : swipes) {
    validate(s);
    ds.users[key.first].push_back(std::move(s));
  }
  return ds;
}

}  // namespace tcas::ingest
