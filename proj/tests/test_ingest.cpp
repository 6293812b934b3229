#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "support.hpp"
#include "tcas/errors.hpp"
#include "tcas/ingest.hpp"

using namespace tcas;
using namespace tcas::ingest;

namespace {

const char* kHeader = "user_id,device,session,action,timestamp_ms,x,y,touch_major,touch_minor\n";

std::string row(const std::string& u, const std::string& s, const std::string& a, long t,
                double x = 1, double y = 2) {
  std::ostringstream o;
  o << u << ",phone," << s << ',' << a << ',' << t << ',' << x << ',' << y << ",3,4\n";
  return o.str();
}

EventStream stream_of(const std::vector<std::pair<Action, long>>& seq) {
  EventStream s;
  s.user = "u";
  for (auto [a, t] : seq) s.events.push_back({static_cast<double>(t), 0.0, t, 1, 1, a});
  return s;
}

}  // namespace

TEST(ParseEvents, ThreeRowsFormOneOrderedGroup) {
  std::istringstream in(std::string(kHeader) + row("u1", "s", "move", 20) + row("u1", "s", "down", 10) +
                        row("u1", "s", "up", 30));
  const auto g = parse_events(in);
  ASSERT_EQ(g.size(), 1u);
  ASSERT_EQ(g[0].events.size(), 3u);
  EXPECT_EQ(g[0].events[0].t, 10);
  EXPECT_EQ(g[0].events[1].t, 20);
  EXPECT_EQ(g[0].events[2].t, 30);
  EXPECT_EQ(g[0].events[0].major, 3);
}

TEST(ParseEvents, BadActionNamesTheLine) {
  std::istringstream in(std::string(kHeader) + row("u1", "s", "down", 10) + row("u1", "s", "tap", 20));
  try {
    parse_events(in);
    FAIL() << "expected ValueError";
  } catch (const ValueError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParseEvents, NonNumericTimestampIsValueError) {
  std::istringstream in(std::string(kHeader) + "u1,phone,s,down,abc,1,2,3,4\n");
  EXPECT_THROW(parse_events(in), ValueError);
}

TEST(ParseEvents, MissingAndExtraColumnsAreSchemaErrors) {
  std::istringstream missing("user_id,device,session,action,timestamp_ms,x,y,touch_major\n");
  EXPECT_THROW(parse_events(missing), SchemaError);
  std::istringstream extra(
      "user_id,device,session,action,timestamp_ms,x,y,touch_major,touch_minor,pressure\n");
  EXPECT_THROW(parse_events(extra), SchemaError);
}

TEST(ParseEvents, ColumnRemapReadsForeignLayout) {
  std::istringstream in("uid,device,session,action,ts,x,y,touch_major,touch_minor\n"
                        "a,phone,1,down,5,0,0,1,1\n");
  ColumnMap m;
  m.canonical_to_source = {{"user_id", "uid"}, {"timestamp_ms", "ts"}};
  const auto g = parse_events(in, m);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].user, "a");
  EXPECT_EQ(g[0].events[0].t, 5);
}

TEST(ParseEvents, ShuffledRowsMatchSortAndGroupOracle) {
  std::mt19937_64 rng(11);
  struct Rec {
    std::string user, session;
    long t;
    double x;
  };
  std::vector<Rec> recs;
  std::uniform_int_distribution<long> t(0, 1'000'000);
  std::uniform_int_distribution<int> sess(0, 2);
  for (int i = 0; i < 1000; ++i)
    recs.push_back({i % 2 ? "u1" : "u2", "s" + std::to_string(sess(rng)), t(rng), static_cast<double>(i)});
  std::shuffle(recs.begin(), recs.end(), rng);
  std::string text = kHeader;
  for (const auto& r : recs) text += row(r.user, r.session, "move", r.t, r.x);
  std::istringstream in(text);
  const auto groups = parse_events(in);

  // Oracle: stable sort by (user, session, t) from the shuffled input order.
  auto oracle = recs;
  std::stable_sort(oracle.begin(), oracle.end(), [](const Rec& a, const Rec& b) {
    return std::tie(a.user, a.session, a.t) < std::tie(b.user, b.session, b.t);
  });
  std::size_t k = 0;
  for (const auto& g : groups)
    for (const auto& e : g.events) {
      ASSERT_LT(k, oracle.size());
      EXPECT_EQ(g.user, oracle[k].user);
      EXPECT_EQ(g.session, oracle[k].session);
      EXPECT_EQ(e.t, oracle[k].t);
      EXPECT_EQ(e.x, oracle[k].x);
      ++k;
    }
  EXPECT_EQ(k, oracle.size());
}

TEST(SegmentSwipes, DownMoveMoveUpIsOneSwipe) {
  const auto s = segment_swipes(stream_of({{Action::down, 1}, {Action::move, 2}, {Action::move, 3}, {Action::up, 4}}));
  ASSERT_EQ(s.swipes.size(), 1u);
  EXPECT_EQ(s.swipes[0].size(), 4u);
}

TEST(SegmentSwipes, TwoSwipes) {
  const auto s = segment_swipes(stream_of(
      {{Action::down, 1}, {Action::move, 2}, {Action::move, 3}, {Action::up, 4}, {Action::down, 5}, {Action::up, 6}}));
  ASSERT_EQ(s.swipes.size(), 2u);
  EXPECT_EQ(s.swipes[0].size(), 4u);
  EXPECT_EQ(s.swipes[1].size(), 2u);
}

TEST(SegmentSwipes, OrphansAreCountedAndDropped) {
  const auto s = segment_swipes(stream_of({{Action::move, 1}, {Action::up, 2}, {Action::down, 3}, {Action::up, 4}}));
  EXPECT_EQ(s.swipes.size(), 1u);
  EXPECT_EQ(s.report.orphan_events, 2u);
}

TEST(SegmentSwipes, DuplicateTimestampDropsLaterEvent) {
  const auto s = segment_swipes(stream_of({{Action::down, 1}, {Action::move, 2}, {Action::move, 2}, {Action::up, 3}}));
  ASSERT_EQ(s.swipes.size(), 1u);
  EXPECT_EQ(s.swipes[0].size(), 3u);
  EXPECT_EQ(s.report.duplicate_timestamps, 1u);
  for (const auto& sw : s.swipes) EXPECT_NO_THROW(validate(sw));
}

TEST(SegmentSwipes, OverlappingDownIsCounted) {
  const auto s = segment_swipes(stream_of({{Action::down, 1}, {Action::down, 2}, {Action::move, 3}, {Action::up, 4}}));
  ASSERT_EQ(s.swipes.size(), 1u);
  EXPECT_EQ(s.report.overlapping_downs, 1u);
}

TEST(SegmentSwipes, CountMatchesLinearScanOracle) {
  std::mt19937_64 rng(5);
  std::vector<std::pair<Action, long>> seq;
  std::vector<int> downs(500, 0);
  std::vector<int> positions(499);
  std::iota(positions.begin(), positions.end(), 1);
  std::shuffle(positions.begin(), positions.end(), rng);
  downs[0] = 1;
  for (int i = 0; i < 29; ++i) downs[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])] = 1;
  for (int i = 0; i < 500; ++i) {
    Action a = downs[static_cast<std::size_t>(i)] ? Action::down
               : (i + 1 == 500 || downs[static_cast<std::size_t>(i + 1)]) ? Action::up
                                                                           : Action::move;
    seq.push_back({a, i * 10L});
  }
  // Oracle: every down followed (before the next down) by an up closes a swipe.
  int oracle = 0;
  bool open = false;
  for (auto [a, t] : seq) {
    if (a == Action::down) open = true;
    else if (a == Action::up && open) {
      ++oracle;
      open = false;
    }
  }
  EXPECT_GT(oracle, 20);
  EXPECT_EQ(static_cast<int>(segment_swipes(stream_of(seq)).swipes.size()), oracle);
}

TEST(FilterTaps, KeepsOnlyLongSwipes) {
  std::vector<Swipe> sw;
  for (int i = 0; i < 10; ++i) {
    Swipe s;
    s.events.resize(10);
    sw.push_back(s);
  }
  const auto r = filter_taps(sw, 6);
  EXPECT_EQ(r.removed_count, 0u);
  EXPECT_EQ(r.kept.size(), 10u);
}

TEST(FilterTaps, MatchesBruteForceCount) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(3, 12);
  std::vector<Swipe> sw(1000);
  std::size_t short_count = 0;
  for (auto& s : sw) {
    s.events.resize(static_cast<std::size_t>(len(rng)));
    short_count += s.events.size() < 6;
  }
  const auto r = filter_taps(sw, 6);
  EXPECT_EQ(r.removed_count, short_count);
  EXPECT_DOUBLE_EQ(r.removed_fraction, static_cast<double>(short_count) / 1000.0);
  for (const auto& s : r.kept) EXPECT_GE(s.size(), 6u);
  EXPECT_EQ(filter_taps(r.kept, 6).removed_count, 0u);
}

TEST(FilterTaps, ZeroMinPointsIsConfigError) {
  EXPECT_THROW(filter_taps({}, 0), ConfigError);
}

TEST(Synth, DeterministicForFixedSeed) {
  SynthConfig c{2, 20, Device::phone, 7};
  std::ostringstream a, b;
  write_events_csv(a, synth_dataset(c));
  write_events_csv(b, synth_dataset(c));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Synth, RejectsSingleUserAndShortRuns) {
  EXPECT_THROW(synth_dataset({1, 20, Device::phone, 7}), ConfigError);
  EXPECT_THROW(synth_dataset({2, 19, Device::phone, 7}), ConfigError);
}

TEST(Synth, SwipesSatisfyInvariants) {
  const auto ds = synth_dataset({3, 30, Device::tablet, 1});
  EXPECT_EQ(ds.users.size(), 3u);
  for (const auto& [u, swipes] : ds.users) {
    EXPECT_EQ(swipes.size(), 30u);
    for (std::size_t i = 0; i < swipes.size(); ++i) {
      EXPECT_NO_THROW(validate(swipes[i]));
      EXPECT_GE(swipes[i].size(), 6u);
      EXPECT_LE(swipes[i].size(), 60u);
      EXPECT_EQ(swipes[i].id, static_cast<int>(i));
      EXPECT_EQ(swipes[i].device, Device::tablet);
    }
  }
}

TEST(RoundTrip, SegmentationIsIdempotentUnderReserialization) {
  const auto ds = synth_dataset({3, 20, Device::phone, 9});
  std::ostringstream first;
  write_events_csv(first, ds);

  auto reparse = [](const std::string& text) {
    std::istringstream in(text);
    std::vector<Swipe> all;
    for (const auto& s : parse_events(in)) {
      auto seg = segment_swipes(s);
      for (auto& sw : seg.swipes) all.push_back(std::move(sw));
    }
    return assemble_dataset(filter_taps(std::move(all)).kept, Device::phone, "x");
  };
  const auto once = reparse(first.str());
  std::ostringstream second;
  write_events_csv(second, once);
  EXPECT_EQ(first.str(), second.str());
  const auto twice = reparse(second.str());
  std::ostringstream third;
  write_events_csv(third, twice);
  EXPECT_EQ(second.str(), third.str());
}

TEST(RoundTrip, SwipeCsvKeepsIds) {
  const auto ds = synth_dataset({2, 20, Device::phone, 4});
  std::ostringstream out;
  write_swipes_csv(out, ds);
  EXPECT_NE(out.str().find("swipe_id"), std::string::npos);
  std::istringstream in(out.str());
  const auto back = read_swipes_csv(in);
  std::ostringstream again;
  write_swipes_csv(again, back);
  EXPECT_EQ(out.str(), again.str());
}
