#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pyramid/io.hpp"
#include "test_support.hpp"

using namespace pyramid;
using nlohmann::json;

TEST(BehaviorJson, RoundTripIsExact) {
  support::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Behavior b = behavior_of_lhv(gen.lhv(4));
    std::stringstream ss;
    io::write_behavior(ss, b);
    EXPECT_EQ(io::read_behavior(ss), b);
  }
}

TEST(BehaviorJson, Layout) {
  const json j = io::behavior_to_json(Behavior::uniform());
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["scenario"], "3322");
  EXPECT_EQ(j["blocks"].size(), 9u);
  EXPECT_EQ(j["blocks"]["1,2"].size(), 4u);
  EXPECT_DOUBLE_EQ(j["blocks"]["1,2"][0].get<double>(), 0.25);
}

TEST(BehaviorJson, StructuralErrors) {
  json j = io::behavior_to_json(Behavior::uniform());
  {
    json bad = j;
    bad["blocks"].erase("2,0");
    EXPECT_THROW(io::behavior_from_json(bad), StructuralError);
  }
  {
    json bad = j;
    bad["version"] = 2;
    EXPECT_THROW(io::behavior_from_json(bad), StructuralError);
  }
  {
    json bad = j;
    bad["scenario"] = "2222";
    EXPECT_THROW(io::behavior_from_json(bad), StructuralError);
  }
  {
    json bad = j;
    bad["blocks"]["0,1"] = {0.5, 0.5, 0.0};
    EXPECT_THROW(io::behavior_from_json(bad), StructuralError);
  }
  {
    json bad = j;
    bad["blocks"]["0,1"][2] = "x";
    EXPECT_THROW(io::behavior_from_json(bad), StructuralError);
  }
  {
    json bad = j;
    bad["blocks"]["3,0"] = {0.25, 0.25, 0.25, 0.25};
    EXPECT_THROW(io::behavior_from_json(bad), StructuralError);
  }
  std::istringstream garbage("{not json");
  EXPECT_THROW(io::read_behavior(garbage), StructuralError);
}

TEST(LhvJson, RoundTrip) {
  const LocalHiddenVariableModel m = realize_sl_point({0.5, -0.25, 0.1});
  std::stringstream ss;
  io::write_lhv(ss, m);
  const LocalHiddenVariableModel back = io::read_lhv(ss);
  EXPECT_EQ(back.weights(), m.weights());
  EXPECT_EQ(back.responses(), m.responses());
}

TEST(LhvJson, RenormalisesWithinTolerance) {
  json j = {{"version", 1}, {"kind", "lhv"}, {"weights", {0.5, 0.5 + 5e-10}}, {"responses", {{1, 1, 1}, {1, -1, -1}}}};
  const auto m = io::lhv_from_json(j);
  EXPECT_DOUBLE_EQ(m.weights()[0] + m.weights()[1], 1.0);
  EXPECT_NEAR(moments_of_lhv(m).x(), 0.0, 1e-9);
}

TEST(LhvJson, Rejections) {
  const json base = {{"version", 1}, {"kind", "lhv"}, {"weights", {0.5, 0.5}}, {"responses", {{1, 1, 1}, {1, -1, -1}}}};
  {
    json bad = base;
    bad["weights"] = {0.5, 0.6};
    EXPECT_THROW(io::lhv_from_json(bad), DomainError);
  }
  {
    json bad = base;
    bad["weights"] = {-0.5, 1.5};
    EXPECT_THROW(io::lhv_from_json(bad), DomainError);
  }
  {
    json bad = base;
    bad["responses"] = {{1, 1, 1}, {1, -1, 2}};
    EXPECT_THROW(io::lhv_from_json(bad), DomainError);
  }
  {
    json bad = base;
    bad["responses"] = {{1, 1}, {1, -1, -1}};
    EXPECT_THROW(io::lhv_from_json(bad), StructuralError);
  }
  {
    json bad = base;
    bad["kind"] = "behavior";
    EXPECT_THROW(io::lhv_from_json(bad), StructuralError);
  }
}

TEST(Events, RoundTrip) {
  const auto events = sample_events(Behavior::uniform(), SettingPolicy::all_pairs_uniform(), 5000, 17);
  std::stringstream ss;
  io::write_events(ss, events, "uniform\nbehavior");
  const io::EventFile f = io::read_events(ss);
  EXPECT_EQ(f.source, "uniform behavior");
  EXPECT_EQ(f.events, events);
}

TEST(Events, AcceptsCommentsBlankLinesAndSigns) {
  std::istringstream in("# pyramid-events v1 source: hand\n\n# note\n0 1 +1 -1\r\n 2\t1 -1 -1\n");
  const io::EventFile f = io::read_events(in);
  ASSERT_EQ(f.events.size(), 2u);
  EXPECT_EQ(f.events[0], (EventRecord{0, 1, 1, -1}));
  EXPECT_EQ(f.events[1], (EventRecord{2, 1, -1, -1}));
}

TEST(Events, Rejections) {
  auto fails = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(io::read_events(in), StructuralError) << text;
  };
  fails("");
  fails("0 1 1 1\n");
  fails("# pyramid-events v1\n0 3 1 1\n");
  fails("# pyramid-events v1\n0 1 0 1\n");
  fails("# pyramid-events v1\n-1 1 1 1\n");
  fails("# pyramid-events v1\n0 1 1\n");
  fails("# pyramid-events v1\n0 1 1 1 1\n");
  fails("# pyramid-events v1\n0 1 x 1\n");
  fails("# pyramid-events v1\n0 1 1.0 1\n");
}
