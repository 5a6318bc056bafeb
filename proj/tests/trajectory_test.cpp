#include <map>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "wzmap/error.hpp"
#include "wzmap/trajectory.hpp"

namespace wzmap {
namespace {

const WorkZoneLayout& DefaultLayout() {
  static const WorkZoneLayout layout = BuildLayout(WorkZoneSpec{});
  return layout;
}

TEST(Synthesize, ZeroTrajectories) {
  SynthesisParams p;
  p.n = 0;
  EXPECT_TRUE(Synthesize(DefaultLayout(), p).empty());
}

TEST(Synthesize, NoNoiseFollowsNominal) {
  SynthesisParams p;
  p.n = 4;
  p.lateral_sigma = 0.0;
  const auto trajs = Synthesize(DefaultLayout(), p);
  ASSERT_EQ(trajs.size(), 4u);
  for (const auto& t : trajs) {
    ASSERT_EQ(t.points.size(), trajs[0].points.size());
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      EXPECT_EQ(t.points[i].p, trajs[0].points[i].p);
      const double y = NominalLateral(DefaultLayout(), p.merge_lead, t.points[i].p.x());
      EXPECT_NEAR(t.points[i].p.y(), y, 1e-3);
    }
  }
}

TEST(Synthesize, NoisyPointsStayDrivable) {
  SynthesisParams p;
  p.n = 5;
  p.lateral_sigma = 0.3;
  for (const auto& t : Synthesize(DefaultLayout(), p)) {
    for (const auto& pt : t.points) {
      EXPECT_NE(oracle::WindingNumber(DefaultLayout().drivable_polygon, pt.p), 0)
          << t.vehicle_id << " " << pt.p.transpose();
    }
  }
}

TEST(Synthesize, SpacingAndTime) {
  SynthesisParams p;
  p.n = 3;
  const auto trajs = Synthesize(DefaultLayout(), p);
  for (const auto& t : trajs) {
    for (std::size_t i = 1; i < t.points.size(); ++i) {
      const double d = (t.points[i].p - t.points[i - 1].p).norm();
      EXPECT_GE(d, 0.5 * p.step);
      EXPECT_LE(d, 1.5 * p.step);
      EXPECT_GT(t.points[i].t, t.points[i - 1].t);
    }
  }
}

TEST(Synthesize, Reproducible) {
  SynthesisParams p;
  p.n = 3;
  const auto a = Synthesize(DefaultLayout(), p);
  const auto b = Synthesize(DefaultLayout(), p);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].vehicle_id, b[i].vehicle_id);
    EXPECT_EQ(Flatten({a[i]}), Flatten({b[i]}));
  }
  p.seed += 1;
  EXPECT_NE(Flatten(Synthesize(DefaultLayout(), p)), Flatten(a));
}

TEST(TrajectoryCsv, RoundTrip) {
  SynthesisParams p;
  p.n = 3;
  const auto trajs = Synthesize(DefaultLayout(), p);
  const auto file = testutil::ScratchDir() / "t.csv";
  SaveTrajectoriesCsv(trajs, file);
  const auto back = LoadTrajectoriesCsv(file);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].vehicle_id, trajs[i].vehicle_id);
    ASSERT_EQ(back[i].points.size(), trajs[i].points.size());
    for (std::size_t j = 0; j < back[i].points.size(); ++j) {
      EXPECT_NEAR((back[i].points[j].p - trajs[i].points[j].p).norm(), 0.0, 1e-6);
      EXPECT_NEAR(back[i].points[j].t, trajs[i].points[j].t, 1e-6);
    }
  }
}

TEST(TrajectoryCsv, MalformedRowNamesLine) {
  const auto file = testutil::ScratchDir() / "bad.csv";
  testutil::WriteText(file, "vehicle_id,t,x,y\nv1,0,1,2\na,b,c\n");
  try {
    LoadTrajectoriesCsv(file);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(TrajectoryCsv, EmptyFile) {
  const auto file = testutil::ScratchDir() / "empty.csv";
  testutil::WriteText(file, "");
  EXPECT_TRUE(LoadTrajectoriesCsv(file).empty());
}

TEST(TrajectoryCsv, MissingFile) {
  try {
    LoadTrajectoriesCsv(testutil::ScratchDir() / "nope.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

TEST(Flatten, Counts) {
  std::vector<Trajectory> trajs(5);
  for (int v = 0; v < 5; ++v) {
    for (int i = 0; i < 100; ++i) trajs[v].points.push_back({double(i), {double(i), double(v)}});
  }
  EXPECT_EQ(Flatten(trajs).rows(), 500);
  EXPECT_EQ(Flatten({}).rows(), 0);
}

TEST(Flatten, DuplicatesPreserved) {
  Trajectory t;
  t.points = {{0, {1, 2}}, {1, {3, 4}}, {2, {1, 2}}};
  const PointSet flat = Flatten({t, t});
  std::map<std::pair<double, double>, int> counts;
  for (Eigen::Index i = 0; i < flat.rows(); ++i) ++counts[{flat(i, 0), flat(i, 1)}];
  EXPECT_EQ(flat.rows(), 6);
  EXPECT_EQ((counts[{1.0, 2.0}]), 4);
  EXPECT_EQ((counts[{3.0, 4.0}]), 2);
}

}  // namespace
}  // namespace wzmap
