#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include "generators.hpp"
#include "graspbridge/error.hpp"
#include "graspbridge/geometry.hpp"

using namespace graspbridge;
using namespace graspbridge::geometry;

namespace {

double brute_chamfer(const PointCloud& a, const PointCloud& b) {
  auto one_way = [](const PointCloud& p, const PointCloud& q) {
    double s = 0.0;
    for (const auto& x : p.points) {
      double best = INFINITY;
      for (const auto& y : q.points) best = std::min(best, (x - y).squaredNorm());
      s += best;
    }
    return s;
  };
  return one_way(a, b) + one_way(b, a);
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidInput;
}

}  // namespace

TEST(Rot6d, IdentityEncodes) {
  Rot6 r = rot6d_encode(Mat3::Identity());
  Rot6 want;
  want << 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(r, want);
}

TEST(Rot6d, QuarterTurnAboutZ) {
  Mat3 R = Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()).toRotationMatrix();
  Rot6 r = rot6d_encode(R);
  Rot6 want;
  want << 0, 1, 0, -1, 0, 0;
  EXPECT_LT((r - want).norm(), 1e-15);
}

TEST(Rot6d, RejectsNonOrthonormalAndReflections) {
  Mat3 S = Mat3::Identity() * 1.01;
  EXPECT_EQ(code_of([&] { rot6d_encode(S); }), ErrorCode::kInvalidRotation);
  Mat3 F = Mat3::Identity();
  F(2, 2) = -1.0;
  EXPECT_EQ(code_of([&] { rot6d_encode(F); }), ErrorCode::kInvalidRotation);
}

TEST(Rot6d, DecodeIdentityAndProjection) {
  Rot6 a;
  a << 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(rot6d_decode(a), Mat3::Identity());
  Rot6 b;
  b << 2, 0, 0, 1, 1, 0;
  EXPECT_LT((rot6d_decode(b) - Mat3::Identity()).norm(), 1e-15);
}

TEST(Rot6d, DecodeRejectsDegenerateSeeds) {
  Rot6 zero = Rot6::Zero();
  zero(4) = 1.0;
  EXPECT_EQ(code_of([&] { rot6d_decode(zero); }), ErrorCode::kInvalidRotation);
  Rot6 parallel;
  parallel << 1, 2, 3, 2, 4, 6;
  EXPECT_EQ(code_of([&] { rot6d_decode(parallel); }), ErrorCode::kInvalidRotation);
}

TEST(Rot6d, RoundTripRandomRotations) {
  Rng rng = make_rng(7);
  for (int k = 0; k < 200; ++k) {
    Mat3 R = gbtest::random_rotation(rng);
    EXPECT_LT((rot6d_decode(rot6d_encode(R)) - R).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rot6d, DecodeIsProperRotationForRandomSeeds) {
  Rng rng = make_rng(8);
  for (int k = 0; k < 500; ++k) {
    Rot6 r6 = gbtest::normal_vec(rng, 6);
    Mat3 R = rot6d_decode(r6);
    EXPECT_LT((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
    // Fixed point once orthonormalized.
    EXPECT_LT((rot6d_decode(rot6d_encode(R)) - R).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Chamfer, Examples) {
  PointCloud a{{Vec3(0, 0, 0)}};
  PointCloud b{{Vec3(1, 0, 0)}};
  EXPECT_DOUBLE_EQ(chamfer(a, b), 2.0);
  Rng rng = make_rng(1);
  PointCloud c = gbtest::random_cloud(rng, 40);
  EXPECT_EQ(chamfer(c, c), 0.0);
}

TEST(Chamfer, EmptyCloudIsAnError) {
  PointCloud a{{Vec3(0, 0, 0)}};
  EXPECT_EQ(code_of([&] { chamfer(a, PointCloud{}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([&] { chamfer(PointCloud{}, a); }), ErrorCode::kEmptyInput);
}

TEST(Chamfer, MatchesBruteForceAndIsSymmetric) {
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    PointCloud a = gbtest::random_cloud(rng, 50);
    PointCloud b = gbtest::random_cloud(rng, static_cast<std::size_t>(gbtest::uniform_int(rng, 1, 80)));
    const double c = chamfer(a, b);
    EXPECT_NEAR(c, brute_chamfer(a, b), 1e-12);
    EXPECT_EQ(c, chamfer(b, a));
  }
}

TEST(Chamfer, PermutationInvariant) {
  Rng rng = make_rng(3);
  PointCloud a = gbtest::random_cloud(rng, 30);
  PointCloud b = gbtest::random_cloud(rng, 25);
  PointCloud a2 = a;
  std::shuffle(a2.points.begin(), a2.points.end(), rng);
  EXPECT_NEAR(chamfer(a, b), chamfer(a2, b), 1e-12);
}

TEST(Chamfer, LargeCloudsUseSameAnswer) {
  // Large enough to take the parallel path.
  Rng rng = make_rng(4);
  PointCloud a = gbtest::random_cloud(rng, 400);
  PointCloud b = gbtest::random_cloud(rng, 300);
  EXPECT_NEAR(chamfer(a, b), brute_chamfer(a, b), 1e-10);
}

TEST(Nearest, LowestIndexOnTies) {
  PointCloud c{{Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)}};
  auto [d2, idx] = nearest(c, Vec3(0, 0, 0));
  EXPECT_EQ(d2, 1.0);
  EXPECT_EQ(idx, 0u);
  auto [d3, idx3] = nearest(c, Vec3(1, 0, 0));
  EXPECT_EQ(d3, 0.0);
  EXPECT_EQ(idx3, 0u);
}

TEST(ContactMap, ThresholdInclusionAndExclusion) {
  OrientedCloud obj;
  obj.cloud.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  obj.normals = {Vec3::UnitZ(), Vec3::UnitX()};
  PointCloud hand{{Vec3(0, 0, 0.004)}};
  ContactMap m = extract_contact_map(obj, hand, 0.005);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.cloud.points[0], Vec3(0, 0, 0));
  EXPECT_EQ(m.normals[0], Vec3::UnitZ());
  PointCloud far{{Vec3(10, 10, 10)}};
  EXPECT_TRUE(extract_contact_map(obj, far, 0.005).empty());
}

TEST(ContactMap, Preconditions) {
  OrientedCloud obj;
  obj.cloud.points = {Vec3(0, 0, 0)};
  obj.normals = {Vec3::UnitZ()};
  PointCloud hand{{Vec3(0, 0, 0)}};
  EXPECT_EQ(code_of([&] { extract_contact_map(obj, hand, 0.0); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([&] { extract_contact_map(OrientedCloud{}, hand, 0.1); }), ErrorCode::kEmptyInput);
}

TEST(ContactMap, SubsetAndMonotoneInTau) {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    OrientedCloud obj = gbtest::random_oriented(rng, 200);
    PointCloud hand = gbtest::random_cloud(rng, 5);
    std::size_t prev = 0;
    for (double tau : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      ContactMap m = extract_contact_map(obj, hand, tau);
      EXPECT_GE(m.size(), prev);
      prev = m.size();
      // Oracle: every object point within tau of some hand point, in order.
      std::vector<std::size_t> want;
      for (std::size_t i = 0; i < obj.size(); ++i) {
        double best = INFINITY;
        for (const auto& h : hand.points) best = std::min(best, (obj.cloud.points[i] - h).norm());
        if (best <= tau) want.push_back(i);
      }
      ASSERT_EQ(m.size(), want.size());
      for (std::size_t k = 0; k < want.size(); ++k) {
        EXPECT_EQ(m.cloud.points[k], obj.cloud.points[want[k]]);
        EXPECT_EQ(m.normals[k], obj.normals[want[k]]);
      }
    }
  }
}

TEST(FarthestPointSample, SquareCornersPlusCenter) {
  PointCloud c{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 0.5, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}};
  auto idx = farthest_point_sample(c, 4);
  std::vector<std::size_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 3, 4}));
  // Hand enumeration: all corners tie from the centroid -> 0; then 3 (diagonal);
  // then 1 and 4 tie -> 1; then 4.
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 3, 1, 4}));
}

TEST(FarthestPointSample, SeedAndExhaustiveCases) {
  PointCloud c{{Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(5, 0, 0), Vec3(0.2, 0, 0)}};
  EXPECT_EQ(farthest_point_sample(c, 1), (std::vector<std::size_t>{2}));
  auto all = farthest_point_sample(c, 4);
  std::vector<std::size_t> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(all, farthest_point_sample(c, 4));
}

TEST(FarthestPointSample, BoundsErrors) {
  PointCloud c{{Vec3(0, 0, 0), Vec3(1, 0, 0)}};
  EXPECT_EQ(code_of([&] { farthest_point_sample(c, 0); }), ErrorCode::kBounds);
  EXPECT_EQ(code_of([&] { farthest_point_sample(c, 3); }), ErrorCode::kBounds);
}

TEST(FarthestPointSample, GreedyOracle) {
  Rng rng = make_rng(6);
  PointCloud c = gbtest::random_cloud(rng, 60);
  const std::size_t k = 12;
  auto got = farthest_point_sample(c, k);
  // Independent greedy recomputation.
  Vec3 mu = Vec3::Zero();
  for (const auto& p : c.points) mu += p;
  mu /= static_cast<double>(c.size());
  std::vector<std::size_t> want;
  std::size_t seed = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if ((c.points[i] - mu).squaredNorm() > (c.points[seed] - mu).squaredNorm()) seed = i;
  }
  want.push_back(seed);
  std::vector<double> dmin(c.size(), INFINITY);
  while (want.size() < k) {
    for (std::size_t i = 0; i < c.size(); ++i) dmin[i] = std::min(dmin[i], (c.points[i] - c.points[want.back()]).squaredNorm());
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (dmin[i] > dmin[best]) best = i;
    }
    want.push_back(best);
  }
  EXPECT_EQ(got, want);
}

TEST(CloudCsv, RoundTripWithAndWithoutNormals) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "graspbridge_geometry_csv";
  fs::create_directories(dir);
  Rng rng = make_rng(9);
  OrientedCloud c = gbtest::random_oriented(rng, 17);
  write_cloud_csv(dir / "with.csv", c);
  OrientedCloud back = read_cloud_csv(dir / "with.csv");
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.cloud.points[i], c.cloud.points[i]);
    EXPECT_EQ(back.normals[i], c.normals[i]);
  }
  {
    std::ofstream f(dir / "plain.csv");
    f << "0,0,0\n1.5,2,-3\n";
  }
  OrientedCloud plain = read_cloud_csv(dir / "plain.csv");
  ASSERT_EQ(plain.size(), 2u);
  EXPECT_EQ(plain.cloud.points[1], Vec3(1.5, 2, -3));
  EXPECT_TRUE(plain.normals.empty());
  {
    std::ofstream f(dir / "bad.csv");
    f << "0,0,0\n1,2\n";
  }
  EXPECT_EQ(code_of([&] { read_cloud_csv(dir / "bad.csv"); }), ErrorCode::kFormat);
}
