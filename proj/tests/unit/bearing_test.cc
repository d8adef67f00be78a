#include "rotvo/bearing.hpp"

#include <gtest/gtest.h>

#include "rotvo/error.hpp"
#include "test_util.hpp"

namespace rotvo {
namespace {

TEST(Bearing, PrincipalPointMapsToOpticalAxis) {
  const Intrinsics k = Intrinsics::Make(700, 710, 320, 240);
  EXPECT_LT((PixelToBearing(320, 240, k) - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(Bearing, MatchesNormalizedPinholeRay) {
  const Intrinsics k = Intrinsics::Make(500, 400, 100, 50);
  const Vec3 f = PixelToBearing(600, 450, k);
  // (u - cx) / fx = 1, (v - cy) / fy = 1.
  EXPECT_LT((f - Vec3(1, 1, 1).normalized()).norm(), 1e-15);
  EXPECT_NEAR(f.norm(), 1.0, 1e-15);
  EXPECT_GT(f.z(), 0.0);
}

TEST(Bearing, RejectsNonPositiveFocalLength) {
  EXPECT_ROTVO_ERROR(Intrinsics::Make(0, 1, 0, 0), ErrorCode::kInvalidArgument);
  EXPECT_ROTVO_ERROR(Intrinsics::Make(1, -1, 0, 0),
                     ErrorCode::kInvalidArgument);
}

TEST(Bearing, ReadIntrinsics) {
  testing::TempDir dir;
  testing::WriteText(dir.File("k.txt"), "# camera\n718.856 718.856 607.19 185.2\n");
  const Intrinsics k = ReadIntrinsics(dir.File("k.txt"));
  EXPECT_DOUBLE_EQ(k.fx, 718.856);
  EXPECT_DOUBLE_EQ(k.cy, 185.2);
}

TEST(Bearing, ReadIntrinsicsReportsLine) {
  testing::TempDir dir;
  testing::WriteText(dir.File("k.txt"), "\n700 700 1\n");
  try {
    ReadIntrinsics(dir.File("k.txt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    EXPECT_NE(std::string(e.what()).find("k.txt:2"), std::string::npos)
        << e.what();
  }
  EXPECT_ROTVO_ERROR(ReadIntrinsics(dir.File("missing.txt")), ErrorCode::kIo);
}

}  // namespace
}  // namespace rotvo
