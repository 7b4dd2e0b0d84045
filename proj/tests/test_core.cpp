/**
 * Copyright (c) 2026 the lfv authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lfv/core/lightfield_ops.hpp"
#include "lfv/core/metrics.hpp"
#include "lfv/scenegen/scenegen.hpp"
#include "test_util.hpp"

using namespace lfv;
using core::AngularCoord;
using core::Image;
using core::LightFieldFrame;

// ---------------------------------------------------------------------------
// to_luminance
// ---------------------------------------------------------------------------

TEST(ToLuminance, BlackMapsToZero) {
  Image img(4, 5, 3, 0.0f);
  Image y = core::to_luminance(img);
  ASSERT_EQ(y.channels, 1);
  for (float v : y.data) EXPECT_EQ(v, 0.0f);
}

TEST(ToLuminance, WhiteMapsToOne) {
  Image img(4, 5, 3, 1.0f);
  Image y = core::to_luminance(img);
  for (float v : y.data) EXPECT_NEAR(v, 1.0f, 1e-6f);
}

TEST(ToLuminance, PureRedMatchesScalarOracle) {
  Image img(6, 6, 3, 0.0f);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) img.at(0, y, x) = 1.0f;
  Image y = core::to_luminance(img);
  for (float v : y.data) EXPECT_NEAR(v, 0.299f, 1e-7f);

  // per-pixel scalar oracle on a random image
  Rng rng(11);
  Image rnd = test::random_image(7, 5, 3, rng);
  Image yl = core::to_luminance(rnd);
  for (int py = 0; py < 7; ++py)
    for (int px = 0; px < 5; ++px) {
      double expect = 0.299 * rnd.at(0, py, px) + 0.587 * rnd.at(1, py, px) +
                      0.114 * rnd.at(2, py, px);
      EXPECT_NEAR(yl.at(0, py, px), expect, 1e-6);
    }
}

TEST(ToLuminance, RejectsTwoChannelImages) {
  Image img(4, 4, 2);
  EXPECT_THROW(core::to_luminance(img), ShapeError);
}

// ---------------------------------------------------------------------------
// mean_image / variance_image
// ---------------------------------------------------------------------------

TEST(MeanImage, IdenticalViewsGiveTheView) {
  Rng rng(3);
  Image base = test::random_image(8, 9, 1, rng);
  LightFieldFrame lf(8, 9, 1);
  for (auto& s : lf.sais) s = base;
  Image m = core::mean_image(lf);
  for (size_t i = 0; i < m.data.size(); ++i) EXPECT_NEAR(m.data[i], base.data[i], 1e-6);
}

TEST(MeanImage, SingleOnesViewGivesOneOver81) {
  LightFieldFrame lf(4, 4, 1);
  lf.sais[17] = Image(4, 4, 1, 1.0f);
  Image m = core::mean_image(lf);
  for (float v : m.data) EXPECT_NEAR(v, 1.0f / 81.0f, 1e-7);
}

TEST(MeanImage, MatchesBruteForceLoop) {
  Rng rng(5);
  LightFieldFrame lf = test::random_lightfield(6, 7, 3, rng);
  Image m = core::mean_image(lf);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 7; ++x) {
        double acc = 0.0;
        for (int i = 0; i < core::kNumViews; ++i) acc += lf.sais[i].at(c, y, x);
        EXPECT_NEAR(m.at(c, y, x), acc / 81.0, 1e-6);
      }
}

TEST(VarianceImage, IdenticalViewsGiveZero) {
  Rng rng(4);
  Image base = test::random_image(5, 5, 1, rng);
  LightFieldFrame lf(5, 5, 1);
  for (auto& s : lf.sais) s = base;
  Image v = core::variance_image(lf);
  for (float x : v.data) EXPECT_EQ(x, 0.0f);
}

TEST(VarianceImage, FortyFortyOneSplitClosedForm) {
  // 40 views at 1, 41 views at 0: population variance = 40*41/81^2.
  LightFieldFrame lf(3, 3, 1);
  for (int i = 0; i < 40; ++i) lf.sais[i] = Image(3, 3, 1, 1.0f);
  Image v = core::variance_image(lf);
  const double expected = 40.0 * 41.0 / (81.0 * 81.0);
  for (float x : v.data) EXPECT_NEAR(x, expected, 1e-6);
  EXPECT_NEAR(expected, 0.25, 1e-3);
}

TEST(VarianceImage, MatchesTwoPassLoopOracle) {
  Rng rng(6);
  LightFieldFrame lf = test::random_lightfield(5, 6, 1, rng);
  Image v = core::variance_image(lf);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x) {
      double mean = 0.0;
      for (int i = 0; i < core::kNumViews; ++i) mean += lf.sais[i].at(0, y, x);
      mean /= 81.0;
      double var = 0.0;
      for (int i = 0; i < core::kNumViews; ++i) {
        double d = lf.sais[i].at(0, y, x) - mean;
        var += d * d;
      }
      var /= 81.0;
      EXPECT_NEAR(v.at(0, y, x), var, 1e-6);
      EXPECT_GE(v.at(0, y, x), 0.0f);
    }
}

TEST(VarianceImage, ZeroExactlyWhereViewsAgree) {
  Rng rng(7);
  LightFieldFrame lf(4, 4, 1);
  Image base = test::random_image(4, 4, 1, rng);
  for (auto& s : lf.sais) s = base;
  lf.sais[3].at(0, 2, 2) += 0.25f;  // one view deviates at one pixel
  Image v = core::variance_image(lf);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      if (y == 2 && x == 2)
        EXPECT_GT(v.at(0, y, x), 0.0f);
      else
        EXPECT_EQ(v.at(0, y, x), 0.0f);
    }
}

// ---------------------------------------------------------------------------
// variance_mask
// ---------------------------------------------------------------------------

TEST(VarianceMask, ZeroVarianceGivesAllZeroMasks) {
  Image var(6, 6, 1, 0.0f);
  core::VarianceMaskPolicy policy;
  policy.mode = core::VarianceMaskPolicy::Mode::kAbsolute;
  policy.threshold = 1e-6f;
  auto masks = core::variance_mask(var, policy);
  ASSERT_EQ(masks.size(), core::kNumViews);
  for (const auto& m : masks)
    for (float v : m.data) EXPECT_EQ(v, 0.0f);
}

TEST(VarianceMask, UniformlyAboveThresholdGivesAllOnes) {
  Image var(6, 6, 1, 0.5f);
  core::VarianceMaskPolicy policy;
  policy.mode = core::VarianceMaskPolicy::Mode::kAbsolute;
  policy.threshold = 0.1f;
  auto masks = core::variance_mask(var, policy);
  for (const auto& m : masks)
    for (float v : m.data) EXPECT_EQ(v, 1.0f);
}

TEST(VarianceMask, RejectsNegativeVariance) {
  Image var(4, 4, 1, -0.1f);
  EXPECT_THROW(core::variance_mask(var, {}), DomainError);
}

TEST(VarianceMask, OcclusionBandOfTwoLayerScene) {
  // Static solid background at d=0 under a solid foreground at d=1.5: the
  // light field variance is positive exactly where per-view layer visibility
  // differs, so an absolute threshold recovers the occlusion band.
  scenegen::SceneSpec spec;
  spec.width = 48;
  spec.height = 48;
  spec.channels = 1;
  spec.frame_count = 1;
  scenegen::Layer bg;
  bg.disparity = 0.0f;
  bg.solid = true;
  bg.solid_value = {0.25f, 0.25f, 0.25f};
  scenegen::Layer fg;
  fg.disparity = 1.5f;
  fg.solid = true;
  fg.solid_value = {0.9f, 0.9f, 0.9f};
  fg.silhouette.kind = scenegen::Silhouette::Kind::kRect;
  fg.silhouette.x0 = 18;
  fg.silhouette.y0 = 18;
  fg.silhouette.w = 12;
  fg.silhouette.h = 12;
  spec.layers = {bg, fg};
  spec.validate();

  auto video = scenegen::render_video(spec);
  Image var = core::variance_image(video.frames[0]);
  core::VarianceMaskPolicy policy;
  policy.mode = core::VarianceMaskPolicy::Mode::kAbsolute;
  policy.threshold = 1e-5f;
  policy.eta = 0.0f;  // unshifted mask, compare directly on the center grid
  auto masks = core::variance_mask(var, policy);
  const Image& center_mask = masks[core::view_index({0, 0})];
  const Image& occ = *video.ground_truth[0].occlusion;
  int disagreements = 0;
  for (size_t i = 0; i < occ.data.size(); ++i)
    if (center_mask.data[i] != occ.data[i]) ++disagreements;
  EXPECT_EQ(disagreements, 0);
}

// ---------------------------------------------------------------------------
// extract_epi
// ---------------------------------------------------------------------------

TEST(ExtractEpi, ConstantLightFieldGivesConstantEpi) {
  LightFieldFrame lf(6, 10, 1);
  for (auto& s : lf.sais) s = Image(6, 10, 1, 0.7f);
  core::EpiSlice slice{core::EpiSlice::Axis::kRow, 3, 0};
  Image epi = core::extract_epi(lf, slice);
  EXPECT_EQ(epi.height, 9);
  EXPECT_EQ(epi.width, 10);
  for (float v : epi.data) EXPECT_EQ(v, 0.7f);
}

TEST(ExtractEpi, ShapeIsNineByWidthAndNineByHeight) {
  Rng rng(9);
  LightFieldFrame lf = test::random_lightfield(6, 10, 1, rng);
  Image row_epi = core::extract_epi(lf, {core::EpiSlice::Axis::kRow, 2, -1});
  EXPECT_EQ(row_epi.height, core::kAngularSize);
  EXPECT_EQ(row_epi.width, 10);
  Image col_epi = core::extract_epi(lf, {core::EpiSlice::Axis::kColumn, 7, 2});
  EXPECT_EQ(col_epi.height, core::kAngularSize);
  EXPECT_EQ(col_epi.width, 6);
}

TEST(ExtractEpi, RejectsOutOfRangeIndices) {
  LightFieldFrame lf(6, 10, 1);
  for (auto& s : lf.sais) s = Image(6, 10, 1, 0.0f);
  EXPECT_THROW(core::extract_epi(lf, {core::EpiSlice::Axis::kRow, 6, 0}), DomainError);
  EXPECT_THROW(core::extract_epi(lf, {core::EpiSlice::Axis::kRow, 0, 5}), DomainError);
}

TEST(ExtractEpi, PlanarSceneStripeSlopeEqualsDisparity) {
  scenegen::SceneSpec spec;
  spec.width = 64;
  spec.height = 32;
  spec.channels = 1;
  spec.frame_count = 1;
  scenegen::Layer bg;
  bg.disparity = 1.5f;
  bg.texture_seed = 123;
  spec.layers = {bg};
  auto video = scenegen::render_video(spec);
  Image epi = core::extract_epi(video.frames[0], {core::EpiSlice::Axis::kRow, 16, 0});
  double slope = test::epi_stripe_slope(epi);
  EXPECT_NEAR(slope, 1.5, 0.1);
}

// ---------------------------------------------------------------------------
// refocus
// ---------------------------------------------------------------------------

TEST(Refocus, ZeroDisparityEqualsMeanImage) {
  Rng rng(10);
  LightFieldFrame lf = test::random_lightfield(8, 8, 1, rng);
  Image a = core::refocus(lf, 0.0f);
  Image b = core::mean_image(lf);
  ASSERT_EQ(a.data.size(), b.data.size());
  for (size_t i = 0; i < a.data.size(); ++i) EXPECT_EQ(a.data[i], b.data[i]);
}

TEST(Refocus, IdenticalViewsStayConstantInterior) {
  LightFieldFrame lf(12, 12, 1);
  for (auto& s : lf.sais) s = Image(12, 12, 1, 0.42f);
  Image r = core::refocus(lf, 1.25f);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) EXPECT_NEAR(r.at(0, y, x), 0.42f, 1e-6);
}

TEST(Refocus, PlanarSceneAtItsDisparityMatchesCenterView) {
  scenegen::SceneSpec spec;
  spec.width = 48;
  spec.height = 48;
  spec.channels = 1;
  spec.frame_count = 1;
  scenegen::Layer bg;
  bg.disparity = 2.0f;
  bg.texture_seed = 321;
  spec.layers = {bg};
  auto video = scenegen::render_video(spec);
  Image r = core::refocus(video.frames[0], 2.0f);
  double p = core::psnr_interior(r, video.frames[0].center(), 10);
  EXPECT_GE(p, 40.0);
}

TEST(Refocus, RejectsExcessiveDisparity) {
  LightFieldFrame lf(16, 16, 1);
  for (auto& s : lf.sais) s = Image(16, 16, 1, 0.0f);
  EXPECT_THROW(core::refocus(lf, 5.0f), DomainError);
}

// ---------------------------------------------------------------------------
// psnr / ssim
// ---------------------------------------------------------------------------

TEST(Psnr, IdenticalImagesGiveInfinity) {
  Rng rng(12);
  Image a = test::random_image(6, 6, 3, rng);
  EXPECT_TRUE(std::isinf(core::psnr(a, a)));
  EXPECT_GT(core::psnr(a, a), 0);
}

TEST(Psnr, KnownMseGivesTwentyDb) {
  // MSE 0.01 -> 20 dB (up to float32 representation of 0.1)
  Image a(8, 8, 1, 0.0f);
  Image b(8, 8, 1, 0.1f);
  EXPECT_NEAR(core::psnr(a, b), 20.0, 1e-6);
}

TEST(Psnr, MatchesLoopMseOracleAndIsSymmetric) {
  Rng rng(13);
  Image a = test::random_image(7, 9, 3, rng);
  Image b = test::random_image(7, 9, 3, rng);
  double acc = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - b.data[i];
    acc += d * d;
  }
  double expect = 10.0 * std::log10(a.data.size() / acc);
  EXPECT_NEAR(core::psnr(a, b), expect, 1e-9);
  EXPECT_EQ(core::psnr(a, b), core::psnr(b, a));
}

TEST(Psnr, RejectsShapeMismatch) {
  Image a(4, 4, 1), b(4, 5, 1);
  EXPECT_THROW(core::psnr(a, b), ShapeError);
}

TEST(Ssim, IdenticalImagesScoreOne) {
  Rng rng(14);
  Image a = test::random_image(16, 16, 1, rng);
  EXPECT_DOUBLE_EQ(core::ssim(a, a), 1.0);
}

TEST(Ssim, NegatedHighContrastPatternScoresNegative) {
  Image a(16, 16, 1);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) a.at(0, y, x) = ((x / 2 + y / 2) % 2) ? 1.0f : 0.0f;
  Image b = a;
  for (auto& v : b.data) v = 1.0f - v;
  EXPECT_LT(core::ssim(a, b), 0.0);
}

TEST(Ssim, ConstantImagesMatchLuminanceClosedForm) {
  const double av = 0.2, bv = 0.8, c1 = 0.01 * 0.01;
  Image a(12, 12, 1, static_cast<float>(av));
  Image b(12, 12, 1, static_cast<float>(bv));
  double expect = (2 * av * bv + c1) / (av * av + bv * bv + c1);
  EXPECT_NEAR(core::ssim(a, b), expect, 1e-6);
}

TEST(Ssim, RejectsMultiChannelAndTinyImages) {
  Image a(16, 16, 3), b(16, 16, 3);
  EXPECT_THROW(core::ssim(a, b), ShapeError);
  Image c(8, 8, 1), d(8, 8, 1);
  EXPECT_THROW(core::ssim(c, d), DomainError);
}

// ---------------------------------------------------------------------------
// Type invariants
// ---------------------------------------------------------------------------

TEST(Types, AngularGridHasExactly81Coordinates) {
  int count = 0;
  for (int i = 0; i < core::kNumViews; ++i) {
    AngularCoord a = core::view_coord(i);
    EXPECT_TRUE(core::angular_in_range(a));
    EXPECT_EQ(core::view_index(a), i);
    ++count;
  }
  EXPECT_EQ(count, 81);
  EXPECT_EQ(core::view_index({0, 0}), 40);
}

TEST(Types, LightFieldValidationCatchesMixedShapes) {
  LightFieldFrame lf(4, 4, 1);
  lf.sais[5] = Image(4, 5, 1);
  EXPECT_THROW(lf.validate(), ShapeError);
}

TEST(Types, VideoValidationRequiresIncreasingTimestamps) {
  core::LightFieldVideo video;
  video.frames.emplace_back(4, 4, 1, 1);
  video.frames.emplace_back(4, 4, 1, 1);
  EXPECT_THROW(video.validate(), DomainError);
}
