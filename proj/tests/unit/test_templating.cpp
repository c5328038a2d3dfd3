// Copyright 2026, The flipprint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "flipprint/dram/population.hpp"
#include "flipprint/templating/fuzz.hpp"

namespace fd = flipprint::dram;
namespace ft = flipprint::templating;

namespace {

std::vector<fd::DimmDevice> devices(std::uint32_t count, bool trr, std::uint32_t capacity = 4,
                                    std::uint64_t seed = 3) {
  fd::PopulationGroup g;
  g.count = count;
  g.trr.enabled = trr;
  g.trr.tracker_capacity = capacity;
  return fd::create_population({{g}}, seed);
}

ft::PatternScore score(std::size_t index, std::map<std::uint32_t, std::uint64_t> flips, std::size_t secondaries) {
  ft::PatternScore s;
  s.pattern_index = index;
  s.secondary_count = secondaries;
  s.per_device_flips = std::move(flips);
  for (const auto& [d, f] : s.per_device_flips) {
    s.total_flips += f;
    s.devices_covered += f > 0;
  }
  return s;
}

}  // namespace

TEST(Pattern, SecondaryCountIsDistinctDecoyRoles) {
  EXPECT_EQ(ft::double_sided_pattern().secondary_slot_count(), 0U);
  EXPECT_EQ(ft::decoy_pattern(5).secondary_slot_count(), 5U);
  ft::HammeringPattern p;
  p.slots = {3, 0, 1, 3, 4, 3};
  p.primary_index = 1;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.secondary_slot_count(), 2U);
}

TEST(Pattern, ValidationCatchesMalformedPatterns) {
  ft::HammeringPattern p;
  p.slots = {0};
  EXPECT_THROW(p.validate(), flipprint::UsageError);
  p.slots = {1, 0};
  EXPECT_THROW(p.validate(), flipprint::UsageError);
  p.slots = {0, 1, 0};
  EXPECT_THROW(p.validate(), flipprint::UsageError);
  p.slots = {0, 1, 2};
  p.amplitude = 0;
  EXPECT_THROW(p.validate(), flipprint::UsageError);
}

TEST(Pattern, PrimaryShareSpendsSlotsOnDecoys) {
  EXPECT_DOUBLE_EQ(ft::primary_share(ft::double_sided_pattern(), 128), 1.0);
  EXPECT_DOUBLE_EQ(ft::primary_share(ft::decoy_pattern(4), 128), 124.0 / 128.0);
  EXPECT_DOUBLE_EQ(ft::primary_share(ft::decoy_pattern(4, 2, 4), 128), 96.0 / 128.0);
  EXPECT_DOUBLE_EQ(ft::primary_share(ft::decoy_pattern(20, 8, 8), 128), 0.0);
}

TEST(Pattern, JsonRoundTrip) {
  auto rng = flipprint::make_stream(1, {});
  std::vector<ft::HammeringPattern> ps;
  for (int i = 0; i < 20; ++i) ps.push_back(ft::random_pattern(rng, {}));
  const auto back = ft::patterns_from_json(nlohmann::json::parse(ft::patterns_to_json(ps).dump()));
  EXPECT_EQ(back, ps);
  EXPECT_THROW(ft::patterns_from_json({{"version", 99}, {"patterns", nlohmann::json::array()}}),
               flipprint::ConfigError);
}

TEST(Fuzz, RandomPatternsRespectRanges) {
  ft::FuzzRanges r;
  r.slots_min = 4;
  r.slots_max = 9;
  r.amplitude_max = 3;
  auto rng = flipprint::make_stream(2, {});
  for (int i = 0; i < 500; ++i) {
    const auto p = ft::random_pattern(rng, r);
    EXPECT_NO_THROW(p.validate());
    EXPECT_GE(p.slots.size(), 4U);
    EXPECT_LE(p.slots.size(), 9U);
    EXPECT_LE(p.amplitude, 3U);
    EXPECT_LT(p.phase, r.phase_interval);
  }
  r.slots_min = 1;
  EXPECT_THROW(ft::fuzz_patterns(devices(1, false), 1, 1, r), flipprint::ConfigError);
}

TEST(Fuzz, WithoutTrrThePlainPatternQualifies) {
  const auto found = ft::fuzz_patterns(devices(2, false), 1, 9);
  ASSERT_EQ(found.size(), 1U);
  EXPECT_EQ(found.front(), ft::double_sided_pattern());
}

TEST(Fuzz, UnderTrrEveryPatternCarriesEnoughDecoys) {
  const auto found = ft::fuzz_patterns(devices(2, true, 4), 150, 9);
  ASSERT_FALSE(found.empty());
  for (const auto& p : found) EXPECT_GE(p.secondary_slot_count(), 4U);
}

TEST(Fuzz, ZeroBudgetFindsNothingAndIsDeterministic) {
  EXPECT_TRUE(ft::fuzz_patterns(devices(1, true), 0, 1).empty());
  const auto a = ft::fuzz_patterns(devices(2, true), 60, 5);
  const auto b = ft::fuzz_patterns(devices(2, true), 60, 5);
  EXPECT_EQ(a, b);
}

TEST(Score, BlockedPatternScoresZero) {
  const auto devs = devices(3, true, 4);
  const auto s = ft::score_pattern(ft::decoy_pattern(3), devs);
  EXPECT_EQ(s.total_flips, 0U);
  EXPECT_EQ(s.devices_covered, 0U);
  EXPECT_EQ(s.per_device_flips.size(), 3U);
}

TEST(Score, SingleDeviceHasOneEntry) {
  const auto s = ft::score_pattern(ft::decoy_pattern(4), devices(1, true));
  EXPECT_EQ(s.per_device_flips.size(), 1U);
  EXPECT_EQ(s.secondary_count, 4U);
}

TEST(Score, MoreDecoysLeaveFewerPrimaryActivations) {
  const auto devs = devices(4, true, 4);
  std::uint64_t k = 0, k4 = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ft::TrialConfig trial;
    trial.seed = seed;
    trial.chunk_id = seed;
    k += ft::score_pattern(ft::decoy_pattern(4, 4, 2), devs, trial).total_flips;
    k4 += ft::score_pattern(ft::decoy_pattern(8, 4, 2), devs, trial).total_flips;
  }
  EXPECT_GT(k, 0U);
  EXPECT_GE(k, k4);
}

TEST(Select, OnePatternCoveringEverythingIsEnough) {
  const std::vector<ft::PatternScore> scores{score(0, {{0, 5}, {1, 3}}, 4), score(1, {{0, 9}, {1, 0}}, 4)};
  const auto sel = ft::select_patterns(scores);
  ASSERT_EQ(sel.size(), 1U);
  EXPECT_EQ(sel.front().pattern_index, 0U);
  EXPECT_EQ(sel.front().devices, (std::vector<std::uint32_t>{0, 1}));
}

TEST(Select, TwoDisjointGroupsNeedTwoPatterns) {
  const std::vector<ft::PatternScore> scores{score(0, {{0, 5}, {1, 3}, {2, 0}, {3, 0}}, 4),
                                             score(1, {{0, 0}, {1, 0}, {2, 7}, {3, 1}}, 6)};
  const auto sel = ft::select_patterns(scores);
  ASSERT_EQ(sel.size(), 2U);
  EXPECT_EQ(sel[0].devices, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(sel[1].devices, (std::vector<std::uint32_t>{2, 3}));
}

TEST(Select, TiesPreferFlipsThenFewerDecoysThenIndex) {
  EXPECT_EQ(ft::select_patterns({score(0, {{0, 2}}, 4), score(1, {{0, 3}}, 8)}).front().pattern_index, 1U);
  EXPECT_EQ(ft::select_patterns({score(0, {{0, 3}}, 8), score(1, {{0, 3}}, 4)}).front().pattern_index, 1U);
  EXPECT_EQ(ft::select_patterns({score(0, {{0, 3}}, 4), score(1, {{0, 3}}, 4)}).front().pattern_index, 0U);
}

TEST(Select, PartialGoalAndErrors) {
  const std::vector<ft::PatternScore> scores{score(0, {{0, 5}, {1, 3}}, 4), score(1, {{2, 1}}, 4)};
  EXPECT_EQ(ft::select_patterns(scores, 0.5).size(), 1U);
  EXPECT_EQ(ft::select_patterns(scores, 1.0).size(), 2U);
  EXPECT_THROW(ft::select_patterns({}), flipprint::UsageError);
  EXPECT_THROW(ft::select_patterns(scores, 0.0), flipprint::UsageError);
}
