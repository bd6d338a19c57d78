// tests/test_planner.cpp

// Copyright 2025  The mixsim authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mixsim/planner.hpp"

#include <set>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace mixsim {
namespace {

using testutil::make_stats;
using testutil::make_utt;

TEST(PlaceSequence, SingleUtteranceStartsAtZero) {
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng rng(1);
  const auto plan = place_sequence(
      "s", {make_utt("u1", "spkA", 5.0)}, stats, 1, &rng);
  ASSERT_EQ(plan.placements.size(), 1u);
  EXPECT_DOUBLE_EQ(plan.placements[0].start, 0.0);
  EXPECT_EQ(plan.num_speakers, 1);
}

TEST(PlaceSequence, PointMassOverlapTrace) {
  // 5 s and 4 s sources, guaranteed 2 s overlap at the speaker change:
  // starts must be exactly 0 and 0 + 5 - 2 = 3.
  const auto stats = make_stats({0.3}, {0.7}, {2.0}, 1.0);
  Rng rng(99);
  const auto plan = place_sequence(
      "s", {make_utt("u1", "spkA", 5.0), make_utt("u2", "spkB", 4.0)}, stats,
      2, &rng);
  ASSERT_EQ(plan.placements.size(), 2u);
  EXPECT_DOUBLE_EQ(plan.placements[0].start, 0.0);
  EXPECT_DOUBLE_EQ(plan.placements[1].start, 3.0);
}

TEST(PlaceSequence, PointMassPauseTrace) {
  // A(5s), A(3s), B(4s) with same-pause 0.5, cross-pause 1.0, no overlap:
  // starts 0.0, 5.5, 9.5.
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng rng(7);
  const auto plan = place_sequence(
      "s",
      {make_utt("u1", "spkA", 5.0), make_utt("u2", "spkA", 3.0),
       make_utt("u3", "spkB", 4.0)},
      stats, 2, &rng);
  ASSERT_EQ(plan.placements.size(), 3u);
  EXPECT_DOUBLE_EQ(plan.placements[0].start, 0.0);
  EXPECT_DOUBLE_EQ(plan.placements[1].start, 5.5);
  EXPECT_DOUBLE_EQ(plan.placements[2].start, 9.5);
}

TEST(PlaceSequence, StopsOnceAllSpeakersAppeared) {
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng rng(7);
  const auto plan = place_sequence(
      "s",
      {make_utt("u1", "spkA", 2.0), make_utt("u2", "spkB", 2.0),
       make_utt("u3", "spkA", 2.0)},
      stats, 2, &rng);
  // u3 is never placed: the second distinct speaker already appeared.
  ASSERT_EQ(plan.placements.size(), 2u);
  EXPECT_EQ(plan.placements.back().utterance.utterance_id, "u2");
}

TEST(PlaceSequence, StartIsClampedAtZero) {
  // Overlap longer than everything before it cannot push a start below 0.
  const auto stats = make_stats({0.5}, {1.0}, {10.0}, 1.0);
  Rng rng(3);
  const auto plan = place_sequence(
      "s", {make_utt("u1", "spkA", 1.0), make_utt("u2", "spkB", 5.0)}, stats,
      2, &rng);
  EXPECT_DOUBLE_EQ(plan.placements[1].start, 0.0);
}

TEST(PlaceSequence, SameSpeakerNeverOverlapsItself) {
  // A(5), B(1), A(3), C(2) with aggressive overlaps: the second A placement
  // must wait for the first one to finish even though the previous utterance
  // (B) ended long before.
  const auto stats = make_stats({0.5}, {1.0}, {4.0}, 1.0);
  Rng rng(11);
  const auto plan = place_sequence(
      "s",
      {make_utt("u1", "spkA", 5.0), make_utt("u2", "spkB", 1.0),
       make_utt("u3", "spkA", 3.0), make_utt("u4", "spkC", 2.0)},
      stats, 3, &rng);
  ASSERT_EQ(plan.placements.size(), 4u);
  EXPECT_DOUBLE_EQ(plan.placements[1].start, 1.0);  // 5 - 4
  EXPECT_DOUBLE_EQ(plan.placements[2].start, 5.0);  // floor: first A ends at 5
}

TEST(PlaceSequence, StartsAreNonDecreasing) {
  const auto stats = make_stats({0.0, 0.4}, {0.1, 1.0}, {0.5, 3.0}, 0.7);
  Rng rng(2025);
  std::vector<Utterance> sequence;
  const char *speakers[] = {"spkA", "spkB", "spkC", "spkA", "spkB",
                            "spkD", "spkA", "spkC", "spkB", "spkD"};
  for (int i = 0; i < 10; ++i) {
    sequence.push_back(
        make_utt("u" + std::to_string(i), speakers[i], 1.0 + 0.3 * (i % 4)));
  }
  const auto plan = place_sequence("s", sequence, stats, 4, &rng);
  for (size_t i = 1; i < plan.placements.size(); ++i) {
    EXPECT_GE(plan.placements[i].start, plan.placements[i - 1].start);
  }
}

TEST(PlaceSequence, RejectsBadSpeakerCount) {
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng rng(1);
  EXPECT_THROW(place_sequence("s", {}, stats, 0, &rng), std::invalid_argument);
  EXPECT_THROW(place_sequence("s", {}, stats, 5, &rng), std::invalid_argument);
}

UtterancePool two_speaker_pool(int utts_per_speaker, double duration = 5.0) {
  UtterancePool pool;
  for (const std::string speaker : {"spkA", "spkB"}) {
    for (int i = 0; i < utts_per_speaker; ++i) {
      pool.add(make_utt(speaker + "_u" + std::to_string(i), speaker, duration));
    }
  }
  return pool;
}

TEST(PlanSession, InsufficientPoolFails) {
  UtterancePool pool;
  pool.add(make_utt("u1", "spkA", 5.0));
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng rng(1);
  PlannerConfig config;
  EXPECT_THROW(plan_session(&pool, stats, 2, &rng, config),
               PoolExhaustedError);
}

TEST(PlanSession, MarksPlacedUtterancesUsed) {
  UtterancePool pool = two_speaker_pool(2);
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng rng(5);
  PlannerConfig config;
  const auto plan = plan_session(&pool, stats, 2, &rng, config, "sess");
  EXPECT_EQ(plan.num_speakers, 2);
  for (const auto &p : plan.placements) {
    EXPECT_TRUE(pool.is_used(p.utterance.utterance_id));
  }
  EXPECT_EQ(pool.used_count(), plan.placements.size());
}

TEST(PlanSession, NeverReusesAnUtterance) {
  UtterancePool pool = two_speaker_pool(6);
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.5);
  Rng rng(17);
  PlannerConfig config;
  std::set<std::string> seen;
  size_t placed = 0;
  while (true) {
    SessionPlan plan;
    try {
      plan = plan_session(&pool, stats, 2, &rng, config);
    } catch (const PoolExhaustedError &) {
      break;
    }
    for (const auto &p : plan.placements) {
      EXPECT_TRUE(seen.insert(p.utterance.utterance_id).second)
          << "utterance placed twice: " << p.utterance.utterance_id;
      ++placed;
    }
  }
  EXPECT_EQ(seen.size(), placed);
  EXPECT_LE(placed, pool.size());
}

TEST(PlanSession, DeterministicGivenSeed) {
  const auto stats = make_stats({0.2, 0.5}, {0.7, 1.2}, {0.4, 1.1}, 0.5);
  PlannerConfig config;
  auto run = [&](uint64_t seed) {
    UtterancePool pool = two_speaker_pool(4);
    Rng rng(seed);
    return plan_session(&pool, stats, 2, &rng, config, "sess");
  };
  const auto a = run(404);
  const auto b = run(404);
  ASSERT_EQ(a.placements.size(), b.placements.size());
  for (size_t i = 0; i < a.placements.size(); ++i) {
    EXPECT_EQ(a.placements[i].utterance.utterance_id,
              b.placements[i].utterance.utterance_id);
    EXPECT_DOUBLE_EQ(a.placements[i].start, b.placements[i].start);
  }
}

TEST(PlanSession, NoOverlapWhenProbabilityIsZero) {
  const auto stats = make_stats({0.2, 0.5}, {0.7, 1.2}, {0.4, 1.1}, 0.0);
  PlannerConfig config;
  Rng rng(86);
  for (int trial = 0; trial < 30; ++trial) {
    UtterancePool pool = two_speaker_pool(4, 3.0);
    const auto plan = plan_session(&pool, stats, 2, &rng, config);
    for (size_t i = 1; i < plan.placements.size(); ++i) {
      EXPECT_GE(plan.placements[i].start, plan.placements[i - 1].end());
    }
  }
}

TEST(PlanSession, SpeakerChangeOverlapsWhenProbabilityIsOne) {
  const auto stats = make_stats({0.2}, {0.7}, {0.5}, 1.0);
  PlannerConfig config;
  Rng rng(87);
  for (int trial = 0; trial < 30; ++trial) {
    UtterancePool pool = two_speaker_pool(4, 3.0);
    const auto plan = plan_session(&pool, stats, 2, &rng, config);
    // Two-speaker sessions end right after the only speaker change.
    const auto &last = plan.placements.back();
    const auto &previous = plan.placements[plan.placements.size() - 2];
    EXPECT_LT(last.start, previous.end());
  }
}

TEST(PlanSession, RecoversSourceStatistics) {
  // Closure check: the gap and overlap values measured from many planned
  // sessions reproduce the distributions that generated them.
  const auto stats =
      make_stats({0.4, 0.8}, {1.0, 2.0}, {1.0, 2.0}, 0.5);
  PlannerConfig config;
  Rng rng(20240601);
  UtterancePool pool;
  for (const std::string speaker : {"spkA", "spkB"}) {
    for (int i = 0; i < 3000; ++i) {
      pool.add(make_utt(speaker + "_u" + std::to_string(i), speaker,
                        4.0 + (i % 5)));
    }
  }

  int changes = 0, overlapped = 0;
  double overlap_sum = 0.0, cross_gap_sum = 0.0, same_gap_sum = 0.0;
  int cross_gaps = 0, same_gaps = 0;
  for (int session = 0; session < 1000; ++session) {
    const auto plan = plan_session(&pool, stats, 2, &rng, config);
    for (size_t i = 1; i < plan.placements.size(); ++i) {
      const auto &prev = plan.placements[i - 1];
      const auto &cur = plan.placements[i];
      const double gap = cur.start - prev.end();
      if (cur.utterance.speaker_id == prev.utterance.speaker_id) {
        same_gap_sum += gap;
        ++same_gaps;
      } else {
        ++changes;
        if (gap < 0) {
          ++overlapped;
          overlap_sum += -gap;
        } else {
          cross_gap_sum += gap;
          ++cross_gaps;
        }
      }
    }
  }

  ASSERT_EQ(changes, 1000);  // one speaker change per 2-speaker session
  EXPECT_NEAR(static_cast<double>(overlapped) / changes, 0.5, 0.05);
  EXPECT_NEAR(overlap_sum / overlapped, 1.5, 0.075);        // 5% of 1.5
  EXPECT_NEAR(cross_gap_sum / cross_gaps, 1.5, 0.075);      // 5% of 1.5
  ASSERT_GT(same_gaps, 100);
  EXPECT_NEAR(same_gap_sum / same_gaps, 0.6, 0.03);         // 5% of 0.6
}

std::vector<double> constant_signal(size_t n, double value) {
  return std::vector<double>(n, value);
}

TEST(AssignSnrs, SingleSpeakerIsReference) {
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng plan_rng(1);
  auto plan = place_sequence("s", {make_utt("u1", "spkA", 1.0)}, stats, 1,
                             &plan_rng);
  testutil::MapLoader loader;
  loader.audio["u1"] = constant_signal(16000, 0.5);
  Rng rng(2);
  const auto assigned = assign_snrs(plan, &rng, {-5.0, 5.0}, loader);
  EXPECT_DOUBLE_EQ(assigned.placements[0].gain, 1.0);
  EXPECT_DOUBLE_EQ(assigned.placements[0].snr_db, 0.0);
}

TEST(AssignSnrs, GainFollowsPowerRatio) {
  // P_ref = 1, P_B = 4, snr 0 dB: gain_B = sqrt(1 / 4) = 0.5.
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng plan_rng(1);
  auto plan = place_sequence(
      "s", {make_utt("u1", "spkA", 1.0), make_utt("u2", "spkB", 1.0)}, stats,
      2, &plan_rng);
  testutil::MapLoader loader;
  loader.audio["u1"] = constant_signal(16000, 1.0);
  loader.audio["u2"] = constant_signal(16000, 2.0);
  Rng rng(2);
  const auto assigned = assign_snrs(plan, &rng, {0.0, 0.0}, loader);
  EXPECT_DOUBLE_EQ(assigned.placements[0].gain, 1.0);
  EXPECT_DOUBLE_EQ(assigned.placements[1].gain, 0.5);
  EXPECT_DOUBLE_EQ(assigned.placements[1].snr_db, 0.0);
}

TEST(AssignSnrs, PositiveSnrMakesOtherSpeakerQuieter) {
  // Equal powers, snr +10 dB: gain = 10^(-1/2).
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng plan_rng(1);
  auto plan = place_sequence(
      "s", {make_utt("u1", "spkA", 1.0), make_utt("u2", "spkB", 1.0)}, stats,
      2, &plan_rng);
  testutil::MapLoader loader;
  loader.audio["u1"] = constant_signal(8000, 0.5);
  loader.audio["u2"] = constant_signal(8000, 0.5);
  Rng rng(2);
  const auto assigned = assign_snrs(plan, &rng, {10.0, 10.0}, loader);
  EXPECT_NEAR(assigned.placements[1].gain, std::pow(10.0, -0.5), 1e-12);
}

TEST(AssignSnrs, SilentSourceFails) {
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng plan_rng(1);
  auto plan = place_sequence(
      "s", {make_utt("u1", "spkA", 1.0), make_utt("u2", "spkB", 1.0)}, stats,
      2, &plan_rng);
  testutil::MapLoader loader;
  loader.audio["u1"] = constant_signal(16000, 0.5);
  loader.audio["u2"] = constant_signal(16000, 0.0);
  Rng rng(2);
  EXPECT_THROW(assign_snrs(plan, &rng, {-5.0, 5.0}, loader),
               std::runtime_error);
}

TEST(AssignSnrs, AllUtterancesOfASpeakerShareTheValue) {
  const auto stats = make_stats({0.5}, {1.0}, {2.0}, 0.0);
  Rng plan_rng(1);
  auto plan = place_sequence(
      "s",
      {make_utt("u1", "spkA", 1.0), make_utt("u2", "spkA", 1.0),
       make_utt("u3", "spkB", 1.0)},
      stats, 2, &plan_rng);
  testutil::MapLoader loader;
  loader.audio["u1"] = testutil::make_noise(16000, 1);
  loader.audio["u2"] = testutil::make_noise(16000, 2);
  loader.audio["u3"] = testutil::make_noise(16000, 3);
  Rng rng(2);
  const auto assigned = assign_snrs(plan, &rng, {-5.0, 5.0}, loader);
  EXPECT_DOUBLE_EQ(assigned.placements[0].snr_db, 0.0);
  EXPECT_DOUBLE_EQ(assigned.placements[0].gain, assigned.placements[1].gain);
  EXPECT_DOUBLE_EQ(assigned.placements[0].snr_db,
                   assigned.placements[1].snr_db);
  EXPECT_GE(assigned.placements[2].snr_db, -5.0);
  EXPECT_LE(assigned.placements[2].snr_db, 5.0);
}

TEST(PlannerConfigJson, RoundTripsAndDefaults) {
  PlannerConfig config;
  config.snr_range = {-3.0, 3.0};
  config.speaker_counts = {2, 4};
  config.sessions_per_count = 7;
  config.seed = 99;
  const auto restored =
      planner_config_from_json(planner_config_to_json(config));
  EXPECT_EQ(restored.snr_range, config.snr_range);
  EXPECT_EQ(restored.speaker_counts, config.speaker_counts);
  EXPECT_EQ(restored.sessions_per_count, 7);
  EXPECT_EQ(restored.seed, 99u);

  const auto defaults = planner_config_from_json(nlohmann::json::object());
  EXPECT_EQ(defaults.speaker_counts, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(defaults.max_source_duration_s, 15.0);
}

TEST(ComputeGain, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(compute_gain(1.0, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(compute_gain(4.0, 1.0, 0.0), 0.5);
  EXPECT_NEAR(compute_gain(1.0, 1.0, 10.0), 0.31623, 1e-5);
  EXPECT_THROW(compute_gain(0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(compute_gain(1.0, -1.0, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace mixsim
