// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "rhetoric/dataset.hpp"
#include "test_util.hpp"

namespace rhetoric {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

ArgumentRecord record(const std::string& id, const std::string& topic, bool political = true) {
  ArgumentRecord r;
  r.utterance_id = id;
  r.topic_id = topic;
  r.is_political = political;
  r.strategy = StrategyKind::Emotional;
  r.condition = Condition::Avoid;
  r.text = "Text of " + id + ".";
  r.scores = StrategyScoreVector(0.25, 0.5, 0.0, 1.0);
  return r;
}

std::vector<ArgumentRecord> records(int n) {
  std::vector<ArgumentRecord> out;
  for (int i = 0; i < n; ++i) out.push_back(record("u" + std::to_string(i), "t" + std::to_string(i % 3)));
  return out;
}

TEST(SplitRandom, SizesFollowFloorRule) {
  auto c10 = split_random(records(10), 1).counts();
  EXPECT_EQ(c10[Split::Train], 8u);
  EXPECT_EQ(c10[Split::Val], 1u);
  EXPECT_EQ(c10[Split::TestInDomain], 1u);
  auto c11 = split_random(records(11), 1).counts();
  EXPECT_EQ(c11[Split::Train], 9u);
  EXPECT_EQ(c11[Split::Val], 1u);
  EXPECT_EQ(c11[Split::TestInDomain], 1u);
  for (int n = 10; n < 200; n += 7) {
    auto c = split_random(records(n), 3).counts();
    EXPECT_EQ(c[Split::Val], static_cast<std::size_t>(n / 10));
    EXPECT_EQ(c[Split::TestInDomain], static_cast<std::size_t>(n / 10));
    EXPECT_EQ(c[Split::Train] + c[Split::Val] + c[Split::TestInDomain], static_cast<std::size_t>(n));
  }
}

TEST(SplitRandom, TooFewRecords) {
  EXPECT_EQ(kind_of([] { split_random(records(9), 1); }), ErrorKind::TooFewRecords);
  EXPECT_EQ(kind_of([] { split_random({}, 1); }), ErrorKind::TooFewRecords);
}

TEST(SplitRandom, DeterministicPerSeedAndPartitions) {
  const auto rs = records(100);
  const auto a = split_random(rs, 42), b = split_random(rs, 42), c = split_random(rs, 43);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_NE(a.assignment, c.assignment);
  EXPECT_EQ(a.assignment.size(), rs.size());
}

TEST(SplitRandom, DuplicateIdsRejected) {
  auto rs = records(12);
  rs[5].utterance_id = rs[2].utterance_id;
  EXPECT_EQ(kind_of([&] { split_random(rs, 1); }), ErrorKind::SchemaViolation);
}

TEST(ArgumentRecord, ReassignmentRejected) {
  auto r = record("u", "t");
  r.assign(Split::Val);
  r.assign(Split::Val);
  EXPECT_EQ(kind_of([&] { r.assign(Split::Train); }), ErrorKind::InvalidArgument);
}

TEST(SplitTopicTransfer, ToyCorpus) {
  std::vector<ArgumentRecord> rs;
  for (int t = 0; t < 5; ++t) {
    for (int k = 0; k < 8; ++k) rs.push_back(record("p" + std::to_string(t) + "-" + std::to_string(k), "pol" + std::to_string(t)));
  }
  for (int t = 0; t < 2; ++t) {
    for (int k = 0; k < 8; ++k) rs.push_back(record("n" + std::to_string(t) + "-" + std::to_string(k), "non" + std::to_string(t), false));
  }
  const auto plan = split_topic_transfer(rs, 4, 7);
  std::map<std::string, int> bucket_count;
  for (const auto& [topic, bucket] : plan.topic_buckets) ++bucket_count[bucket];
  EXPECT_EQ(bucket_count[kInDomain], 4);
  EXPECT_EQ(bucket_count[kOutOfDistribution], 1);
  EXPECT_EQ(bucket_count[kCrossDomain], 2);
  auto c = plan.counts();
  EXPECT_EQ(c[Split::TestOOD], 8u);
  EXPECT_EQ(c[Split::TestCrossDomain], 16u);
  EXPECT_EQ(c[Split::Train], 26u);  // 32 in-domain: floor(3.2) = 3 val, 3 test
  EXPECT_EQ(c[Split::Val], 3u);
  EXPECT_EQ(c[Split::TestInDomain], 3u);
  // No topic leaks across the three top-level buckets.
  for (const auto& r : rs) {
    const auto s = plan.assignment.at(r.utterance_id);
    const auto& bucket = plan.topic_buckets.at(r.topic_id);
    if (bucket == kInDomain) {
      EXPECT_TRUE(s == Split::Train || s == Split::Val || s == Split::TestInDomain);
    } else {
      EXPECT_EQ(s, bucket == kCrossDomain ? Split::TestCrossDomain : Split::TestOOD);
    }
  }
  EXPECT_EQ(split_topic_transfer(rs, 4, 7).assignment, plan.assignment);
}

TEST(SplitTopicTransfer, Errors) {
  std::vector<ArgumentRecord> rs;
  for (int k = 0; k < 12; ++k) rs.push_back(record("a" + std::to_string(k), "only"));
  EXPECT_EQ(kind_of([&] { split_topic_transfer(rs, 2, 1); }), ErrorKind::InsufficientPoliticalTopics);
  rs.push_back(record("b", "only", false));
  EXPECT_EQ(kind_of([&] { split_topic_transfer(rs, 1, 1); }), ErrorKind::SchemaViolation);
}

TEST(SplitPlan, JsonRoundTrip) {
  const auto plan = split_random(records(20), 5);
  const auto back = SplitPlan::from_json(nlohmann::json::parse(plan.to_json().dump()));
  EXPECT_EQ(back.assignment, plan.assignment);
  EXPECT_EQ(back.seed, 5u);
  EXPECT_EQ(back.to_json().dump(), plan.to_json().dump());
}

TEST(RecordJsonl, RoundTripKeepsUnknownFields) {
  testing::TempDir dir;
  auto r = record("u1", "t1");
  r.split = Split::TestOOD;
  r.extra["annotator_note"] = "kept";
  r.extra["weight"] = 2;
  write_jsonl({r, record("u2", "t2", false)}, dir.file("c.jsonl"));
  const std::string prefix = R"({"utterance_id":"u1","topic_id":"t1","is_political":true,"strategy":"emotional",)"
                             R"("condition":"avoid","text":"Text of u1.","scores":{"causal":0.25,"empirical":0.5,)"
                             R"("emotional":0.0,"moral":1.0},"split":"test_ood","annotator_note":"kept","weight":2})";
  EXPECT_EQ(testing::slurp(dir.file("c.jsonl")).substr(0, prefix.size()), prefix);
  const auto back = read_jsonl(dir.file("c.jsonl"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].extra["annotator_note"], "kept");
  EXPECT_EQ(back[0].split, Split::TestOOD);
  EXPECT_FALSE(back[1].split);
  write_jsonl(back, dir.file("d.jsonl"));
  EXPECT_EQ(testing::slurp(dir.file("c.jsonl")), testing::slurp(dir.file("d.jsonl")));
}

TEST(RecordJsonl, MalformedLineReportsLineNumber) {
  testing::TempDir dir;
  write_jsonl(records(8), dir.file("c.jsonl"));
  auto text = testing::slurp(dir.file("c.jsonl"));
  std::size_t pos = 0;
  for (int i = 0; i < 6; ++i) pos = text.find('\n', pos) + 1;
  text.insert(pos, "{\"utterance_id\": \"broken\"\n");
  testing::spit(dir.file("bad.jsonl"), text);
  try {
    read_jsonl(dir.file("bad.jsonl"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line_no(), 7u);
  }
  // Valid JSON with a missing field is also a schema error on its line.
  testing::spit(dir.file("missing.jsonl"), "{\"utterance_id\":\"x\"}\n");
  try {
    read_jsonl(dir.file("missing.jsonl"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line_no(), 1u);
  }
}

TEST(RecordJsonl, EmptyFile) {
  testing::TempDir dir;
  write_jsonl({}, dir.file("e.jsonl"));
  EXPECT_EQ(testing::slurp(dir.file("e.jsonl")), "");
  EXPECT_TRUE(read_jsonl(dir.file("e.jsonl")).empty());
}

TEST(RecordJsonl, OutOfRangeScoreRejected) {
  testing::TempDir dir;
  auto j = to_json(record("u", "t"));
  j["scores"]["moral"] = 1.5;
  testing::spit(dir.file("x.jsonl"), j.dump() + "\n");
  EXPECT_EQ(kind_of([&] { read_jsonl(dir.file("x.jsonl")); }), ErrorKind::SchemaViolation);
}

TEST(BuildCorpus, JoinsAndExcludes) {
  std::vector<UtteranceRow> debates;
  for (int i = 0; i < 3; ++i) {
    UtteranceRow row;
    row.utterance.utterance_id = "d-r1-" + std::to_string(i);
    row.utterance.text = "arg " + std::to_string(i);
    row.topic_id = i == 2 ? "t2" : "t1";
    row.strategy = StrategyKind::Moral;
    debates.push_back(row);
  }
  std::vector<ScoreRecord> scores{{"d-r1-0", {}, StrategyScoreVector(0, 0, 0, 1)},
                                  {"d-r1-1", {}, std::nullopt},
                                  {"d-r1-2", {}, StrategyScoreVector(1, 1, 1, 1)}};
  std::vector<StancePair> stances{{"t1", "a", "b", "T1", true}, {"t2", "c", "d", "T2", false}};
  const auto built = build_corpus(debates, scores, stances);
  ASSERT_EQ(built.records.size(), 2u);
  EXPECT_EQ(built.excluded, std::vector<std::string>{"d-r1-1"});
  EXPECT_TRUE(built.records[0].is_political);
  EXPECT_FALSE(built.records[1].is_political);
  EXPECT_EQ(built.records[1].strategy, StrategyKind::Moral);
  stances.pop_back();
  EXPECT_EQ(kind_of([&] { build_corpus(debates, scores, stances); }), ErrorKind::SchemaViolation);
}

TEST(ExportTraining, WritesEveryBucket) {
  testing::TempDir dir;
  auto rs = records(30);
  split_random(rs, 9).apply(rs);
  const auto paths = export_training(rs, dir.path());
  ASSERT_EQ(paths.size(), 5u);
  std::size_t total = 0;
  std::set<std::string> ids;
  for (auto s : kAllSplits) {
    const auto got = read_jsonl(dir.file(std::string(to_string(s)) + ".jsonl"));
    for (const auto& r : got) {
      EXPECT_EQ(r.split, s);
      ids.insert(r.utterance_id);
      for (double v : r.scores.values) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
    total += got.size();
  }
  EXPECT_EQ(total, 30u);
  EXPECT_EQ(ids.size(), 30u);
  EXPECT_EQ(testing::slurp(dir.file("test_ood.jsonl")), "");
}

}  // namespace
}  // namespace rhetoric
