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
#include <httplib.h>

#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "rhetoric/analysis.hpp"
#include "rhetoric/http_scorer.hpp"
#include "rhetoric/jsonl.hpp"
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

double oracle_t_p(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

AnalysisArgument arg(int year, Party party, std::optional<StrategyScoreVector> s = std::nullopt) {
  AnalysisArgument a;
  a.year = year;
  a.debate_id = std::to_string(year) + "-1";
  a.speaker = std::string(to_string(party)) + " nominee";
  a.party = party;
  a.text = "An argument made on the stage that year.";
  a.word_count = 9;
  a.scores = s;
  return a;
}

std::vector<AnalysisArgument> scored_fixture() {
  std::vector<AnalysisArgument> out;
  jsonl::read(testing::fixture("scored_arguments.jsonl"),
              [&](const nlohmann::ordered_json& j, std::size_t) { out.push_back(analysis_argument_from_json(j)); });
  return out;
}

TEST(Transcripts, SegmentationMatchesGolden) {
  const auto turns = read_transcripts(testing::fixture("transcript.csv"));
  EXPECT_EQ(turns.size(), 20u);
  const auto args = segment_arguments(turns);
  const auto golden = jsonl::read_json(testing::fixture("transcript_golden.json"));
  ASSERT_EQ(args.size(), golden.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    auto j = nlohmann::json::parse(to_json(args[i]).dump());
    EXPECT_TRUE(j["scores"].is_null());
    j.erase("scores");
    EXPECT_EQ(j, golden[i]) << "argument " << i;
    EXPECT_TRUE(args[i].party == Party::Democrat || args[i].party == Party::Republican);
    EXPECT_GE(args[i].word_count, kMinArgumentWords);
  }
}

TEST(Transcripts, BadRowsCarryLineNumbers) {
  testing::TempDir dir;
  const std::string header = "year,debate_id,speaker,party,text\n";
  testing::spit(dir.file("a.csv"), header + "1960,d,A,Democrat,one two three four five\n1959,d,B,Republican,x\n");
  testing::spit(dir.file("b.csv"), header + "1960,d,A,Whig,one two three four five\n");
  testing::spit(dir.file("c.csv"), header + "sixty,d,A,Democrat,one two three four five\n");
  for (auto [file, line] : {std::pair{"a.csv", 3u}, std::pair{"b.csv", 2u}, std::pair{"c.csv", 2u}}) {
    try {
      read_transcripts(dir.file(file));
      FAIL() << file;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.line_no(), line) << file;
    }
  }
}

TEST(Party, Parsing) {
  EXPECT_EQ(parse_party("democrat"), Party::Democrat);
  EXPECT_EQ(parse_party("REPUBLICAN"), Party::Republican);
  EXPECT_EQ(parse_party("Moderator"), Party::Moderator);
  EXPECT_EQ(parse_party("Whig"), std::nullopt);
}

TEST(AffectGap, Examples) {
  EXPECT_NEAR(affect_gap(StrategyScoreVector(0.2, 0.4, 0.6, 0.8)), 0.4, 1e-15);
  EXPECT_EQ(affect_gap(StrategyScoreVector(1, 1, 0, 0)), -1.0);
  EXPECT_EQ(affect_gap(StrategyScoreVector(0, 0, 1, 1)), 1.0);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double c = u(g), e = u(g), em = u(g), mo = u(g);
    const double gap = affect_gap(StrategyScoreVector(c, e, em, mo));
    EXPECT_DOUBLE_EQ(gap, -affect_gap(StrategyScoreVector(em, mo, c, e)));
    EXPECT_GE(gap, -1.0);
    EXPECT_LE(gap, 1.0);
  }
}

TEST(OlsTrend, ExactLineAndFlat) {
  std::vector<std::pair<int, double>> line, flat;
  for (int y = 1960; y <= 2020; y += 4) {
    line.emplace_back(y, 0.1 + 0.0025 * (y - 1960));
    flat.emplace_back(y, 0.25);  // exactly representable: zero residuals
  }
  const auto r = ols_trend(line);
  EXPECT_NEAR(r.slope, 0.0025, 1e-15);
  EXPECT_NEAR(r.stderr_, 0.0, 1e-15);
  EXPECT_LT(r.p, 1e-12);
  const auto f = ols_trend(flat);
  EXPECT_EQ(f.slope, 0.0);
  EXPECT_EQ(f.p, 1.0);
  EXPECT_EQ(to_json(f).dump(), R"({"slope_per_year":0.0,"stderr":0.0,"t":0.0,"p":1.0,"n":16})");
}

TEST(OlsTrend, ShiftInvarianceAndOracle) {
  std::mt19937_64 g(17);
  std::normal_distribution<double> nd(0.0, 0.05);
  std::uniform_int_distribution<int> yd(0, 15);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<int, double>> pts, shifted;
    const int n = 5 + trial;
    for (int i = 0; i < n; ++i) {
      const int y = 1960 + 4 * yd(g);
      const double v = 0.2 + 0.001 * (y - 1960) + nd(g);
      pts.emplace_back(y, v);
      shifted.emplace_back(y + 400, v);
    }
    if (std::all_of(pts.begin(), pts.end(), [&](const auto& p) { return p.first == pts[0].first; })) continue;
    const auto a = ols_trend(pts), b = ols_trend(shifted);
    EXPECT_EQ(a.slope, b.slope);
    EXPECT_EQ(a.p, b.p);
    // Textbook formulas on raw years in long double.
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [y, v] : pts) {
      sx += y;
      sy += v;
      sxx += static_cast<long double>(y) * y;
      sxy += static_cast<long double>(y) * v;
    }
    const long double N = n;
    const long double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    const long double icpt = (sy - slope * sx) / N;
    long double sse = 0;
    for (auto [y, v] : pts) sse += (v - icpt - slope * y) * (v - icpt - slope * y);
    const long double se = std::sqrt(sse / (N - 2) / (sxx - sx * sx / N));
    EXPECT_NEAR(a.slope, static_cast<double>(slope), 1e-9);
    EXPECT_NEAR(a.stderr_, static_cast<double>(se), 1e-9);
    EXPECT_NEAR(a.p, oracle_t_p(static_cast<double>(slope / se), n - 2.0), 1e-7);
  }
}

TEST(OlsTrend, Degenerate) {
  EXPECT_EQ(kind_of([] { ols_trend({{1960, 0.1}, {1964, 0.2}}); }), ErrorKind::DegenerateInput);
  EXPECT_EQ(kind_of([] { ols_trend({{1960, 0.1}, {1960, 0.2}, {1960, 0.3}}); }), ErrorKind::DegenerateInput);
}

class FlakyScorer : public Scorer {
 public:
  // Items whose index (parsed from the text) is listed always fail.
  explicit FlakyScorer(std::set<int> bad) : bad_(std::move(bad)) {}
  std::vector<std::optional<StrategyScoreVector>> score(const std::vector<std::string>& texts) override {
    ++calls;
    std::vector<std::optional<StrategyScoreVector>> out;
    for (const auto& t : texts) {
      if (bad_.count(std::stoi(t))) {
        if (texts.size() > 1) throw Error(ErrorKind::Transport, "batch failed");
        out.emplace_back(std::nullopt);
      } else {
        out.emplace_back(StrategyScoreVector(0.1, 0.2, 0.3, 0.4));
      }
    }
    return out;
  }
  std::atomic<int> calls{0};

 private:
  std::set<int> bad_;
};

class DownScorer : public Scorer {
 public:
  std::vector<std::optional<StrategyScoreVector>> score(const std::vector<std::string>&) override {
    throw Error(ErrorKind::Transport, "connection refused");
  }
};

std::vector<AnalysisArgument> numbered(int n) {
  std::vector<AnalysisArgument> out;
  for (int i = 0; i < n; ++i) {
    auto a = arg(1960 + 4 * (i % 10), i % 2 ? Party::Republican : Party::Democrat);
    a.text = std::to_string(i);
    out.push_back(a);
  }
  return out;
}

TEST(ScoreCorpus, ConstantScorer) {
  auto args = numbered(70);
  ConstantScorer scorer(StrategyScoreVector(0.5, 0.25, 0.75, 1.0));
  const auto rep = score_corpus(args, scorer, {.batch_size = 32});
  EXPECT_EQ(rep.scored, 70u);
  EXPECT_TRUE(rep.missing.empty());
  for (const auto& a : args) EXPECT_EQ(a.scores->moral(), 1.0);
}

TEST(ScoreCorpus, ScorerDownFailsRun) {
  auto args = numbered(10);
  DownScorer scorer;
  testing::CaptureWarnings w;
  EXPECT_EQ(kind_of([&] { score_corpus(args, scorer); }), ErrorKind::ScorerUnavailable);
}

TEST(ScoreCorpus, FivePercentFailuresAreRecordedAndTolerated) {
  std::set<int> bad;
  for (int i = 0; i < 100; i += 20) bad.insert(i);
  auto args = numbered(100);
  FlakyScorer scorer(bad);
  testing::CaptureWarnings w;
  for (std::size_t workers : {1u, 4u}) {
    for (auto& a : args) a.scores.reset();
    const auto rep = score_corpus(args, scorer, {.batch_size = 10, .workers = workers});
    EXPECT_EQ(rep.scored, 95u);
    EXPECT_EQ(rep.missing, (std::vector<std::size_t>{0, 20, 40, 60, 80}));
    EXPECT_NEAR(rep.missing_fraction(), 0.05, 1e-15);
    for (int i : bad) EXPECT_FALSE(args[i].scores);
  }
  // Over the 10% ceiling the run fails.
  for (int i = 1; i < 100; i += 20) bad.insert(i);
  for (int i = 2; i < 100; i += 20) bad.insert(i);
  FlakyScorer worse(bad);
  for (auto& a : args) a.scores.reset();
  EXPECT_EQ(kind_of([&] { score_corpus(args, worse, {.batch_size = 10}); }), ErrorKind::ScorerUnavailable);
}

TEST(ScoreResponse, ContractViolations) {
  EXPECT_EQ(parse_score_response(R"({"scores":[[0,0.5,1,0.25]]})", 1)[0]->emotional(), 1.0);
  for (const char* body : {"not json", R"({"other":[]})", R"({"scores":[[0,0,0]]})", R"({"scores":[[0,0,0,1.5]]})",
                           R"({"scores":[[0,0,0,"a"]]})", R"({"scores":[]})"}) {
    EXPECT_EQ(kind_of([&] { parse_score_response(body, 1); }), ErrorKind::SchemaViolation) << body;
  }
  EXPECT_EQ(score_request_body({"a", "b"}), R"({"texts":["a","b"]})");
}

class ScoreServer {
 public:
  explicit ScoreServer(std::string reply = "") : reply_(std::move(reply)) {
    server_.Post("/api/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      if (!reply_.empty()) {
        res.set_content(reply_, "application/json");
        return;
      }
      const auto texts = nlohmann::json::parse(req.body).at("texts");
      nlohmann::json scores = nlohmann::json::array();
      for (const auto& t : texts) {
        const double v = std::min(1.0, t.get<std::string>().size() / 100.0);
        scores.push_back({v, 1.0 - v, 0.5, 0.0});
      }
      res.set_content(nlohmann::json{{"scores", scores}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ScoreServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }
  std::atomic<int> hits{0};

 private:
  std::string reply_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpScorer, RoundTrip) {
  ScoreServer server;
  HttpScorer scorer(server.base_url(), 5);
  const auto out = scorer.score({std::string(50, 'x'), std::string(10, 'y')});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0]->causal(), 0.5);
  EXPECT_DOUBLE_EQ(out[1]->empirical(), 0.9);
  auto args = numbered(9);
  const auto rep = score_corpus(args, scorer, {.batch_size = 4});
  EXPECT_EQ(rep.scored, 9u);
  EXPECT_EQ(server.hits.load(), 4);
}

TEST(HttpScorer, WrongLengthIsSchemaViolation) {
  ScoreServer server(R"({"scores":[[0.1,0.1,0.1,0.1]]})");
  HttpScorer scorer(server.base_url(), 5);
  EXPECT_EQ(kind_of([&] { scorer.score({"a", "b"}); }), ErrorKind::SchemaViolation);
}

TEST(HttpScorer, UnreachableIsRetryableTransport) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpScorer scorer("http://127.0.0.1:" + std::to_string(port), 2);
  try {
    scorer.score({"a"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Transport);
    EXPECT_TRUE(e.retryable());
  }
}

TEST(Partisan, SymmetricPartiesGiveNoDifference) {
  std::vector<AnalysisArgument> args;
  for (int i = 0; i < 6; ++i) {
    const StrategyScoreVector s(0.1 * i, 0.5, 0.05 * i, 0.9 - 0.1 * i);
    args.push_back(arg(1960, Party::Democrat, s));
    args.push_back(arg(1960, Party::Republican, s));
  }
  const auto rep = partisan_report(args);
  for (auto s : kAllStrategies) {
    EXPECT_EQ(rep.strategies[s].test.mean_diff, 0.0);
    EXPECT_NEAR(rep.strategies[s].test.p, 1.0, 1e-12);
  }
  ASSERT_EQ(rep.by_year.size(), 1u);
  EXPECT_TRUE(rep.by_year[0].strategies.causal().has_value());
}

TEST(Partisan, PlantedShiftAgainstOracle) {
  std::mt19937_64 g(23);
  std::normal_distribution<double> nd(0.0, 0.05);
  std::vector<AnalysisArgument> args;
  std::vector<double> dem, rep;
  for (int i = 0; i < 200; ++i) {
    const Party p = i % 2 ? Party::Republican : Party::Democrat;
    const double e = std::clamp(0.4 + (p == Party::Republican ? 0.1 : 0.0) + nd(g), 0.0, 1.0);
    args.push_back(arg(1960 + 4 * (i % 16), p, StrategyScoreVector(0.5, e, 0.4, 0.3)));
    (p == Party::Democrat ? dem : rep).push_back(e);
  }
  const auto r = partisan_report(args);
  const auto& c = r.strategies.empirical();
  auto mean = [](const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    return static_cast<double>(s / v.size());
  };
  auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    long double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / (v.size() - 1));
  };
  EXPECT_NEAR(c.mean_dem, mean(dem), 1e-12);
  EXPECT_NEAR(c.mean_rep, mean(rep), 1e-12);
  const double a = var(dem) / dem.size(), b = var(rep) / rep.size();
  const double t = (mean(dem) - mean(rep)) / std::sqrt(a + b);
  const double df = (a + b) * (a + b) / (a * a / (dem.size() - 1) + b * b / (rep.size() - 1));
  EXPECT_NEAR(c.test.t, t, 1e-9);
  EXPECT_NEAR(c.test.p, oracle_t_p(t, df), 1e-12);
  EXPECT_LT(c.test.mean_diff, -0.08);
  EXPECT_LT(c.test.p, 1e-6);
  // Constant strategies on both sides: equal means, p = 1.
  EXPECT_EQ(r.strategies.causal().test.p, 1.0);
  ASSERT_EQ(r.within.size(), 3u);
  EXPECT_EQ(r.within[2].party, "All");
  EXPECT_EQ(r.within[2].n, 200u);
}

TEST(Partisan, MissingParty) {
  std::vector<AnalysisArgument> args{arg(1960, Party::Democrat, StrategyScoreVector(0, 0, 0, 0)),
                                     arg(1964, Party::Democrat, StrategyScoreVector(1, 0, 0, 0)),
                                     arg(1964, Party::Republican, StrategyScoreVector(1, 0, 0, 0)),
                                     arg(1968, Party::Republican)};
  EXPECT_EQ(kind_of([&] { partisan_report(args); }), ErrorKind::MissingParty);
}

TEST(PlotData, MatchesGoldens) {
  const auto args = scored_fixture();
  EXPECT_EQ(trend_csv(args), testing::slurp(testing::fixture("trend_golden.csv")));
  EXPECT_EQ(partisan_csv(args), testing::slurp(testing::fixture("partisan_golden.csv")));
  testing::TempDir dir;
  const auto paths = emit_plot_data(args, dir.file("plots"));
  EXPECT_EQ(testing::slurp(paths[0]), testing::slurp(testing::fixture("trend_golden.csv")));
}

TEST(PlotData, EmptyAndSingletonYears) {
  EXPECT_EQ(trend_csv({}), trend_csv_header());
  EXPECT_EQ(partisan_csv({}), partisan_csv_header());
  EXPECT_EQ(trend_csv({arg(1960, Party::Democrat)}), trend_csv_header());
  const auto one = trend_csv({arg(1980, Party::Democrat, StrategyScoreVector(0.5, 0.25, 1, 0))});
  EXPECT_EQ(one, trend_csv_header() + "1980,1,0.500000,,0.250000,,1.000000,,0.000000,,0.125000\n");
}

TEST(PlotData, MeansMatchBruteForce) {
  const auto args = scored_fixture();
  const auto csv = trend_csv(args);
  std::map<int, std::vector<double>> causal;
  for (const auto& a : args) causal[a.year].push_back(a.scores->causal());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  for (const auto& [year, xs] : causal) {
    ASSERT_TRUE(std::getline(in, line));
    long double s = 0;
    for (double x : xs) s += x;
    EXPECT_EQ(line.substr(0, line.find(',')), std::to_string(year));
    const auto third = line.substr(line.find(',', line.find(',') + 1) + 1);
    EXPECT_NEAR(std::stod(third.substr(0, third.find(','))), static_cast<double>(s / xs.size()), 5e-7);
  }
}

TEST(AnalysisArgumentJson, RoundTripAndValidation) {
  auto a = arg(1992, Party::Republican, StrategyScoreVector(0.1, 0.2, 0.3, 0.4));
  const auto j = to_json(a);
  const auto back = analysis_argument_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  auto bad = nlohmann::json::parse(j.dump());
  bad["party"] = "Moderator";
  EXPECT_EQ(kind_of([&] { analysis_argument_from_json(bad); }), ErrorKind::SchemaViolation);
}

}  // namespace
}  // namespace rhetoric
