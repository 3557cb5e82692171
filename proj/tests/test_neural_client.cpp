#include <doctest.h>

#include <cmath>
#include <cstring>

#include "cneval/neural_client.hpp"
#include "stub_servers.hpp"

using namespace cneval;

namespace {

std::vector<TextPair> sample_pairs(std::size_t n) {
  std::vector<TextPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"candidate number " + std::to_string(i) + " says hello",
                   "reference " + std::to_string(i * 7 % 5) + " is longer than the candidate"});
  }
  return out;
}

NeuralMetricSpec bart(BartVariant v, BartDirection d) {
  return {NeuralMetric::BartScore, v, d};
}

}  // namespace

TEST_CASE("neural metric names") {
  CHECK(NeuralMetricSpec::parse("bertscore").metric_id() == "bertscore");
  auto s = NeuralMetricSpec::parse("bartscore:cnn_para:recall");
  CHECK(s == bart(BartVariant::CnnPara, BartDirection::Recall));
  CHECK(s.metric_id() == "bartscore_cnn_para_recall");
  CHECK_THROWS_AS(NeuralMetricSpec::parse("bartscore"), InputError);
  CHECK_THROWS_AS(NeuralMetricSpec::parse("bartscore:large:f1"), InputError);
  CHECK_THROWS_AS(NeuralMetricSpec::parse("bartscore:cnn:sideways"), InputError);
  CHECK_THROWS_AS(NeuralMetricSpec::parse("bertscore:base"), InputError);
  CHECK_THROWS_AS(NeuralMetricSpec::parse("bleurt"), InputError);
  NeuralMetricSpec incomplete{NeuralMetric::BartScore, BartVariant::Base, std::nullopt};
  CHECK_THROWS_AS(incomplete.validate(), InputError);
}

TEST_CASE("health") {
  stub::StubSidecar sidecar;
  SidecarClient client(sidecar.url());
  auto h = client.health();
  CHECK(h.status == "ok");
  CHECK(h.metrics == std::vector<std::string>{"bertscore", "bartscore"});

  int dead_port;
  {
    stub::StubSidecar tmp;
    dead_port = tmp.port();
  }
  SidecarClient dead("http://127.0.0.1:" + std::to_string(dead_port),
                     {32, 1, std::chrono::milliseconds(1000)});
  CHECK_THROWS_AS(dead.health(), TransportError);
  CHECK_THROWS_AS(dead.score_batch(sample_pairs(1), NeuralMetricSpec{}), TransportError);
  CHECK_THROWS_AS(SidecarClient(sidecar.url(), {0, 1, std::chrono::milliseconds(1)}), InputError);
}

TEST_CASE("unsupported metric") {
  stub::SidecarBehaviour b;
  b.metrics = {"bertscore"};
  stub::StubSidecar sidecar(b);
  SidecarClient client(sidecar.url());
  CHECK_THROWS_AS(client.score_batch(sample_pairs(2), bart(BartVariant::Base, BartDirection::F1)),
                  UnsupportedMetric);
  CHECK(client.score_batch(sample_pairs(2), NeuralMetricSpec{}).size() == 2);
}

TEST_CASE("scores pass through bit-exact") {
  stub::SidecarBehaviour b;
  b.fixed_value = -1.0;
  stub::StubSidecar fixed(b);
  SidecarClient client(fixed.url());
  auto s = client.score_batch(sample_pairs(3), bart(BartVariant::Base, BartDirection::Recall));
  CHECK(s == std::vector<double>{-1.0, -1.0, -1.0});
  CHECK(client.score_batch({}, NeuralMetricSpec{}).empty());

  stub::StubSidecar sidecar;
  SidecarClient c2(sidecar.url());
  auto pairs = sample_pairs(5);
  auto got = c2.score_batch(pairs, bart(BartVariant::Cnn, BartDirection::Precision));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double want = stub::bart_precision(pairs[i].candidate, pairs[i].reference, "cnn");
    CHECK(std::memcmp(&got[i], &want, sizeof(double)) == 0);
  }
  auto bert = c2.score_batch({{"same text", "same text"}}, NeuralMetricSpec{});
  CHECK(bert[0] == 1.0);
}

TEST_CASE("bartscore f1 is the mean of precision and recall") {
  stub::StubSidecar sidecar;
  SidecarClient client(sidecar.url());
  auto pairs = sample_pairs(12);
  for (auto v : {BartVariant::Base, BartVariant::Cnn, BartVariant::CnnPara}) {
    auto p = client.score_batch(pairs, bart(v, BartDirection::Precision));
    auto r = client.score_batch(pairs, bart(v, BartDirection::Recall));
    auto f = client.score_batch(pairs, bart(v, BartDirection::F1));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(std::fabs(f[i] - (p[i] + r[i]) / 2.0) < 1e-6);
      CHECK(p[i] != r[i]);
    }
  }
}

TEST_CASE("results do not depend on batch size or concurrency") {
  stub::StubSidecar sidecar;
  auto pairs = sample_pairs(70);
  auto spec = bart(BartVariant::CnnPara, BartDirection::F1);
  std::vector<std::vector<double>> runs;
  for (std::size_t batch : {1u, 3u, 32u, 100u}) {
    for (int inflight : {1, 4}) {
      SidecarClient client(sidecar.url(), {batch, inflight, std::chrono::milliseconds(5000)});
      runs.push_back(client.score_batch(pairs, spec));
    }
  }
  for (const auto& r : runs) CHECK(r == runs.front());
  CHECK(runs.front().size() == 70);
  CHECK(sidecar.max_batch() == 70);

  stub::StubSidecar fresh;
  SidecarClient small(fresh.url(), {8, 2, std::chrono::milliseconds(5000)});
  small.score_batch(pairs, spec);
  CHECK(fresh.max_batch() == 8);
}

TEST_CASE("item failures carry absolute indices") {
  stub::SidecarBehaviour b;
  b.fail_indices = {1};
  stub::StubSidecar sidecar(b);
  SidecarClient client(sidecar.url(), {4, 1, std::chrono::milliseconds(5000)});
  try {
    client.score_batch(sample_pairs(10), NeuralMetricSpec{});
    FAIL("expected item failures");
  } catch (const ItemFailures& e) {
    std::vector<std::size_t> idx;
    for (const auto& [i, msg] : e.items()) idx.push_back(i);
    CHECK(idx == std::vector<std::size_t>{1, 5, 9});
  }
}

TEST_CASE("malformed responses") {
  stub::SidecarBehaviour b;
  b.malformed = true;
  stub::StubSidecar sidecar(b);
  SidecarClient client(sidecar.url());
  CHECK_THROWS_AS(client.score_batch(sample_pairs(2), NeuralMetricSpec{}), SchemaMismatch);
}

TEST_CASE("stub server contract") {
  stub::SidecarBehaviour b;
  auto [status, body] = stub::sidecar_response(b, {{"metric", "bartscore"}, {"pairs", nlohmann::json::array()}});
  CHECK(status == 400);
  auto [s2, b2] = stub::sidecar_response(b, {{"metric", "bleurt"}, {"pairs", nlohmann::json::array()}});
  CHECK(s2 == 400);
  auto [s3, b3] = stub::sidecar_response(
      b, {{"metric", "bertscore"}, {"pairs", {{{"candidate", "a"}, {"reference", "a"}}}}});
  CHECK(s3 == 200);
  CHECK(b3["scores"][0] == 1.0);
}
