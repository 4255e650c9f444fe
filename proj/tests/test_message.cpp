#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "duopose/message.hpp"
#include "duopose/rng.hpp"
#include "support/golden.hpp"

using namespace duopose;

namespace {

EstimateMessage sample_message() {
  EstimateMessage msg;
  msg.agent_id = AgentId::b;
  msg.seq = 42;
  msg.timestamp = 1.25;
  msg.u = {0.1, -0.02};
  msg.points.push_back({1, {0.5, -0.25}, {0.01, -0.02}, 0.2, 0.001});
  msg.points.push_back({4, {-1.0, 0.125}, {0.0, 0.5}, 1.0 / 3.0, -0.25});
  return msg;
}

EstimateMessage random_message(Rng& rng) {
  EstimateMessage msg;
  msg.agent_id = rng.bernoulli(0.5) ? AgentId::a : AgentId::b;
  msg.seq = rng.next_u64();
  msg.timestamp = rng.uniform(0, 1e6);
  msg.u = {rng.uniform(-10, 10), rng.uniform(-10, 10)};
  const int n = static_cast<int>(rng.uniform(0, 6));
  std::uint32_t id = 0;
  for (int i = 0; i < n; ++i) {
    id += 1 + static_cast<std::uint32_t>(rng.uniform(0, 100));
    msg.points.push_back({id,
                          {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                          {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                          rng.uniform(0.01, 10),
                          rng.uniform(-5, 5)});
  }
  return msg;
}

}  // namespace

TEST_CASE("round trip is the identity") {
  const EstimateMessage msg = sample_message();
  const auto bytes = serialize(msg);
  CHECK(bytes.size() == 38 + 52 * msg.points.size());
  const EstimateMessage back = deserialize(bytes);
  CHECK(back == msg);
}

TEST_CASE("randomized messages round trip bit-exactly") {
  Rng rng(51);
  for (int i = 0; i < 2000; ++i) {
    const EstimateMessage msg = random_message(rng);
    const auto bytes = serialize(msg);
    const EstimateMessage back = deserialize(bytes);
    REQUIRE(back == msg);
    REQUIRE(serialize(back) == bytes);
  }
}

TEST_CASE("unsupported version is rejected") {
  auto bytes = serialize(sample_message());
  bytes[0] = 2;
  CHECK_THROWS_AS(deserialize(bytes), MalformedMessage);
}

TEST_CASE("truncated messages are rejected") {
  const auto bytes = serialize(sample_message());
  for (const std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{5}, std::size_t{37},
                                bytes.size() - 1}) {
    CHECK_THROWS_AS(
        deserialize(std::span<const std::uint8_t>(bytes.data(), cut)), MalformedMessage);
  }
  // Trailing garbage is a length mismatch, not ignored.
  auto padded = bytes;
  padded.push_back(0);
  CHECK_THROWS_AS(deserialize(padded), MalformedMessage);
}

TEST_CASE("non-finite fields are rejected") {
  EstimateMessage msg = sample_message();
  msg.points[0].chi = std::numeric_limits<double>::quiet_NaN();
  const auto bytes = serialize(msg);
  CHECK_THROWS_AS(deserialize(bytes), MalformedMessage);

  EstimateMessage msg2 = sample_message();
  msg2.timestamp = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(deserialize(serialize(msg2)), MalformedMessage);
}

TEST_CASE("out-of-order point ids are rejected") {
  EstimateMessage msg = sample_message();
  std::swap(msg.points[0], msg.points[1]);
  CHECK_THROWS_AS(deserialize(serialize(msg)), MalformedMessage);

  EstimateMessage dup = sample_message();
  dup.points[1].point_id = dup.points[0].point_id;
  CHECK_THROWS_AS(deserialize(serialize(dup)), MalformedMessage);
}

TEST_CASE("invalid agent id is rejected") {
  auto bytes = serialize(sample_message());
  bytes[1] = 7;
  CHECK_THROWS_AS(deserialize(bytes), MalformedMessage);
}

TEST_CASE("golden byte vector decodes to the recorded message") {
  // Recorded once from this encoder; guards the wire layout against drift.
  CHECK(serialize(golden_message()) == golden_bytes());
  CHECK(deserialize(golden_bytes()) == golden_message());
  CHECK(golden_message() == sample_message());
}
