#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "teleop/core/error.hpp"
#include "teleop/netem/link.hpp"
#include "teleop/netem/profile.hpp"
#include "teleop/netem/profile_file.hpp"

using namespace teleop;
using namespace teleop::netem;

namespace {

NetProfile make(double owd, double sigma, double loss, double penalty) {
  return NetProfile{"p", owd, sigma, loss, penalty};
}

}  // namespace

TEST(Apply, ZeroProfileDeliversImmediately) {
  Rng rng(1);
  for (std::size_t n : {0u, 1u, 100u, 5000u}) {
    auto d = apply(NetProfile::zero(), Bytes(n, 7), 12345, rng);
    EXPECT_FALSE(d.dropped);
    EXPECT_EQ(d.deliver_at, 12345);
    EXPECT_EQ(d.payload.size(), n);
  }
}

TEST(Apply, SizePenaltyArithmetic) {
  Rng rng(1);
  auto d = apply(make(50, 0, 0, 10), Bytes(2048), 1000, rng);
  EXPECT_EQ(d.deliver_at, 1000 + 70'000);
}

TEST(Apply, LossFractionNearRate) {
  for (double rate : {0.01, 0.2, 0.5, 0.999}) {
    Rng rng(derive_seed(9, std::to_string(rate)));
    const int n = 10'000;
    int dropped = 0;
    for (int i = 0; i < n; ++i) dropped += apply(make(1, 0, rate, 0), Bytes(10), 0, rng).dropped;
    EXPECT_NEAR(dropped / double(n), rate, 0.02) << rate;
  }
}

TEST(Apply, EmpiricalMeanMatchesHalfNormalModel) {
  const auto p = make(90, 10, 0, 5);
  Rng rng(3);
  const int n = 10'000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += us_to_ms(apply(p, Bytes(512), 0, rng).deliver_at);
  const double expected = 90 + 10 * std::sqrt(2 / std::numbers::pi) + 0.5 * 5;
  EXPECT_NEAR(sum / n, expected, 0.03 * expected);
  EXPECT_NEAR(p.mean_delay_ms(512), expected, 1e-9);
}

TEST(Apply, MonotoneInPayloadWithoutJitter) {
  const auto p = make(20, 0, 0, 3.7);
  Rng rng(5);
  Micros prev = -1;
  for (std::size_t n = 0; n < 20'000; n += 97) {
    auto d = apply(p, Bytes(n), 0, rng);
    EXPECT_GE(d.deliver_at, prev);
    prev = d.deliver_at;
  }
}

TEST(Apply, DeterministicForSeed) {
  const auto p = make(40, 12, 0.1, 2);
  Rng a(77), b(77);
  for (int i = 0; i < 1000; ++i) {
    auto x = apply(p, Bytes(i % 300), i * 10, a);
    auto y = apply(p, Bytes(i % 300), i * 10, b);
    EXPECT_EQ(x.dropped, y.dropped);
    EXPECT_EQ(x.deliver_at, y.deliver_at);
  }
}

TEST(Apply, NeverDeliversBeforeSend) {
  const auto p = make(0, 30, 0.3, 0);
  Rng rng(8);
  for (int i = 0; i < 5000; ++i) {
    auto d = apply(p, Bytes(10), 999, rng);
    if (!d.dropped) {
      EXPECT_GE(d.deliver_at, 999);
    }
  }
}

TEST(Profile, ValidateRejectsBadFields) {
  EXPECT_THROW(make(-1, 0, 0, 0).validate(), Error);
  EXPECT_THROW(make(0, -1, 0, 0).validate(), Error);
  EXPECT_THROW(make(0, 0, 1.0, 0).validate(), Error);
  EXPECT_THROW(make(NAN, 0, 0, 0).validate(), Error);
  EXPECT_NO_THROW(make(0, 0, 0.999, 0).validate());
}

TEST(Profile, RouteDefaults) {
  EXPECT_EQ(profile_for_route(Route::Local).base_owd_ms, 90);
  EXPECT_EQ(profile_for_route(Route::HongKong).base_owd_ms, 140);
  EXPECT_EQ(profile_for_route(Route::Japan).base_owd_ms, 240);
  EXPECT_EQ(profile_for_route(Route::Belgium).base_owd_ms, 340);
  EXPECT_EQ(profile_for_route(Route::Japan).jitter_sigma_ms, 25);
  EXPECT_EQ(profile_for_route(Route::HongKong).loss_rate, 0.005);
  for (Route r : kAllRoutes) {
    // 2 x owd + 20 ms processing lands on the round-trip target.
    const double target[] = {200, 300, 500, 700};
    EXPECT_NEAR(2 * profile_for_route(r).base_owd_ms + 20, target[int(r)], 1e-9);
  }
  auto c = constrained_profile();
  EXPECT_EQ(c.base_owd_ms, 50);
  EXPECT_EQ(c.jitter_sigma_ms, 10);
  EXPECT_EQ(c.loss_rate, 0.01);
}

TEST(Profile, ParseRoute) {
  EXPECT_EQ(parse_route("Local"), Route::Local);
  EXPECT_EQ(parse_route("hong_kong"), Route::HongKong);
  EXPECT_EQ(parse_route("HK"), Route::HongKong);
  EXPECT_EQ(parse_route("belgium"), Route::Belgium);
  try {
    parse_route("mars");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
  }
}

TEST(Link, OutageDropsEverything) {
  EventLoop loop;
  Link link(loop, make(10, 0, 0, 0), 1);
  int arrived = 0;
  link.set_outage(true);
  for (int i = 0; i < 10; ++i) link.send(Bytes(4), [&](Bytes) { ++arrived; });
  link.set_outage(false);
  link.send(Bytes(4), [&](Bytes) { ++arrived; });
  loop.run();
  EXPECT_EQ(arrived, 1);
  EXPECT_EQ(link.stats().dropped, 10u);
  EXPECT_EQ(loop.now(), 10'000);
}

TEST(Link, DropFilterForcesLoss) {
  EventLoop loop;
  Link link(loop, NetProfile::zero(), 1);
  link.set_drop_filter([](ByteView b) { return b.size() == 3; });
  int arrived = 0;
  link.send(Bytes(3), [&](Bytes) { ++arrived; });
  link.send(Bytes(4), [&](Bytes) { ++arrived; });
  loop.run();
  EXPECT_EQ(arrived, 1);
}

TEST(ProfileFile, OverridesAndCustomNames) {
  auto t = ProfileTable::defaults();
  load_profile_text(
      "profiles:\n"
      "  - name: Local\n"
      "    base_owd_ms: 10\n"
      "    video_pipeline_ms: 5\n"
      "  - name: lab\n"
      "    base_owd_ms: 3\n"
      "    loss_rate: 0.5\n",
      t);
  EXPECT_EQ(t.control(Route::Local).base_owd_ms, 10);
  EXPECT_EQ(t.control(Route::Local).jitter_sigma_ms, 10);
  EXPECT_EQ(t.video_pipeline_ms(Route::Local), 5);
  ASSERT_NE(t.find("lab"), nullptr);
  EXPECT_EQ(t.find("lab")->loss_rate, 0.5);
  EXPECT_EQ(t.find("japan")->base_owd_ms, 240);
}

TEST(ProfileFile, UnknownKeyNamesLine) {
  auto t = ProfileTable::defaults();
  try {
    load_profile_text("profiles:\n  - name: Local\n    base_owd: 10\n", t, "x.yaml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("x.yaml:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("base_owd"), std::string::npos) << msg;
  }
}

TEST(ProfileFile, InvalidValueRejected) {
  auto t = ProfileTable::defaults();
  EXPECT_THROW(load_profile_text("profiles:\n  - name: Local\n    loss_rate: 1.5\n", t), Error);
  EXPECT_THROW(load_profile_file("/nonexistent/profiles.yaml", t), Error);
}
