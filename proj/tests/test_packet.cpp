#include <gtest/gtest.h>

#include "gen.hpp"
#include "teleop/core/error.hpp"
#include "teleop/msgbus/packet.hpp"

using namespace teleop;
using namespace teleop::msgbus;

namespace {

Packet random_packet(Rng& rng) {
  switch (gen::uniform_int(rng, 0, 8)) {
    case 0: return Packet::connect("c" + std::to_string(gen::uniform_int(rng, 0, 99999)));
    case 1: return Packet::connack();
    case 2: {
      const bool q1 = gen::coin(rng);
      return Packet::publish(gen::topic(rng), gen::bytes(rng, 300), q1 ? QoS::AtLeastOnce : QoS::AtMostOnce,
                             q1 ? std::optional<std::uint16_t>(gen::uniform_int(rng, 0, 65535))
                                : std::nullopt);
    }
    case 3: return Packet::puback(std::uint16_t(gen::uniform_int(rng, 0, 65535)));
    case 4: {
      std::string f = gen::topic(rng);
      if (gen::coin(rng, 0.3)) f += "/#";
      else if (gen::coin(rng, 0.3)) f = "+/" + f;
      return Packet::subscribe(std::uint16_t(gen::uniform_int(rng, 0, 65535)), f,
                               gen::coin(rng) ? QoS::AtLeastOnce : QoS::AtMostOnce);
    }
    case 5: return Packet::suback(std::uint16_t(gen::uniform_int(rng, 0, 65535)));
    case 6: return Packet::pingreq();
    case 7: return Packet::pingresp();
    default: return Packet::disconnect();
  }
}

Errc decode_error(const Bytes& wire) {
  try {
    decode_packet(wire);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::scenario;  // sentinel: no error
}

}  // namespace

TEST(Packet, PublishQos0Bytes) {
  auto wire = encode_packet(Packet::publish("a/b", to_bytes("hi"), QoS::AtMostOnce));
  EXPECT_EQ(to_hex(wire), "30 00 00 00 07 00 03 61 2F 62 68 69");
}

TEST(Packet, PingreqBytes) { EXPECT_EQ(to_hex(encode_packet(Packet::pingreq())), "70 00 00 00 00"); }

TEST(Packet, PublishQos1CarriesId) {
  auto wire = encode_packet(Packet::publish("t", to_bytes("x"), QoS::AtLeastOnce, 0x0102));
  EXPECT_EQ(to_hex(wire), "32 00 00 00 06 00 01 74 01 02 78");
}

TEST(Packet, SubscribeAndPubackBytes) {
  EXPECT_EQ(to_hex(encode_packet(Packet::puback(7))), "40 00 00 00 02 00 07");
  EXPECT_EQ(to_hex(encode_packet(Packet::subscribe(1, "a/+", QoS::AtLeastOnce))),
            "52 00 00 00 08 00 01 00 03 61 2F 2B 01");
  EXPECT_EQ(to_hex(encode_packet(Packet::connect("ab"))), "10 00 00 00 04 00 02 61 62");
}

TEST(Packet, RoundTripGenerated) {
  Rng rng(derive_seed(1, "packets"));
  for (int i = 0; i < 10'000; ++i) {
    Packet p = random_packet(rng);
    Bytes wire = encode_packet(p);
    ASSERT_EQ(wire.size(), encoded_size(p));
    ASSERT_EQ(decode_packet(wire), p) << to_hex(wire);
  }
}

TEST(Packet, InvariantViolationsRejectedOnEncode) {
  EXPECT_THROW(encode_packet(Packet::publish("a/+", {}, QoS::AtMostOnce)), Error);
  EXPECT_THROW(encode_packet(Packet::publish("", {}, QoS::AtMostOnce)), Error);
  EXPECT_THROW(encode_packet(Packet::publish(std::string("a\0b", 3), {}, QoS::AtMostOnce)), Error);
  EXPECT_THROW(encode_packet(Packet::publish("a", {}, QoS::AtLeastOnce)), Error);
  EXPECT_THROW(encode_packet(Packet::publish("a", {}, QoS::AtMostOnce, 3)), Error);
  EXPECT_THROW(encode_packet(Packet::publish(std::string(65536, 'a'), {}, QoS::AtMostOnce)), Error);
}

TEST(Packet, MalformedInputRejected) {
  EXPECT_EQ(decode_error({0x30, 0, 0}), Errc::decoding);                    // truncated header
  EXPECT_EQ(decode_error({0xF0, 0, 0, 0, 0}), Errc::decoding);              // bad kind
  EXPECT_EQ(decode_error({0x71, 0, 0, 0, 0}), Errc::decoding);              // reserved bit
  EXPECT_EQ(decode_error({0x70, 0, 0, 0, 1, 0}), Errc::decoding);           // ping with body
  EXPECT_EQ(decode_error({0x30, 0, 0, 0, 9, 0, 3, 'a'}), Errc::decoding);   // length mismatch
  EXPECT_EQ(decode_error({0x30, 0, 0, 0, 3, 0, 1, '#'}), Errc::decoding);   // wildcard topic
  Bytes ok = encode_packet(Packet::publish("a/b", to_bytes("hi"), QoS::AtMostOnce));
  ok.push_back(0);
  EXPECT_EQ(decode_error(ok), Errc::decoding);
}

TEST(Packet, TruncationAtEveryOffsetRejected) {
  Bytes wire = encode_packet(Packet::publish("arm/1/cmd", to_bytes("{}"), QoS::AtLeastOnce, 9));
  for (std::size_t n = 0; n < wire.size(); ++n) {
    Bytes cut(wire.begin(), wire.begin() + n);
    EXPECT_EQ(decode_error(cut), Errc::decoding) << n;
  }
}
