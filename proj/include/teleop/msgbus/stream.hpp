#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "teleop/core/bytes.hpp"
#include "teleop/core/event_loop.hpp"
#include "teleop/core/rng.hpp"
#include "teleop/netem/link.hpp"

namespace teleop::msgbus {

inline constexpr std::size_t kHandshakeRequestSize = 64;
inline constexpr std::size_t kHandshakeResponseSize = 32;
inline constexpr std::size_t kMaxStreamPayload = 65535;

/// 2-byte header + [2-byte extended length iff payload > 125] + 4-byte mask + payload.
constexpr std::size_t stream_frame_size(std::size_t payload) {
  return payload + 6 + (payload > 125 ? 2 : 0);
}

using MaskKey = std::array<std::uint8_t, 4>;

/// Throws Error{encoding} when payload exceeds kMaxStreamPayload.
Bytes encode_stream_frame(ByteView payload, MaskKey mask);
/// Returns the unmasked payload; throws Error{decoding} on malformed frames.
Bytes decode_stream_frame(ByteView frame);

Bytes make_handshake_request(const std::array<std::uint8_t, 16>& nonce);
/// Throws Error{decoding} unless `request` is a well-formed upgrade request.
Bytes make_handshake_response(ByteView request);
bool handshake_response_matches(ByteView request, ByteView response);

struct StreamOptions {
  Micros rto = 200'000;
  int max_retransmits = 10;
};

struct StreamReceipt {
  std::uint64_t seq = 0;
  Micros sent_at = 0;
  std::size_t wire_size = 0;
};

struct StreamStats {
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t bytes_sent = 0;
};

class StreamConnection;

/// One side of an ordered, reliable, exactly-once message stream.
///
/// Segments lost on the emulated link are resent after one RTO; the receiver
/// releases segments strictly in sequence, so a loss delays every later
/// message (head-of-line blocking) but never reorders.
class StreamEndpoint {
 public:
  using MessageHandler = std::function<void(Bytes, Micros)>;

  /// Queued until the upgrade handshake completes. Throws Error{stream_closed}.
  StreamReceipt send(Bytes message);
  void on_message(MessageHandler handler) { handler_ = std::move(handler); }

  bool established() const { return established_; }
  bool closed() const { return closed_; }
  void close() { closed_ = true; }

  const StreamStats& stats() const { return stats_; }

 private:
  friend class StreamConnection;
  enum class SegmentKind : std::uint8_t { Request, Response, Data };
  struct Segment {
    std::uint64_t seq;
    SegmentKind kind;
    Bytes wire;
  };

  StreamEndpoint(EventLoop& loop, netem::Link& out, StreamOptions opts, std::uint64_t seed)
      : loop_(loop), out_(out), opts_(opts), rng_(seed) {}

  void transmit(std::shared_ptr<Segment> seg, int attempt);
  void on_segment(const Segment& seg);
  void deliver_in_order();
  void become_established();

  EventLoop& loop_;
  netem::Link& out_;
  StreamOptions opts_;
  Rng rng_;
  StreamEndpoint* peer_ = nullptr;
  bool established_ = false;
  std::optional<Micros> established_at_;
  bool closed_ = false;
  std::uint64_t next_seq_ = 0;
  std::uint64_t expected_seq_ = 0;
  std::map<std::uint64_t, Segment> reorder_;
  std::vector<Bytes> pending_;
  Bytes handshake_request_;
  MessageHandler handler_;
  StreamStats stats_;
  std::vector<TimerId> timers_;
};

/// Client/server pair over two one-way links. open() starts the client's
/// 64-byte upgrade request; the server answers with a 32-byte response.
class StreamConnection {
 public:
  StreamConnection(EventLoop& loop, netem::Link& client_to_server, netem::Link& server_to_client,
                   std::uint64_t seed, StreamOptions opts = {});
  ~StreamConnection();

  StreamConnection(const StreamConnection&) = delete;
  StreamConnection& operator=(const StreamConnection&) = delete;

  void open();
  bool established() const { return client_.established_ && server_.established_; }
  /// Time the client side saw the upgrade response.
  std::optional<Micros> established_at() const { return client_.established_at_; }

  StreamEndpoint& client() { return client_; }
  StreamEndpoint& server() { return server_; }

 private:
  EventLoop& loop_;
  StreamEndpoint client_;
  StreamEndpoint server_;
};

}  // namespace teleop::msgbus
