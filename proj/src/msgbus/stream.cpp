#include "teleop/msgbus/stream.hpp"

#include <algorithm>
#include <cstring>

#include <spdlog/spdlog.h>

#include "teleop/core/error.hpp"

namespace teleop::msgbus {

namespace {

constexpr std::string_view kRequestMagic = "OSTRM/1 UPGRADE\n";
constexpr std::string_view kResponseMagic = "OSTRM/1 ACCEPT\r\n";
static_assert(kRequestMagic.size() == 16 && kResponseMagic.size() == 16);

constexpr std::uint8_t kFinBinary = 0x82;
constexpr std::uint8_t kMaskBit = 0x80;

std::array<std::uint8_t, 16> accept_key(ByteView nonce) {
  std::array<std::uint8_t, 16> out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nonce[i] ^ 0xA5 ^ (i * 17));
  }
  return out;
}

}  // namespace

Bytes encode_stream_frame(ByteView payload, MaskKey mask) {
  if (payload.size() > kMaxStreamPayload) {
    throw Error(Errc::encoding, "stream message exceeds " + std::to_string(kMaxStreamPayload) + " bytes");
  }
  ByteWriter w;
  w.buffer().reserve(stream_frame_size(payload.size()));
  w.u8(kFinBinary);
  if (payload.size() > 125) {
    w.u8(kMaskBit | 126);
    w.u16(static_cast<std::uint16_t>(payload.size()));
  } else {
    w.u8(static_cast<std::uint8_t>(kMaskBit | payload.size()));
  }
  w.raw(mask);
  for (std::size_t i = 0; i < payload.size(); ++i) w.u8(payload[i] ^ mask[i % 4]);
  return w.take();
}

Bytes decode_stream_frame(ByteView frame) {
  ByteReader r(frame);
  if (r.u8() != kFinBinary) throw Error(Errc::decoding, "stream frame: bad opcode byte");
  const std::uint8_t b1 = r.u8();
  if (!(b1 & kMaskBit)) throw Error(Errc::decoding, "stream frame: mask bit not set");
  std::size_t len = b1 & 0x7F;
  if (len == 127) throw Error(Errc::decoding, "stream frame: 64-bit length unsupported");
  if (len == 126) {
    len = r.u16();
    if (len <= 125) throw Error(Errc::decoding, "stream frame: non-minimal extended length");
  }
  auto mask = r.raw(4);
  auto body = r.raw(len);
  if (!r.done()) throw Error(Errc::decoding, "stream frame: trailing bytes");
  Bytes out(body.begin(), body.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= mask[i % 4];
  return out;
}

Bytes make_handshake_request(const std::array<std::uint8_t, 16>& nonce) {
  ByteWriter w;
  w.raw(kRequestMagic);
  w.raw(nonce);
  w.buffer().resize(kHandshakeRequestSize, 0);
  return w.take();
}

Bytes make_handshake_response(ByteView request) {
  if (request.size() != kHandshakeRequestSize ||
      !std::equal(kRequestMagic.begin(), kRequestMagic.end(), request.begin())) {
    throw Error(Errc::decoding, "malformed upgrade request");
  }
  ByteWriter w;
  w.raw(kResponseMagic);
  w.raw(accept_key(request.subspan(16, 16)));
  return w.take();
}

bool handshake_response_matches(ByteView request, ByteView response) {
  if (response.size() != kHandshakeResponseSize) return false;
  try {
    auto expected = make_handshake_response(request);
    return std::equal(expected.begin(), expected.end(), response.begin());
  } catch (const Error&) {
    return false;
  }
}

StreamReceipt StreamEndpoint::send(Bytes message) {
  if (closed_) throw Error(Errc::stream_closed, "send on closed stream");
  if (message.size() > kMaxStreamPayload) {
    throw Error(Errc::encoding, "stream message exceeds " + std::to_string(kMaxStreamPayload) + " bytes");
  }
  StreamReceipt receipt{stats_.messages_sent++, loop_.now(), stream_frame_size(message.size())};
  if (!established_) {
    pending_.push_back(std::move(message));
    return receipt;
  }
  MaskKey mask;
  for (auto& b : mask) b = static_cast<std::uint8_t>(rng_() & 0xFF);
  auto seg = std::make_shared<Segment>(Segment{next_seq_++, SegmentKind::Data,
                                               encode_stream_frame(message, mask)});
  transmit(std::move(seg), 0);
  return receipt;
}

void StreamEndpoint::transmit(std::shared_ptr<Segment> seg, int attempt) {
  if (closed_) return;
  stats_.bytes_sent += seg->wire.size();
  StreamEndpoint* peer = peer_;
  auto delivery = out_.send(seg->wire, [peer, seq = seg->seq, kind = seg->kind](Bytes b) {
    peer->on_segment(Segment{seq, kind, std::move(b)});
  });
  if (!delivery.dropped) return;
  if (attempt >= opts_.max_retransmits) {
    spdlog::warn("stream: segment {} lost {} times, closing", seg->seq, attempt + 1);
    closed_ = true;
    return;
  }
  ++stats_.retransmissions;
  timers_.push_back(loop_.schedule_after(opts_.rto, [this, seg, attempt] { transmit(seg, attempt + 1); }));
}

void StreamEndpoint::on_segment(const Segment& seg) {
  if (seg.seq < expected_seq_) return;
  reorder_.emplace(seg.seq, seg);
  deliver_in_order();
}

void StreamEndpoint::deliver_in_order() {
  for (auto it = reorder_.find(expected_seq_); it != reorder_.end(); it = reorder_.find(expected_seq_)) {
    Segment seg = std::move(it->second);
    reorder_.erase(it);
    ++expected_seq_;
    switch (seg.kind) {
      case SegmentKind::Request: {
        Bytes response;
        try {
          response = make_handshake_response(seg.wire);
        } catch (const Error& e) {
          spdlog::warn("stream: {}", e.what());
          closed_ = true;
          return;
        }
        handshake_request_ = seg.wire;
        transmit(std::make_shared<Segment>(Segment{next_seq_++, SegmentKind::Response, std::move(response)}), 0);
        become_established();
        break;
      }
      case SegmentKind::Response:
        if (!handshake_response_matches(handshake_request_, seg.wire)) {
          spdlog::warn("stream: upgrade response mismatch");
          closed_ = true;
          return;
        }
        become_established();
        break;
      case SegmentKind::Data: {
        Bytes payload;
        try {
          payload = decode_stream_frame(seg.wire);
        } catch (const Error& e) {
          spdlog::warn("stream: {}", e.what());
          continue;
        }
        ++stats_.messages_delivered;
        if (handler_) handler_(std::move(payload), loop_.now());
        break;
      }
    }
  }
}

void StreamEndpoint::become_established() {
  established_ = true;
  established_at_ = loop_.now();
  auto pending = std::move(pending_);
  pending_.clear();
  // Receipts were already issued for these; re-sending must not recount them.
  for (auto& message : pending) {
    MaskKey mask;
    for (auto& b : mask) b = static_cast<std::uint8_t>(rng_() & 0xFF);
    transmit(std::make_shared<Segment>(Segment{next_seq_++, SegmentKind::Data,
                                               encode_stream_frame(message, mask)}),
             0);
  }
}

StreamConnection::StreamConnection(EventLoop& loop, netem::Link& client_to_server,
                                   netem::Link& server_to_client, std::uint64_t seed, StreamOptions opts)
    : loop_(loop),
      client_(loop, client_to_server, opts, derive_seed(seed, "stream/client")),
      server_(loop, server_to_client, opts, derive_seed(seed, "stream/server")) {
  client_.peer_ = &server_;
  server_.peer_ = &client_;
}

StreamConnection::~StreamConnection() {
  for (auto id : client_.timers_) loop_.cancel(id);
  for (auto id : server_.timers_) loop_.cancel(id);
}

void StreamConnection::open() {
  if (client_.next_seq_ != 0) return;
  std::array<std::uint8_t, 16> nonce;
  for (auto& b : nonce) b = static_cast<std::uint8_t>(client_.rng_() & 0xFF);
  client_.handshake_request_ = make_handshake_request(nonce);
  auto seg = std::make_shared<StreamEndpoint::Segment>(
      StreamEndpoint::Segment{client_.next_seq_++, StreamEndpoint::SegmentKind::Request,
                              client_.handshake_request_});
  client_.transmit(std::move(seg), 0);
}

}  // namespace teleop::msgbus
