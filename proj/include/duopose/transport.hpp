#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "duopose/errors.hpp"
#include "duopose/rng.hpp"

namespace duopose {

/// Datagram channel between the two agents. Delivery may drop or delay whole
/// datagrams but never corrupts or duplicates them.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(std::vector<std::uint8_t> bytes) = 0;
  virtual std::vector<std::vector<std::uint8_t>> poll() = 0;
};

struct LinkStats {
  std::uint64_t sent_a_to_b = 0;
  std::uint64_t sent_b_to_a = 0;
  std::uint64_t dropped_a_to_b = 0;
  std::uint64_t dropped_b_to_a = 0;
};

namespace detail {

struct Direction {
  struct Entry {
    std::vector<std::uint8_t> bytes;
    std::uint64_t available_at_poll;
  };

  std::deque<Entry> queue;
  std::uint64_t polls_done = 0;
  double loss_rate = 0.0;
  std::uint64_t delay_polls = 0;
  Rng rng{0};
  std::uint64_t* sent_counter = nullptr;
  std::uint64_t* dropped_counter = nullptr;

  void push(std::vector<std::uint8_t> bytes) {
    if (sent_counter) ++*sent_counter;
    if (loss_rate > 0.0 && rng.bernoulli(loss_rate)) {
      if (dropped_counter) ++*dropped_counter;
      return;
    }
    queue.push_back({std::move(bytes), polls_done + 1 + delay_polls});
  }

  std::vector<std::vector<std::uint8_t>> drain() {
    ++polls_done;
    std::vector<std::vector<std::uint8_t>> out;
    while (!queue.empty() && queue.front().available_at_poll <= polls_done) {
      out.push_back(std::move(queue.front().bytes));
      queue.pop_front();
    }
    return out;
  }
};

struct LinkState {
  Direction a_to_b;
  Direction b_to_a;
  LinkStats stats;
};

class LinkEndpoint : public Transport {
 public:
  LinkEndpoint(std::shared_ptr<LinkState> link, bool is_a)
      : link_(std::move(link)), is_a_(is_a) {}

  void send(std::vector<std::uint8_t> bytes) override {
    (is_a_ ? link_->a_to_b : link_->b_to_a).push(std::move(bytes));
  }

  std::vector<std::vector<std::uint8_t>> poll() override {
    return (is_a_ ? link_->b_to_a : link_->a_to_b).drain();
  }

 private:
  std::shared_ptr<LinkState> link_;
  bool is_a_;
};

}  // namespace detail

/// Matched pair of in-process endpoints plus shared delivery counters.
struct TransportPair {
  std::unique_ptr<Transport> a;
  std::unique_ptr<Transport> b;
  std::shared_ptr<detail::LinkState> link;

  const LinkStats& stats() const { return link->stats; }
};

/// Lossless, zero-delay, FIFO in-process link.
inline TransportPair make_inproc_pair() {
  auto link = std::make_shared<detail::LinkState>();
  link->a_to_b.sent_counter = &link->stats.sent_a_to_b;
  link->a_to_b.dropped_counter = &link->stats.dropped_a_to_b;
  link->b_to_a.sent_counter = &link->stats.sent_b_to_a;
  link->b_to_a.dropped_counter = &link->stats.dropped_b_to_a;
  TransportPair pair;
  pair.a = std::make_unique<detail::LinkEndpoint>(link, true);
  pair.b = std::make_unique<detail::LinkEndpoint>(link, false);
  pair.link = std::move(link);
  return pair;
}

/// In-process link that drops each datagram independently with `loss_rate` and
/// delays delivery by `delay_polls` receiver polls; deterministic under `seed`.
inline TransportPair make_lossy_pair(double loss_rate, std::uint64_t delay_polls,
                                     std::uint64_t seed) {
  if (!(loss_rate >= 0.0 && loss_rate < 1.0)) {
    throw Error("lossy transport: loss_rate must be in [0, 1)");
  }
  TransportPair pair = make_inproc_pair();
  pair.link->a_to_b.loss_rate = loss_rate;
  pair.link->a_to_b.delay_polls = delay_polls;
  pair.link->a_to_b.rng = Rng(derive_seed(seed, 0xA2B));
  pair.link->b_to_a.loss_rate = loss_rate;
  pair.link->b_to_a.delay_polls = delay_polls;
  pair.link->b_to_a.rng = Rng(derive_seed(seed, 0xB2A));
  return pair;
}

/// Loopback UDP endpoint: binds `local_port` and sends datagrams to `peer_port`.
class UdpTransport : public Transport {
 public:
  UdpTransport(std::uint16_t local_port, std::uint16_t peer_port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw IoError("udp transport: socket() failed");
    sockaddr_in local{};
    local.sin_family = AF_INET;
    local.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    local.sin_port = htons(local_port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&local), sizeof(local)) != 0) {
      ::close(fd_);
      throw IoError("udp transport: bind to port " + std::to_string(local_port) + " failed");
    }
    const int flags = ::fcntl(fd_, F_GETFL, 0);
    ::fcntl(fd_, F_SETFL, flags | O_NONBLOCK);
    peer_ = {};
    peer_.sin_family = AF_INET;
    peer_.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    peer_.sin_port = htons(peer_port);
  }

  UdpTransport(const UdpTransport&) = delete;
  UdpTransport& operator=(const UdpTransport&) = delete;

  ~UdpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(std::vector<std::uint8_t> bytes) override {
    ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&peer_),
             sizeof(peer_));
  }

  std::vector<std::vector<std::uint8_t>> poll() override {
    std::vector<std::vector<std::uint8_t>> out;
    std::uint8_t buffer[65536];
    while (true) {
      const ssize_t n = ::recvfrom(fd_, buffer, sizeof(buffer), 0, nullptr, nullptr);
      if (n <= 0) break;
      out.emplace_back(buffer, buffer + n);
    }
    return out;
  }

 private:
  int fd_ = -1;
  sockaddr_in peer_{};
};

}  // namespace duopose
