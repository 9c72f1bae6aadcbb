#pragma once

#include "bdcopy/oracle.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

namespace bdcopy {

/// Where a remote teacher lives: a subprocess spoken to over its stdin/stdout,
/// or a TCP server.
///
/// Textual form: `stdio:<shell command>` or `tcp:<host>:<port>`.
struct RemoteEndpoint {
  enum class Transport { Stdio, Tcp };

  Transport transport = Transport::Stdio;
  std::string command;
  std::string host;
  int port = 0;

  static RemoteEndpoint parse(const std::string& text);
  std::string to_string() const;
};

namespace detail {
class LineChannel;
}

/// Client side of the newline-delimited JSON teacher protocol.
///
///   -> {"op":"hello"}                     <- {"op":"hello","dim":D,"name":S}
///   -> {"op":"predict","id":N,"x":[[..]]}  <- {"id":N,"y":[-1|1,...]}
///   -> {"op":"bye"}
///
/// One request per batch, serialized over a single connection. There are no
/// retries: any failure surfaces as OracleError naming the request id, so the
/// budget accounting of a wrapping CountingOracle stays truthful.
class RemoteOracle final : public Oracle {
 public:
  RemoteOracle(const RemoteEndpoint& endpoint, Index expected_dim);
  ~RemoteOracle() override;

  RemoteOracle(const RemoteOracle&) = delete;
  RemoteOracle& operator=(const RemoteOracle&) = delete;

  Index dim() const override { return dim_; }
  std::string name() const override { return "remote:" + server_name_; }
  const std::string& server_name() const { return server_name_; }

 protected:
  LabelVector classify_rows(const PointsRef& points) const override;

 private:
  std::unique_ptr<detail::LineChannel> channel_;
  mutable std::mutex mutex_;
  mutable std::uint64_t next_id_ = 1;
  Index dim_ = 0;
  std::string server_name_;
};

/// Connects and performs the handshake. `dim` <= 0 accepts whatever dimension
/// the server announces.
std::shared_ptr<const RemoteOracle> connect_remote_oracle(const RemoteEndpoint& endpoint, Index dim);

}  // namespace bdcopy
