#include "bdcopy/remote_oracle.hpp"

#include <json.hpp>

#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace bdcopy {

using nlohmann::json;

namespace detail {

/// Bidirectional newline-delimited byte stream over a pipe pair or a socket.
class LineChannel {
 public:
  static std::unique_ptr<LineChannel> spawn(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw OracleError("pipe: " + std::string(std::strerror(errno)));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw OracleError("pipe: " + std::string(std::strerror(errno)));
    }
    const pid_t pid = ::fork();
    if (pid < 0) throw OracleError("fork: " + std::string(std::strerror(errno)));
    if (pid == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    auto channel = std::unique_ptr<LineChannel>(new LineChannel);
    channel->write_fd_ = to_child[1];
    channel->read_fd_ = from_child[0];
    channel->child_ = pid;
    return channel;
  }

  static std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
      throw OracleError("resolve " + host + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    int last_errno = 0;
    for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
      fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
      last_errno = errno;
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) {
      throw OracleError("connect " + host + ":" + service + ": " + std::strerror(last_errno));
    }
    auto channel = std::unique_ptr<LineChannel>(new LineChannel);
    channel->read_fd_ = fd;
    channel->write_fd_ = fd;
    channel->socket_ = true;
    return channel;
  }

  ~LineChannel() {
    close_write();
    if (read_fd_ >= 0 && read_fd_ != write_fd_) ::close(read_fd_);
    if (socket_ && read_fd_ >= 0) ::close(read_fd_);
    if (child_ > 0) {
      int status = 0;
      ::waitpid(child_, &status, 0);
    }
  }

  void write_line(const std::string& line) {
    std::string buffer = line;
    buffer.push_back('\n');
    std::size_t offset = 0;
    while (offset < buffer.size()) {
      const ssize_t n = socket_ ? ::send(write_fd_, buffer.data() + offset, buffer.size() - offset,
                                         MSG_NOSIGNAL)
                                : ::write(write_fd_, buffer.data() + offset, buffer.size() - offset);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw OracleError("write to teacher failed: " + std::string(std::strerror(errno)));
      }
      offset += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    for (;;) {
      if (const auto pos = pending_.find('\n'); pos != std::string::npos) {
        std::string line = pending_.substr(0, pos);
        pending_.erase(0, pos + 1);
        return line;
      }
      char chunk[65536];
      const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw OracleError("read from teacher failed: " + std::string(std::strerror(errno)));
      }
      if (n == 0) throw OracleError("teacher closed the connection");
      pending_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close_write() {
    if (socket_) {
      if (write_fd_ >= 0) ::shutdown(write_fd_, SHUT_WR);
      return;
    }
    if (write_fd_ >= 0) {
      ::close(write_fd_);
      write_fd_ = -1;
    }
  }

 private:
  LineChannel() = default;

  int read_fd_ = -1;
  int write_fd_ = -1;
  pid_t child_ = -1;
  bool socket_ = false;
  std::string pending_;
};

}  // namespace detail

RemoteEndpoint RemoteEndpoint::parse(const std::string& text) {
  RemoteEndpoint ep;
  if (text.rfind("stdio:", 0) == 0) {
    ep.transport = Transport::Stdio;
    ep.command = text.substr(6);
    if (ep.command.empty()) throw InvalidArgument("remote endpoint: empty command");
    return ep;
  }
  if (text.rfind("tcp:", 0) == 0) {
    const std::string rest = text.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw InvalidArgument("remote endpoint: expected tcp:<host>:<port>, got '" + text + "'");
    }
    ep.transport = Transport::Tcp;
    ep.host = rest.substr(0, colon);
    try {
      ep.port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("remote endpoint: bad port in '" + text + "'");
    }
    if (ep.port <= 0 || ep.port > 65535) throw InvalidArgument("remote endpoint: port out of range");
    return ep;
  }
  throw InvalidArgument("remote endpoint: expected stdio:<cmd> or tcp:<host>:<port>, got '" + text +
                        "'");
}

std::string RemoteEndpoint::to_string() const {
  if (transport == Transport::Stdio) return "stdio:" + command;
  return "tcp:" + host + ":" + std::to_string(port);
}

RemoteOracle::RemoteOracle(const RemoteEndpoint& endpoint, Index expected_dim) {
  // A teacher that dies mid-write must surface as an error, not a signal.
  ::signal(SIGPIPE, SIG_IGN);
  channel_ = endpoint.transport == RemoteEndpoint::Transport::Stdio
                 ? detail::LineChannel::spawn(endpoint.command)
                 : detail::LineChannel::connect_tcp(endpoint.host, endpoint.port);

  channel_->write_line(R"({"op":"hello"})");
  json reply;
  try {
    reply = json::parse(channel_->read_line());
  } catch (const json::exception& e) {
    throw OracleError(std::string("handshake: malformed reply: ") + e.what());
  }
  if (!reply.is_object() || reply.value("op", "") != "hello" || !reply.contains("dim") ||
      !reply["dim"].is_number_integer()) {
    throw OracleError("handshake: unexpected reply " + reply.dump());
  }
  dim_ = reply["dim"].get<Index>();
  server_name_ = reply.value("name", "unnamed");
  if (dim_ < 1) throw OracleError("handshake: server announced dimension " + std::to_string(dim_));
  if (expected_dim > 0 && dim_ != expected_dim) {
    throw OracleError("handshake: server dimension " + std::to_string(dim_) + " != expected " +
                      std::to_string(expected_dim));
  }
}

RemoteOracle::~RemoteOracle() {
  if (!channel_) return;
  try {
    channel_->write_line(R"({"op":"bye"})");
  } catch (const OracleError&) {
  }
}

LabelVector RemoteOracle::classify_rows(const PointsRef& points) const {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  const std::string where = "request " + std::to_string(id) + ": ";

  json x = json::array();
  for (Index i = 0; i < points.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < points.cols(); ++j) row.push_back(points(i, j));
    x.push_back(std::move(row));
  }
  json request = {{"op", "predict"}, {"id", id}, {"x", std::move(x)}};

  json reply;
  try {
    channel_->write_line(request.dump());
    reply = json::parse(channel_->read_line());
  } catch (const json::exception& e) {
    throw OracleError(where + "malformed response: " + e.what());
  } catch (const OracleError& e) {
    throw OracleError(where + e.what());
  }

  if (!reply.is_object()) throw OracleError(where + "response is not an object");
  if (reply.contains("error")) throw OracleError(where + "server error: " + reply["error"].dump());
  if (!reply.contains("id") || !reply["id"].is_number_unsigned() ||
      reply["id"].get<std::uint64_t>() != id) {
    throw OracleError(where + "id mismatch in response " + reply.value("id", json()).dump());
  }
  const auto y = reply.find("y");
  if (y == reply.end() || !y->is_array()) throw OracleError(where + "missing label array");
  if (static_cast<Index>(y->size()) != points.rows()) {
    throw OracleError(where + "expected " + std::to_string(points.rows()) + " labels, got " +
                      std::to_string(y->size()));
  }
  LabelVector labels;
  labels.reserve(y->size());
  for (const auto& v : *y) {
    if (!v.is_number_integer()) throw OracleError(where + "non-integer label " + v.dump());
    const auto value = v.get<long long>();
    if (value != 1 && value != -1) {
      throw OracleError(where + "label outside {-1,+1}: " + std::to_string(value));
    }
    labels.push_back(value == 1 ? Label::Positive : Label::Negative);
  }
  return labels;
}

std::shared_ptr<const RemoteOracle> connect_remote_oracle(const RemoteEndpoint& endpoint, Index dim) {
  return std::make_shared<RemoteOracle>(endpoint, dim);
}

}  // namespace bdcopy
