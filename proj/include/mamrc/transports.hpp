// Copyright 2026 The mamrc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Model transports: a child process speaking newline-delimited JSON on
// stdin/stdout, and HTTP POST /infer with the same bodies. Both clients may
// be shared between worker threads; responses are matched to requests by id
// and the number of requests in flight is capped.

#ifndef MAMRC_TRANSPORTS_HPP_
#define MAMRC_TRANSPORTS_HPP_

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "mamrc/model_client.hpp"

namespace mamrc {

struct TransportOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 16;
};

namespace detail {

// Blocking counting gate for the in-flight cap.
class InFlightGate {
 public:
  explicit InFlightGate(std::size_t cap) : free_(cap == 0 ? 1 : cap) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t free_;
};

class GateHold {
 public:
  explicit GateHold(InFlightGate& g) : g_(g) { g_.acquire(); }
  ~GateHold() { g_.release(); }
  GateHold(const GateHold&) = delete;
  GateHold& operator=(const GateHold&) = delete;

 private:
  InFlightGate& g_;
};

}  // namespace detail

class SubprocessClient : public ModelClient {
 public:
  SubprocessClient(std::vector<std::string> argv, TransportOptions opts = {})
      : opts_(opts), gate_(opts.max_in_flight) {
    if (argv.empty()) throw InvalidArgument("empty model command");
    int in[2], out[2];
    if (::pipe2(in, O_CLOEXEC) != 0 || ::pipe2(out, O_CLOEXEC) != 0)
      throw TransportError(std::string("pipe: ") + std::strerror(errno));
    pid_ = ::fork();
    if (pid_ < 0) throw TransportError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in[0], STDIN_FILENO);
      ::dup2(out[1], STDOUT_FILENO);
      ::close(in[0]);
      ::close(in[1]);
      ::close(out[0]);
      ::close(out[1]);
      std::vector<char*> args;
      for (auto& a : argv) args.push_back(a.data());
      args.push_back(nullptr);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    to_child_ = in[1];
    from_child_ = out[0];
    ::signal(SIGPIPE, SIG_IGN);
    reader_ = std::thread([this] { read_loop(); });
  }

  ~SubprocessClient() override {
    if (to_child_ >= 0) ::close(to_child_);
    int status = 0;
    bool exited = false;
    for (int i = 0; i < 50 && !exited; ++i) {
      exited = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!exited) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    if (reader_.joinable()) reader_.join();
    ::close(from_child_);
  }

  SubprocessClient(const SubprocessClient&) = delete;
  SubprocessClient& operator=(const SubprocessClient&) = delete;

  ModelResponse query(const ModelRequest& req) override {
    detail::GateHold hold(gate_);
    std::future<std::string> reply;
    {
      std::lock_guard lock(mu_);
      if (dead_) throw TransportError("model process has exited");
      auto [it, fresh] = pending_.try_emplace(req.request_id);
      if (!fresh) throw InvalidArgument("request id already in flight: " + req.request_id);
      reply = it->second.get_future();
      const auto line = serialize_request(req) + "\n";
      if (!write_all(line)) {
        pending_.erase(req.request_id);
        throw TransportError("write to model process failed");
      }
    }
    if (reply.wait_for(opts_.timeout) != std::future_status::ready) {
      std::lock_guard lock(mu_);
      pending_.erase(req.request_id);
      timed_out_.insert(req.request_id);
      throw TransportError("model request " + req.request_id + " timed out");
    }
    return parse_response(reply.get(), req.mode);
  }

 private:
  bool write_all(const std::string& s) {
    std::size_t done = 0;
    while (done < s.size()) {
      const auto n = ::write(to_child_, s.data() + done, s.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      done += static_cast<std::size_t>(n);
    }
    return true;
  }

  void read_loop() {
    std::string buf;
    char chunk[4096];
    for (;;) {
      const auto n = ::read(from_child_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buf.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buf.find('\n')) != std::string::npos) {
        dispatch(buf.substr(0, nl));
        buf.erase(0, nl + 1);
      }
    }
    std::lock_guard lock(mu_);
    dead_ = true;
    for (auto& [id, p] : pending_)
      p.set_exception(std::make_exception_ptr(TransportError("model process closed its output")));
    pending_.clear();
  }

  void dispatch(const std::string& line) {
    if (trim(line).empty()) return;
    std::string id;
    try {
      const auto j = json::parse(line);
      if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
    } catch (const json::parse_error&) {
    }
    std::lock_guard lock(mu_);
    if (timed_out_.erase(id)) return;  // late reply to a timed-out request
    auto it = pending_.find(id);
    // An uncorrelatable line goes to the only waiter, which reports it.
    if (it == pending_.end() && pending_.size() == 1) it = pending_.begin();
    if (it == pending_.end()) return;
    it->second.set_value(line);
    pending_.erase(it);
  }

  TransportOptions opts_;
  detail::InFlightGate gate_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::thread reader_;
  std::mutex mu_;
  bool dead_ = false;
  std::map<std::string, std::promise<std::string>> pending_;
  std::set<std::string> timed_out_;
};

class HttpClient : public ModelClient {
 public:
  // `base` is scheme://host:port, e.g. http://127.0.0.1:8000.
  HttpClient(std::string base, TransportOptions opts = {})
      : base_(std::move(base)), opts_(opts), gate_(opts.max_in_flight) {}

  ModelResponse query(const ModelRequest& req) override {
    detail::GateHold hold(gate_);
    httplib::Client cli(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    const auto res = cli.Post("/infer", serialize_request(req), "application/json");
    if (!res) throw TransportError("POST " + base_ + "/infer failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ProtocolError("POST /infer returned status " + std::to_string(res->status), res->body);
    auto body = std::string(trim(res->body));
    return parse_response(body, req.mode);
  }

 private:
  std::string base_;
  TransportOptions opts_;
  detail::InFlightGate gate_;
};

// Endpoint specs: http://host:port, exec:<command line>. Mock endpoints are
// resolved by the caller (they need a corpus or fixtures).
inline std::unique_ptr<ModelClient> connect_endpoint(const std::string& spec,
                                                     TransportOptions opts = {}) {
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0)
    return std::make_unique<HttpClient>(spec, opts);
  if (spec.rfind("exec:", 0) == 0) {
    auto argv = split_ws(spec.substr(5));
    if (argv.empty()) throw InvalidArgument("exec: endpoint without a command");
    return std::make_unique<SubprocessClient>(std::move(argv), opts);
  }
  throw InvalidArgument("unsupported model endpoint '" + spec + "'");
}

}  // namespace mamrc

#endif  // MAMRC_TRANSPORTS_HPP_
