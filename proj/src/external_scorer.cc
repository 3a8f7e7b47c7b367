//
// Copyright 2026 The ISAAC Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "isaac/external_scorer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "json.hpp"

extern char** environ;

namespace isaac {
namespace {

using nlohmann::json;

std::string Quote(std::string_view s) { return json(std::string(s)).dump(); }

void CloseFd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

std::string EncodeRequest(const ScoreRequest& request) {
  return R"({"id":)" + Quote(request.id) + R"(,"drug":)" + Quote(request.drug) +
         R"(,"target":)" + Quote(request.target) + "}";
}

WireResponse DecodeResponse(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw AuditError("malformed response line '" + std::string(line) +
                     "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string()) {
    throw AuditError("response line without string id: '" + std::string(line) +
                     "'");
  }
  WireResponse out;
  out.id = doc["id"].get<std::string>();
  if (doc.contains("error")) {
    out.error = doc["error"].is_string() ? doc["error"].get<std::string>()
                                         : doc["error"].dump();
    return out;
  }
  if (!doc.contains("score") || !doc["score"].is_number()) {
    throw AuditError("response for id '" + out.id + "' has no numeric score");
  }
  out.score = doc["score"].get<double>();
  return out;
}

bool IsHandshake(std::string_view line) {
  try {
    const json doc = json::parse(line);
    return doc.is_object() && doc.contains("protocol") &&
           doc["protocol"] == kProtocolName;
  } catch (const json::exception&) {
    return false;
  }
}

ExternalProcessEndpoint::ExternalProcessEndpoint(ExternalProcessOptions options)
    : options_(std::move(options)),
      identity_(options_.identity.empty() ? options_.command
                                          : options_.identity) {
  if (options_.command.empty()) throw AuditError("empty scorer command");
  if (options_.batch_size == 0) options_.batch_size = 1;
}

ExternalProcessEndpoint::~ExternalProcessEndpoint() { Stop(); }

void ExternalProcessEndpoint::Start() {
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  // The child must not inherit an ignored SIGPIPE.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  sigset_t defaults;
  sigemptyset(&defaults);
  sigaddset(&defaults, SIGPIPE);
  posix_spawnattr_setsigdefault(&attr, &defaults);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETSIGDEF);

  const char* argv[] = {"sh", "-c", options_.command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr,
                               const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw TransportError("cannot spawn '" + options_.command +
                         "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();

  WriteAll(std::string(kHandshakeLine) + "\n");
  const std::string reply = ReadLine(Clock::now() + options_.timeout);
  if (!IsHandshake(reply)) {
    Stop();
    throw AuditError("scorer '" + identity_ + "' sent bad handshake '" + reply +
                     "'");
  }
}

void ExternalProcessEndpoint::Stop() {
  CloseFd(to_child_);
  CloseFd(from_child_);
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 200 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  buffer_.clear();
}

void ExternalProcessEndpoint::Reset() { Stop(); }

void ExternalProcessEndpoint::WriteAll(std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(to_child_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("write to scorer '" + identity_ +
                           "' failed: " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
}

std::string ExternalProcessEndpoint::ReadLine(Clock::time_point deadline) {
  for (;;) {
    if (const size_t nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) {
      throw TransportError("scorer '" + identity_ + "' timed out");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("read from scorer '" + identity_ +
                           "' failed: " + std::strerror(errno));
    }
    if (n == 0) {
      throw TransportError("scorer '" + identity_ + "' closed its output");
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

std::vector<ScoreResult> ExternalProcessEndpoint::ScoreBatch(
    std::span<const ScoreRequest> batch) {
  if (pid_ <= 0) Start();
  const Clock::time_point deadline = Clock::now() + options_.timeout;

  std::string payload;
  for (const ScoreRequest& r : batch) {
    payload += EncodeRequest(r);
    payload += '\n';
  }
  payload += '\n';
  WriteAll(payload);

  std::vector<ScoreResult> out;
  out.reserve(batch.size());
  while (out.size() < batch.size()) {
    const std::string line = ReadLine(deadline);
    if (line.empty()) continue;
    WireResponse resp = DecodeResponse(line);
    if (resp.error) {
      throw AuditError("scorer '" + identity_ + "' failed on id '" + resp.id +
                       "': " + *resp.error);
    }
    if (!std::isfinite(*resp.score)) {
      throw AuditError("scorer '" + identity_ +
                       "' returned non-finite score for id '" + resp.id + "'");
    }
    out.push_back({std::move(resp.id), *resp.score});
  }
  return out;
}

}  // namespace isaac
