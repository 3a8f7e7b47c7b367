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

// Client for scorers running as a child process that speaks isaac-score/1:
// newline-delimited JSON over the child's stdin/stdout.
//
//   -> {"protocol":"isaac-score/1"}            handshake, both directions
//   -> {"id":"q0","drug":"CCO","target":"MKV"} one line per request
//   ->                                          blank line ends the batch
//   <- {"id":"q0","score":1.25}                 one line per request, any order
//   <- {"id":"q0","error":"..."}                per-id failure (fatal here)

#ifndef ISAAC_EXTERNAL_SCORER_H_
#define ISAAC_EXTERNAL_SCORER_H_

#include <sys/types.h>

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "isaac/scoring.h"

namespace isaac {

inline constexpr std::string_view kProtocolName = "isaac-score/1";
inline constexpr std::string_view kHandshakeLine =
    R"({"protocol":"isaac-score/1"})";

std::string EncodeRequest(const ScoreRequest& request);

struct WireResponse {
  std::string id;
  std::optional<double> score;
  std::optional<std::string> error;
};

// Throws AuditError on malformed JSON or a line carrying neither a numeric
// score nor an error.
WireResponse DecodeResponse(std::string_view line);

// True if `line` is a valid handshake for this protocol version.
bool IsHandshake(std::string_view line);

struct ExternalProcessOptions {
  std::string command;   // run via /bin/sh -c
  std::string identity;  // defaults to the command
  size_t batch_size = 256;
  std::chrono::milliseconds timeout{120000};  // per batch
};

// Owns one child process, started lazily and restarted by Reset(). Writes to
// a dead child are reported as TransportError; SIGPIPE is ignored
// process-wide once the first child starts.
class ExternalProcessEndpoint final : public ScoringEndpoint {
 public:
  explicit ExternalProcessEndpoint(ExternalProcessOptions options);
  ~ExternalProcessEndpoint() override;

  ExternalProcessEndpoint(const ExternalProcessEndpoint&) = delete;
  ExternalProcessEndpoint& operator=(const ExternalProcessEndpoint&) = delete;

  EndpointKind kind() const override { return EndpointKind::kExternalProcess; }
  const std::string& identity() const override { return identity_; }
  size_t batch_size() const override { return options_.batch_size; }

  std::vector<ScoreResult> ScoreBatch(
      std::span<const ScoreRequest> batch) override;
  void Reset() override;

 private:
  using Clock = std::chrono::steady_clock;

  void Start();
  void Stop();
  void WriteAll(std::string_view data);
  std::string ReadLine(Clock::time_point deadline);

  ExternalProcessOptions options_;
  std::string identity_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace isaac

#endif  // ISAAC_EXTERNAL_SCORER_H_
