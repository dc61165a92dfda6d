#pragma once

#include "wolfsearch/core.hpp"

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <sys/types.h>
#include <variant>
#include <vector>

namespace wolfsearch::oracle {

//! Raised for timeouts, malformed responses, ERR replies and dead oracle
//! processes. Carries the raw request/response lines exchanged so far.
class OracleError : public Error
{
public:
  OracleError(const std::string& what, std::vector<std::string> transcript);
  const std::vector<std::string>& transcript() const { return transcript_; }

private:
  std::vector<std::string> transcript_;
};

enum class Verb
{
  gen,
  match
};

struct Endpoint
{
  //! argv; the first element is resolved through PATH.
  std::vector<std::string> command;
  std::vector<Verb> verbs;
  std::size_t latent_dim = 0;
  std::size_t embed_dim = 0;
  int timeout_ms = 10000;
  std::size_t pool_size = 1;

  bool supports(Verb v) const;
  void validate() const;
};

// Wire format. Floats are written in shortest round-trip form.
std::string format_double(double x);
double parse_double(std::string_view token);
std::string format_gen_request(const RealVector& z);
std::string format_match_request(const RealVector& probe, const RealVector& tmpl);
std::string format_vec_response(const RealVector& v);
std::string format_score_response(double s);

struct VecReply
{
  std::vector<double> values;
};
struct ScoreReply
{
  double score;
};
struct ErrReply
{
  std::string message;
};
using Reply = std::variant<VecReply, ScoreReply, ErrReply>;

//! Throws Error on any deviation from the response grammar.
Reply parse_reply(std::string_view line);

//! Server side of the protocol, for oracles written against this library.
struct Request
{
  Verb verb;
  std::vector<double> first;  // z for GEN, probe for MATCH
  std::vector<double> second; // template for MATCH
};
Request parse_request(std::string_view line);

//! One child process speaking the line protocol over its stdin/stdout.
//! Spawned lazily on the first request; killed and reaped on destruction.
//! Not thread-safe: exactly one request may be outstanding.
class Process
{
public:
  explicit Process(Endpoint endpoint);
  ~Process();
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  RealVector gen(const RealVector& z);
  double match(const RealVector& probe, const RealVector& tmpl);

  //! Sends one raw line and returns the raw reply line.
  std::string exchange(const std::string& request);

  const std::vector<std::string>& transcript() const { return transcript_; }

private:
  void spawn();
  void shutdown();
  [[noreturn]] void fail(const std::string& what);
  void record(std::string line);

  Endpoint endpoint_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::vector<std::string> transcript_;
  bool trace_ = false;
};

//! Fixed set of identical oracle processes shared by concurrent callers.
class Pool
{
public:
  explicit Pool(Endpoint endpoint);

  const Endpoint& endpoint() const { return endpoint_; }
  RealVector gen(const RealVector& z);
  double match(const RealVector& probe, const RealVector& tmpl);

private:
  class Lease;
  Endpoint endpoint_;
  std::vector<std::unique_ptr<Process>> processes_;
  std::vector<bool> busy_;
  std::mutex mutex_;
  std::condition_variable available_;
};

} // namespace wolfsearch::oracle
