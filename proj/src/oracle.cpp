#include "wolfsearch/oracle.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace wolfsearch::oracle {

namespace {

constexpr std::size_t kTranscriptLimit = 64;

std::string join_lines(const std::vector<std::string>& lines)
{
  std::string out;
  for (const auto& l : lines) {
    out += "\n  ";
    out += l;
  }
  return out;
}

std::vector<std::string_view> split_spaces(std::string_view line)
{
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(' ', start);
    tokens.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return tokens;
}

std::size_t parse_count(std::string_view token)
{
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw Error("malformed count '" + std::string(token) + "'");
  return value;
}

void append_vector(std::string& out, const RealVector& v)
{
  for (double x : v) {
    out += ' ';
    out += format_double(x);
  }
}

void ignore_sigpipe()
{
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

} // namespace

OracleError::OracleError(const std::string& what, std::vector<std::string> transcript)
  : Error(what + (transcript.empty() ? "" : "\ntranscript:" + join_lines(transcript)))
  , transcript_(std::move(transcript))
{}

bool Endpoint::supports(Verb v) const
{
  return std::find(verbs.begin(), verbs.end(), v) != verbs.end();
}

void Endpoint::validate() const
{
  if (command.empty() || command.front().empty())
    throw ConfigError("oracle: command must not be empty");
  if (verbs.empty())
    throw ConfigError("oracle: at least one verb is required");
  if (timeout_ms <= 0)
    throw ConfigError("oracle: timeout_ms must be positive");
  if (pool_size == 0)
    throw ConfigError("oracle: pool_size must be positive");
  if (supports(Verb::gen) && (latent_dim == 0 || embed_dim == 0))
    throw ConfigError("oracle: GEN requires latent_dim and embed_dim");
  if (supports(Verb::match) && embed_dim == 0)
    throw ConfigError("oracle: MATCH requires embed_dim");
}

std::string format_double(double x)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc())
    throw Error("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw Error("malformed number '" + std::string(token) + "'");
  return value;
}

std::string format_gen_request(const RealVector& z)
{
  std::string out = "GEN " + std::to_string(z.dim());
  append_vector(out, z);
  return out;
}

std::string format_match_request(const RealVector& probe, const RealVector& tmpl)
{
  require_same_dim(probe.dim(), tmpl.dim(), "MATCH request");
  std::string out = "MATCH " + std::to_string(probe.dim());
  append_vector(out, probe);
  append_vector(out, tmpl);
  return out;
}

std::string format_vec_response(const RealVector& v)
{
  std::string out = "VEC " + std::to_string(v.dim());
  append_vector(out, v);
  return out;
}

std::string format_score_response(double s)
{
  return "SCORE " + format_double(s);
}

Reply parse_reply(std::string_view line)
{
  if (line.starts_with("ERR")) {
    if (line.size() == 3)
      return ErrReply{""};
    if (line[3] != ' ')
      throw Error("malformed reply: unknown tag");
    return ErrReply{std::string(line.substr(4))};
  }
  const auto tokens = split_spaces(line);
  if (tokens.front() == "SCORE") {
    if (tokens.size() != 2)
      throw Error("malformed reply: SCORE takes exactly one value");
    return ScoreReply{parse_double(tokens[1])};
  }
  if (tokens.front() == "VEC") {
    if (tokens.size() < 2)
      throw Error("malformed reply: VEC without a length");
    const std::size_t n = parse_count(tokens[1]);
    if (tokens.size() != n + 2) {
      throw Error("malformed reply: VEC declares " + std::to_string(n) +
                  " values but carries " + std::to_string(tokens.size() - 2));
    }
    VecReply reply;
    reply.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      reply.values.push_back(parse_double(tokens[i + 2]));
    return reply;
  }
  throw Error("malformed reply: unknown tag '" + std::string(tokens.front()) + "'");
}

Request parse_request(std::string_view line)
{
  const auto tokens = split_spaces(line);
  if (tokens.size() < 2)
    throw Error("malformed request");
  const std::size_t n = parse_count(tokens[1]);
  Request req{Verb::gen, {}, {}};
  if (tokens[0] == "GEN") {
    if (tokens.size() != n + 2)
      throw Error("malformed request: GEN declares " + std::to_string(n) + " values");
  } else if (tokens[0] == "MATCH") {
    req.verb = Verb::match;
    if (tokens.size() != 2 * n + 2)
      throw Error("malformed request: MATCH declares " + std::to_string(n) + " values per vector");
  } else {
    throw Error("malformed request: unknown verb '" + std::string(tokens[0]) + "'");
  }
  for (std::size_t i = 0; i < n; ++i)
    req.first.push_back(parse_double(tokens[i + 2]));
  if (req.verb == Verb::match) {
    for (std::size_t i = 0; i < n; ++i)
      req.second.push_back(parse_double(tokens[n + i + 2]));
  }
  return req;
}

Process::Process(Endpoint endpoint)
  : endpoint_(std::move(endpoint))
{
  endpoint_.validate();
  const char* trace = std::getenv("WOLFSEARCH_ORACLE_TRACE");
  trace_ = trace != nullptr && std::string_view(trace) == "1";
}

Process::~Process()
{
  shutdown();
}

void Process::record(std::string line)
{
  if (trace_)
    std::cerr << "[oracle " << pid_ << "] " << line << '\n';
  transcript_.push_back(std::move(line));
  if (transcript_.size() > kTranscriptLimit)
    transcript_.erase(transcript_.begin(),
                      transcript_.begin() + static_cast<long>(transcript_.size() - kTranscriptLimit / 2));
}

void Process::fail(const std::string& what)
{
  auto transcript = transcript_;
  shutdown();
  throw OracleError("oracle '" + endpoint_.command.front() + "': " + what,
                    std::move(transcript));
}

void Process::spawn()
{
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0)
    throw OracleError(std::string("pipe failed: ") + std::strerror(errno), {});
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw OracleError(std::string("pipe failed: ") + std::strerror(errno), {});
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

  std::vector<char*> argv;
  for (const auto& arg : endpoint_.command)
    argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw OracleError("cannot spawn oracle '" + endpoint_.command.front() +
                        "': " + std::strerror(rc),
                      {});
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

void Process::shutdown()
{
  if (to_child_ >= 0)
    close(to_child_);
  if (from_child_ >= 0)
    close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    // give a well-behaved oracle a moment to exit on EOF before killing it
    for (int i = 0; i < 20; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      usleep(1000);
    }
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
    }
  }
  pid_ = -1;
  buffer_.clear();
}

std::string Process::exchange(const std::string& request)
{
  if (pid_ <= 0)
    spawn();
  record("> " + request);

  const std::string wire = request + '\n';
  std::size_t written = 0;
  while (written < wire.size()) {
    const ssize_t n = write(to_child_, wire.data() + written, wire.size() - written);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      fail(std::string("write failed (process exited?): ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }

  const auto deadline =
    std::chrono::steady_clock::now() + std::chrono::milliseconds(endpoint_.timeout_ms);
  while (true) {
    const std::size_t eol = buffer_.find('\n');
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      record("< " + line);
      if (!buffer_.empty())
        fail("oracle sent more than one line for a single request");
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0)
      fail("timeout after " + std::to_string(endpoint_.timeout_ms) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR)
        continue;
      fail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0)
      continue;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR)
        continue;
      fail(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (!buffer_.empty())
        record("< " + buffer_ + " (unterminated)");
      fail("process exited before replying");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

RealVector Process::gen(const RealVector& z)
{
  if (!endpoint_.supports(Verb::gen))
    throw ConfigError("oracle does not declare the GEN verb");
  if (z.dim() != endpoint_.latent_dim) {
    throw DimensionError("GEN: latent dim " + std::to_string(z.dim()) + ", oracle expects " +
                         std::to_string(endpoint_.latent_dim));
  }
  const std::string line = exchange(format_gen_request(z));
  Reply reply;
  try {
    reply = parse_reply(line);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (auto* err = std::get_if<ErrReply>(&reply))
    fail("ERR " + err->message);
  auto* vec = std::get_if<VecReply>(&reply);
  if (vec == nullptr)
    fail("expected VEC reply to GEN");
  if (vec->values.size() != endpoint_.embed_dim) {
    fail("VEC has " + std::to_string(vec->values.size()) + " values, expected " +
         std::to_string(endpoint_.embed_dim));
  }
  try {
    return RealVector(std::move(vec->values));
  } catch (const Error& e) {
    fail(e.what());
  }
}

double Process::match(const RealVector& probe, const RealVector& tmpl)
{
  if (!endpoint_.supports(Verb::match))
    throw ConfigError("oracle does not declare the MATCH verb");
  require_same_dim(probe.dim(), endpoint_.embed_dim, "MATCH probe");
  require_same_dim(tmpl.dim(), endpoint_.embed_dim, "MATCH template");
  const std::string line = exchange(format_match_request(probe, tmpl));
  Reply reply;
  try {
    reply = parse_reply(line);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (auto* err = std::get_if<ErrReply>(&reply))
    fail("ERR " + err->message);
  auto* score = std::get_if<ScoreReply>(&reply);
  if (score == nullptr)
    fail("expected SCORE reply to MATCH");
  if (!std::isfinite(score->score))
    fail("non-finite score");
  return score->score;
}

class Pool::Lease
{
public:
  explicit Lease(Pool& pool)
    : pool_(pool)
  {
    std::unique_lock lock(pool_.mutex_);
    pool_.available_.wait(lock, [&] {
      return std::find(pool_.busy_.begin(), pool_.busy_.end(), false) != pool_.busy_.end();
    });
    index_ = static_cast<std::size_t>(
      std::find(pool_.busy_.begin(), pool_.busy_.end(), false) - pool_.busy_.begin());
    pool_.busy_[index_] = true;
  }
  ~Lease()
  {
    {
      std::lock_guard lock(pool_.mutex_);
      pool_.busy_[index_] = false;
    }
    pool_.available_.notify_one();
  }
  Process& process() { return *pool_.processes_[index_]; }

private:
  Pool& pool_;
  std::size_t index_ = 0;
};

Pool::Pool(Endpoint endpoint)
  : endpoint_(std::move(endpoint))
{
  endpoint_.validate();
  for (std::size_t i = 0; i < endpoint_.pool_size; ++i)
    processes_.push_back(std::make_unique<Process>(endpoint_));
  busy_.assign(endpoint_.pool_size, false);
}

RealVector Pool::gen(const RealVector& z)
{
  Lease lease(*this);
  return lease.process().gen(z);
}

double Pool::match(const RealVector& probe, const RealVector& tmpl)
{
  Lease lease(*this);
  return lease.process().match(probe, tmpl);
}

} // namespace wolfsearch::oracle
