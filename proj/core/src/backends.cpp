#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>

#include <httplib.h>

#include "avatarforge/annotate.hpp"
#include "avatarforge/errors.hpp"
#include "avatarforge/json_io.hpp"
#include "avatarforge/rng.hpp"

namespace avatarforge {

namespace {

// ---------------------------------------------------------------------------
// Builtin mock backends. Target syntax: "<kind>?seed=7&timeout_on=<video_id>
// &error_on=<video_id>". Every annotator of the default graph has a mock so
// the full pipeline runs with no models installed. Outputs are deterministic
// in (seed, video_id, kind) and spread across the schema ranges so every
// downstream filter stage sees both passing and failing values.
// ---------------------------------------------------------------------------

struct MockOptions {
  std::string kind;
  std::uint64_t seed = 0;
  std::string timeout_on;
  std::string error_on;
};

MockOptions parse_mock_target(const std::string& target) {
  MockOptions opt;
  const std::size_t q = target.find('?');
  opt.kind = target.substr(0, q);
  if (q == std::string::npos) return opt;
  std::size_t begin = q + 1;
  while (begin < target.size()) {
    std::size_t end = target.find('&', begin);
    if (end == std::string::npos) end = target.size();
    const std::string pair = target.substr(begin, end - begin);
    const std::size_t eq = pair.find('=');
    const std::string key = pair.substr(0, eq);
    const std::string value = eq == std::string::npos ? "" : pair.substr(eq + 1);
    if (key == "seed") {
      try {
        opt.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw Error(Errc::ConfigError, "mock seed '" + value + "' is not an integer");
      }
    } else if (key == "timeout_on") opt.timeout_on = value;
    else if (key == "error_on") opt.error_on = value;
    else throw Error(Errc::ConfigError, "unknown mock option '" + key + "'");
    begin = end + 1;
  }
  return opt;
}

const char* kAdjectives[] = {"young", "elderly", "smiling", "serious", "animated", "calm"};
const char* kSubjects[] = {"woman", "man", "performer", "presenter", "singer", "host"};
const char* kActions[] = {"speaks to the camera", "sings on stage",   "gestures while talking",
                          "reads the news",       "tells a story",    "gives an interview"};

json mock_face(Rng& rng, const VideoRecord& r) {
  const double width = r.width > 0 ? static_cast<double>(r.width) : 640.0;
  const double height = r.height > 0 ? static_cast<double>(r.height) : 360.0;
  const std::int64_t people = 1 + static_cast<std::int64_t>(rng.next_below(2));
  const std::int64_t frames = std::min<std::int64_t>(std::max<std::int64_t>(r.total_frames(), 1), 25);

  json boxes = json::array();
  json poses = json::array();
  for (std::int64_t p = 0; p < people; ++p) {
    const double w = width * rng.next_range(0.10, 0.50);
    const double h = height * rng.next_range(0.20, 0.60);
    const double x0 = rng.next_range(0.0, width - w);
    const double y0 = rng.next_range(0.0, height - h);
    const double yaw = rng.next_range(-60.0, 60.0);
    for (std::int64_t f = 0; f < frames; ++f) {
      // slight drift, clamped to stay in bounds
      const double x = std::clamp(x0 + rng.next_range(-2.0, 2.0), 0.0, width - w);
      const double y = std::clamp(y0 + rng.next_range(-2.0, 2.0), 0.0, height - h);
      boxes.push_back({{"frame", f},
                       {"x", x},
                       {"y", y},
                       {"w", w},
                       {"h", h},
                       {"confidence", rng.next_range(0.6, 1.0)}});
      if (p == 0)
        poses.push_back({{"frame", f},
                         {"yaw", yaw + rng.next_range(-3.0, 3.0)},
                         {"pitch", rng.next_range(-10.0, 10.0)},
                         {"roll", rng.next_range(-5.0, 5.0)}});
    }
  }
  return {{"face", {{"boxes", std::move(boxes)},
                    {"person_count", people},
                    {"head_pose", std::move(poses)}}}};
}

json mock_body(Rng& rng, const VideoRecord&) {
  static const char* kCompositions[] = {"Head", "HalfBody", "FullBody"};
  return {{"body", {{"composition", kCompositions[rng.next_below(3)]},
                    {"hand_visibility", rng.next_range(0.0, 1.0)}}}};
}

json mock_quality(Rng& rng, const VideoRecord&) {
  json flags = json::array();
  if (rng.next_unit() < 0.08) flags.push_back("Subtitle");
  if (rng.next_unit() < 0.06) flags.push_back("TextCoverage");
  if (rng.next_unit() < 0.05) flags.push_back("WhiteFlash");
  if (rng.next_unit() < 0.05) flags.push_back("Transition");
  if (rng.next_unit() < 0.10) flags.push_back("Border");
  return {{"quality", {{"perceptual_score", rng.next_range(0.15, 1.0)},
                       {"artifact_flags", std::move(flags)}}}};
}

json mock_camera(Rng& rng, const VideoRecord&) {
  static const char* kMotions[] = {"Pan", "Zoom", "Track", "Shake"};
  static const char* kShots[] = {"CloseUp", "Medium", "Full", "Wide"};
  static const char* kLenses[] = {"", "35mm", "50mm", "85mm"};
  static const char* kStyles[] = {"", "", "cinematic", "anime"};
  const bool is_static = rng.next_unit() < 0.5;
  return {{"camera",
           {{"camera_type", is_static ? "Static" : "Handheld"},
            {"camera_motion", is_static ? "None" : kMotions[rng.next_below(4)]},
            {"shot_size", kShots[rng.next_below(4)]},
            {"lens_type", kLenses[rng.next_below(4)]},
            {"visual_style", kStyles[rng.next_below(4)]}}}};
}

json mock_motion(Rng& rng, const VideoRecord&) {
  const double roll = rng.next_unit();
  const char* speed = roll < 0.60 ? "Natural" : roll < 0.75 ? "Slow" : roll < 0.88 ? "Fast" : "Abnormal";
  return {{"motion", {{"motion_speed", speed}, {"motion_intensity", rng.next_range(0.0, 12.0)}}}};
}

json mock_caption(Rng& rng, const VideoRecord& r) {
  const std::string sentence = std::string("a ") + kAdjectives[rng.next_below(6)] + " " +
                               kSubjects[rng.next_below(6)] + " " + kActions[rng.next_below(6)];
  json spans = json::array();
  const std::size_t n_spans = rng.next_below(4);  // 0..3
  double cursor = 0;
  for (std::size_t i = 0; i < n_spans && cursor < r.duration_s; ++i) {
    const double start = cursor + rng.next_range(0.0, r.duration_s * 0.1);
    const double end = std::min(r.duration_s, start + rng.next_range(0.5, r.duration_s * 0.6));
    if (end <= start) break;
    spans.push_back({{"start_s", start},
                     {"end_s", end},
                     {"caption", sentence + " (part " + std::to_string(i + 1) + ")"}});
    cursor = end;
  }
  return {{"captions", {{"summary", sentence},
                        {"detailed", sentence + ", recorded as " + to_string(r.source_category)},
                        {"temporal_spans", std::move(spans)}}}};
}

json mock_audio(Rng& rng, const VideoRecord&) {
  const bool has_speech = rng.next_unit() < 0.85;
  return {{"audio", {{"has_speech", has_speech},
                     {"vocal_track_available", has_speech && rng.next_unit() < 0.9},
                     {"language", rng.next_unit() < 0.5 ? "en" : "zh"}}}};
}

json mock_vocals(Rng& rng, const VideoRecord& r) {
  return {{"vocals", {{"vocal_track", "vocals:" + r.video_id},
                      {"separation_quality", rng.next_range(0.5, 1.0)}}}};
}

json mock_sync(Rng& rng, const VideoRecord&) {
  return {{"sync", {{"av_offset_ms", rng.next_range(-180.0, 180.0)},
                    {"sync_confidence", rng.next_range(0.3, 1.0)}}}};
}

class BuiltinMockBackend final : public AnnotatorBackend {
 public:
  explicit BuiltinMockBackend(MockOptions options) : opt_(std::move(options)) {}

  json invoke(const AnnotatorSpec& spec, const VideoRecord& record) override {
    if (!opt_.timeout_on.empty() && record.video_id == opt_.timeout_on)
      throw Error(Errc::Timeout, "mock timeout for " + record.video_id);
    if (!opt_.error_on.empty() && record.video_id == opt_.error_on)
      throw Error(Errc::MalformedOutput, "mock malformed output for " + record.video_id);

    Rng rng(mix_seed(mix_seed(opt_.seed, record.video_id), opt_.kind));
    if (opt_.kind == "face") return mock_face(rng, record);
    if (opt_.kind == "body") return mock_body(rng, record);
    if (opt_.kind == "quality") return mock_quality(rng, record);
    if (opt_.kind == "camera") return mock_camera(rng, record);
    if (opt_.kind == "motion") return mock_motion(rng, record);
    if (opt_.kind == "caption") return mock_caption(rng, record);
    if (opt_.kind == "audio_extract") return mock_audio(rng, record);
    if (opt_.kind == "vocal_separation") return mock_vocals(rng, record);
    if (opt_.kind == "sync") return mock_sync(rng, record);
    // Unknown kinds still answer deterministically, under their first
    // declared field name.
    return {{spec.produces.front(), {{"mock", opt_.kind}, {"value", rng.next_unit()}}}};
  }

 private:
  MockOptions opt_;
};

// ---------------------------------------------------------------------------
// Subprocess backend: one JSON request per line on the child's stdin, one
// JSON reply per line on its stdout. The child persists across requests;
// exactly one request is in flight per instance.
// ---------------------------------------------------------------------------

class SubprocessBackend final : public AnnotatorBackend {
 public:
  explicit SubprocessBackend(std::string command) : command_(std::move(command)) {
    ::signal(SIGPIPE, SIG_IGN);
  }

  ~SubprocessBackend() override { shutdown(); }

  json invoke(const AnnotatorSpec& spec, const VideoRecord& record) override {
    if (pid_ < 0) spawn();
    const std::string request = backend_request(spec, record).dump() + "\n";
    if (!write_all(request)) {
      shutdown();
      throw Error(Errc::BackendUnavailable, "subprocess '" + command_ + "' not accepting input");
    }
    const std::string line = read_line(spec.timeout_s);
    return parse_backend_reply(line);
  }

 private:
  void spawn() {
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
      throw Error(Errc::BackendUnavailable, "pipe() failed: " + std::string(std::strerror(errno)));
    pid_ = ::fork();
    if (pid_ < 0) throw Error(Errc::BackendUnavailable, "fork() failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    buffer_.clear();
  }

  bool write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  std::string read_line(double timeout_s) {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000));
    while (true) {
      if (const std::size_t pos = buffer_.find('\n'); pos != std::string::npos) {
        std::string line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        shutdown();
        throw Error(Errc::Timeout, "subprocess '" + command_ + "' gave no reply in time");
      }
      struct pollfd pfd {
        read_fd_, POLLIN, 0
      };
      const int pr = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (pr == 0) {
        shutdown();
        throw Error(Errc::Timeout, "subprocess '" + command_ + "' gave no reply in time");
      }
      if (pr < 0) {
        if (errno == EINTR) continue;
        shutdown();
        throw Error(Errc::BackendUnavailable, "poll() failed");
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n == 0) {
        shutdown();
        throw Error(Errc::BackendUnavailable, "subprocess '" + command_ + "' closed its output");
      }
      if (n < 0) {
        if (errno == EINTR) continue;
        shutdown();
        throw Error(Errc::BackendUnavailable, "read() failed");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void shutdown() {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    write_fd_ = read_fd_ = -1;
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }

  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
};

// ---------------------------------------------------------------------------
// HTTP backend: POSTs the same request body to the configured endpoint.
// ---------------------------------------------------------------------------

class HttpBackend final : public AnnotatorBackend {
 public:
  explicit HttpBackend(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
      throw Error(Errc::ConfigError, "http endpoint must look like http://host:port/path");
    const std::size_t path_pos = endpoint.find('/', scheme + 3);
    base_ = path_pos == std::string::npos ? endpoint : endpoint.substr(0, path_pos);
    path_ = path_pos == std::string::npos ? "/" : endpoint.substr(path_pos);
  }

  json invoke(const AnnotatorSpec& spec, const VideoRecord& record) override {
    httplib::Client client(base_);
    const auto timeout_ms = static_cast<std::int64_t>(spec.timeout_s * 1000);
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms));

    const std::string body = backend_request(spec, record).dump();
    httplib::Result res = client.Post(path_, body, "application/json");
    if (!res) {
      if (res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read)
        throw Error(Errc::Timeout, "http backend " + base_ + " timed out");
      throw Error(Errc::BackendUnavailable,
                  "http backend " + base_ + " unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200)
      throw Error(Errc::BackendUnavailable,
                  "http backend " + base_ + " returned status " + std::to_string(res->status));
    return parse_backend_reply(res->body);
  }

 private:
  std::string base_;
  std::string path_;
};

}  // namespace

std::unique_ptr<AnnotatorBackend> make_backend(const AnnotatorSpec& spec) {
  switch (spec.backend_kind) {
    case BackendKind::Builtin:
      return std::make_unique<BuiltinMockBackend>(parse_mock_target(spec.backend_target));
    case BackendKind::Subprocess:
      return std::make_unique<SubprocessBackend>(spec.backend_target);
    case BackendKind::Http:
      return std::make_unique<HttpBackend>(spec.backend_target);
  }
  throw Error(Errc::ConfigError, "unknown backend kind");
}

}  // namespace avatarforge
