#include "avatarforge/annotate.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include "avatarforge/config.hpp"
#include "avatarforge/errors.hpp"
#include "avatarforge/json_io.hpp"

namespace avatarforge {

namespace {

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::size_t TaskGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  throw Error(Errc::UnknownDependency, "no annotator named '" + name + "'");
}

TaskGraph build_task_graph(const std::vector<AnnotatorSpec>& specs) {
  if (specs.empty()) throw Error(Errc::ConfigIncomplete, "annotator list is empty");

  TaskGraph g;
  g.nodes = specs;

  std::set<std::string> names;
  std::set<std::string> produced;
  for (const AnnotatorSpec& s : specs) {
    if (s.name.empty()) throw Error(Errc::ConfigIncomplete, "annotator with empty name");
    if (!names.insert(s.name).second)
      throw Error(Errc::ConfigIncomplete, "duplicate annotator name '" + s.name + "'");
    if (s.produces.empty())
      throw Error(Errc::ConfigIncomplete, "annotator '" + s.name + "' produces nothing");
    for (const std::string& field : s.produces)
      if (!produced.insert(field).second)
        throw Error(Errc::Conflict, "field '" + field + "' produced by more than one annotator");
  }

  g.dependents.resize(specs.size());
  g.prerequisites.resize(specs.size());
  std::vector<std::size_t> indegree(specs.size(), 0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (const std::string& dep : specs[i].depends_on) {
      if (!names.contains(dep))
        throw Error(Errc::UnknownDependency,
                    "annotator '" + specs[i].name + "' depends on unknown '" + dep + "'");
      const std::size_t d = g.index_of(dep);
      g.dependents[d].push_back(i);
      g.prerequisites[i].push_back(d);
      ++indegree[i];
    }
  }

  // Kahn in stable index order; whatever cannot be scheduled is cyclic.
  g.depth.assign(specs.size(), 0);
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::vector<std::size_t> remaining = indegree;
  while (!ready.empty()) {
    const std::size_t n = ready.front();
    ready.pop_front();
    g.topo_order.push_back(n);
    for (std::size_t dep : g.dependents[n]) {
      g.depth[dep] = std::max(g.depth[dep], g.depth[n] + 1);
      if (--remaining[dep] == 0) ready.push_back(dep);
    }
  }
  if (g.topo_order.size() != specs.size()) {
    std::string cycle;
    for (std::size_t i = 0; i < specs.size(); ++i)
      if (remaining[i] > 0) cycle += (cycle.empty() ? "" : ", ") + specs[i].name;
    throw Error(Errc::CycleDetected, "dependency cycle among: " + cycle);
  }
  return g;
}

std::vector<AnnotatorSpec> default_annotator_specs(std::uint64_t seed) {
  auto builtin = [seed](const std::string& kind) {
    return kind + "?seed=" + std::to_string(seed);
  };
  std::vector<AnnotatorSpec> specs;
  auto add = [&](const std::string& name, std::vector<std::string> produces,
                 std::vector<std::string> deps) {
    AnnotatorSpec s;
    s.name = name;
    s.produces = std::move(produces);
    s.depends_on = std::move(deps);
    s.backend_kind = BackendKind::Builtin;
    s.backend_target = builtin(name);
    s.timeout_s = 30.0;
    specs.push_back(std::move(s));
  };
  add("face", {"face"}, {});
  add("body", {"body"}, {});
  add("quality", {"quality"}, {});
  add("camera", {"camera"}, {});
  add("motion", {"motion"}, {});
  add("caption", {"captions"}, {});
  add("audio_extract", {"audio"}, {});
  add("vocal_separation", {"vocals"}, {"audio_extract"});
  add("sync", {"sync"}, {"vocal_separation"});
  return specs;
}

std::vector<AnnotatorSpec> annotator_specs_from_config(const json& config, std::uint64_t default_seed) {
  require_known_keys(config, {"seed", "annotator"}, "graph config");
  std::uint64_t seed = default_seed;
  if (auto it = config.find("seed"); it != config.end()) seed = it->get<std::uint64_t>();
  if (!config.contains("annotator")) return default_annotator_specs(seed);

  std::vector<AnnotatorSpec> specs;
  for (const auto& [name, body] : config.at("annotator").items()) {
    require_known_keys(body, {"backend", "produces", "depends_on", "timeout_s", "output_ranges"},
                       "annotator." + name);
    AnnotatorSpec s;
    s.name = name;
    const std::string backend = body.value("backend", "builtin:" + name);
    if (backend.starts_with("builtin:")) {
      s.backend_kind = BackendKind::Builtin;
      s.backend_target = backend.substr(8);
      if (s.backend_target.find("seed=") == std::string::npos)
        s.backend_target += (s.backend_target.find('?') == std::string::npos ? "?" : "&") +
                            std::string("seed=") + std::to_string(seed);
    } else if (backend.starts_with("subprocess:")) {
      s.backend_kind = BackendKind::Subprocess;
      s.backend_target = backend.substr(11);
    } else if (backend.starts_with("http:")) {
      s.backend_kind = BackendKind::Http;
      s.backend_target = backend;
    } else {
      throw Error(Errc::ConfigError, "annotator." + name + ": unknown backend '" + backend + "'");
    }
    if (auto it = body.find("produces"); it != body.end())
      s.produces = it->get<std::vector<std::string>>();
    else
      s.produces = {name};
    if (auto it = body.find("depends_on"); it != body.end())
      s.depends_on = it->get<std::vector<std::string>>();
    s.timeout_s = body.value("timeout_s", 30.0);
    if (auto it = body.find("output_ranges"); it != body.end()) {
      for (const auto& [field, range] : it->items()) {
        if (!range.is_array() || range.size() != 2)
          throw Error(Errc::ConfigError, "output_ranges." + field + " must be [min, max]");
        const double lo = range[0].get<double>(), hi = range[1].get<double>();
        if (!(hi > lo))
          throw Error(Errc::ConfigError, "output_ranges." + field + " must have max > min");
        s.output_ranges[field] = {lo, hi};
      }
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

VideoRecord merge_annotations(const VideoRecord& record,
                              const std::vector<PartialAnnotation>& partials) {
  VideoRecord merged = record;
  std::set<std::string> written;
  for (const PartialAnnotation& partial : partials) {
    for (const auto& [field, value] : partial.fields.items()) {
      if (written.contains(field) || annotation_field_present(record.annotations, field))
        throw Error(Errc::Conflict, "field '" + field + "' written twice (annotator '" +
                                        partial.annotator + "')");
      annotation_field_from_json(merged.annotations, field, value);
      written.insert(field);
    }
  }
  if (auto violations = validate_record(merged); !violations.empty())
    throw Error(Errc::SchemaViolation, violations.front().message, violations.front().path);
  return merged;
}

json backend_request(const AnnotatorSpec& spec, const VideoRecord& record) {
  return {{"schema_version", kSchemaVersion},
          {"annotator", spec.name},
          {"record", record_to_json(record)}};
}

json parse_backend_reply(const std::string& body) {
  json reply;
  try {
    reply = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedOutput, std::string("unparseable backend reply: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("ok") || !reply.at("ok").is_boolean())
    throw Error(Errc::MalformedOutput, "backend reply missing boolean 'ok'");
  if (!reply.at("ok").get<bool>())
    throw Error(Errc::BackendUnavailable,
                "backend error: " + reply.value("error", std::string("unspecified")));
  if (!reply.contains("fields") || !reply.at("fields").is_object())
    throw Error(Errc::MalformedOutput, "backend reply missing 'fields' object");
  return reply.at("fields");
}

namespace {

void normalize_ranges(json& fields, const AnnotatorSpec& spec) {
  for (const auto& [path, range] : spec.output_ranges) {
    json* node = &fields;
    std::size_t begin = 0;
    bool found = true;
    while (true) {
      const std::size_t dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
      if (!node->is_object() || !node->contains(key)) {
        found = false;
        break;
      }
      node = &(*node)[key];
      if (dot == std::string::npos) break;
      begin = dot + 1;
    }
    if (!found) continue;
    if (!node->is_number())
      throw Error(Errc::MalformedOutput, "field '" + path + "' declared numeric range but is not a number");
    const auto [lo, hi] = range;
    *node = (node->get<double>() - lo) / (hi - lo);
  }
}

}  // namespace

PartialAnnotation invoke_annotator(AnnotatorBackend& backend, const AnnotatorSpec& spec,
                                   const VideoRecord& record) {
  json fields = backend.invoke(spec, record);
  for (const auto& [field, value] : fields.items()) {
    if (std::find(spec.produces.begin(), spec.produces.end(), field) == spec.produces.end())
      throw Error(Errc::MalformedOutput,
                  "annotator '" + spec.name + "' returned undeclared field '" + field + "'");
  }
  normalize_ranges(fields, spec);
  return {spec.name, std::move(fields)};
}

PartialAnnotation invoke_annotator(const AnnotatorSpec& spec, const VideoRecord& record) {
  auto backend = make_backend(spec);
  return invoke_annotator(*backend, spec, record);
}

namespace {

enum class TaskState { Waiting, Ready, Running, Done, Failed };

struct TaskCell {
  TaskState state = TaskState::Waiting;
  std::size_t pending = 0;
  json fields;
  int attempts = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
};

}  // namespace

AnnotationRunResult run_offline_annotation(const std::vector<VideoRecord>& records,
                                           const TaskGraph& graph, unsigned parallelism) {
  if (parallelism < 1) throw Error(Errc::ConfigIncomplete, "parallelism must be >= 1");

  const std::size_t n_records = records.size();
  const std::size_t n_nodes = graph.nodes.size();

  AnnotationRunResult result;
  if (n_records == 0) {
    result.records = records;
    return result;
  }

  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::pair<std::size_t, std::size_t>> ready;  // (record, node)
  std::vector<std::vector<TaskCell>> cells(n_records, std::vector<TaskCell>(n_nodes));
  std::vector<AnnotatorFailure> failures;
  std::size_t resolved = 0;
  const std::size_t total = n_records * n_nodes;

  for (std::size_t r = 0; r < n_records; ++r) {
    for (std::size_t n = 0; n < n_nodes; ++n) {
      cells[r][n].pending = graph.prerequisites[n].size();
      if (cells[r][n].pending == 0) {
        cells[r][n].state = TaskState::Ready;
        ready.emplace_back(r, n);
      }
    }
  }

  // Called with mu held, after cell (r, n) reached Done or Failed. A failed
  // prerequisite cascades DependencyFailed through its whole subtree.
  auto resolve_dependents = [&](std::size_t r, std::size_t n) {
    ++resolved;
    std::vector<std::size_t> stack = {n};
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t dep : graph.dependents[cur]) {
        TaskCell& cell = cells[r][dep];
        if (--cell.pending > 0) continue;
        std::size_t failed_prereq = n_nodes;
        for (std::size_t p : graph.prerequisites[dep])
          if (cells[r][p].state == TaskState::Failed) failed_prereq = std::min(failed_prereq, p);
        if (failed_prereq < n_nodes) {
          cell.state = TaskState::Failed;
          failures.push_back({r, records[r].video_id, graph.nodes[dep].name, "DependencyFailed",
                              "prerequisite '" + graph.nodes[failed_prereq].name + "' failed"});
          ++resolved;
          stack.push_back(dep);
        } else {
          cell.state = TaskState::Ready;
          ready.emplace_back(r, dep);
          cv.notify_one();
        }
      }
    }
  };

  auto worker = [&]() {
    std::map<std::size_t, std::unique_ptr<AnnotatorBackend>> backends;
    std::unique_lock<std::mutex> lock(mu);
    while (true) {
      cv.wait(lock, [&] { return !ready.empty() || resolved == total; });
      if (ready.empty()) {
        if (resolved == total) return;
        continue;
      }
      auto [r, n] = ready.front();
      ready.pop_front();
      cells[r][n].state = TaskState::Running;
      lock.unlock();

      const AnnotatorSpec& spec = graph.nodes[n];
      json fields;
      bool ok = false;
      std::string error_kind, error_message;
      const std::int64_t start = now_ns();
      int attempts = 0;
      for (int attempt = 0; attempt < 2; ++attempt) {
        ++attempts;
        try {
          auto it = backends.find(n);
          if (it == backends.end()) it = backends.emplace(n, make_backend(spec)).first;
          fields = invoke_annotator(*it->second, spec, records[r]).fields;
          ok = true;
          break;
        } catch (const Error& e) {
          error_kind = errc_name(e.code());
          error_message = e.what();
          if (e.code() != Errc::Timeout) break;  // retry only transient timeouts
        } catch (const std::exception& e) {
          error_kind = "Exception";
          error_message = e.what();
          break;
        }
      }
      const std::int64_t end = now_ns();

      lock.lock();
      TaskCell& cell = cells[r][n];
      cell.attempts = attempts;
      cell.start_ns = start;
      cell.end_ns = end;
      if (ok) {
        cell.state = TaskState::Done;
        cell.fields = std::move(fields);
      } else {
        cell.state = TaskState::Failed;
        failures.push_back({r, records[r].video_id, spec.name, error_kind, error_message});
      }
      resolve_dependents(r, n);
      if (resolved == total) cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (unsigned i = 0; i < parallelism; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  // Deterministic merge in node-index order, regardless of completion order.
  for (std::size_t r = 0; r < n_records; ++r) {
    std::vector<PartialAnnotation> partials;
    for (std::size_t n = 0; n < n_nodes; ++n)
      if (cells[r][n].state == TaskState::Done)
        partials.push_back({graph.nodes[n].name, cells[r][n].fields});
    try {
      result.records.push_back(merge_annotations(records[r], partials));
    } catch (const Error& e) {
      failures.push_back({r, records[r].video_id, "merge", errc_name(e.code()), e.what()});
      result.records.push_back(records[r]);
    }
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const TaskCell& cell = cells[r][n];
      if (cell.attempts > 0)
        result.report.traces.push_back({r, graph.nodes[n].name, cell.start_ns, cell.end_ns,
                                        cell.state == TaskState::Done, cell.attempts});
    }
  }

  std::sort(failures.begin(), failures.end(), [](const AnnotatorFailure& a, const AnnotatorFailure& b) {
    return std::tie(a.record_index, a.annotator) < std::tie(b.record_index, b.annotator);
  });
  result.report.failures = std::move(failures);
  return result;
}

json run_report_to_json(const RunReport& report) {
  json failures = json::array();
  for (const AnnotatorFailure& f : report.failures)
    failures.push_back({{"record_index", f.record_index},
                        {"video_id", f.video_id},
                        {"annotator", f.annotator},
                        {"error_kind", f.error_kind},
                        {"message", f.message}});
  json traces = json::array();
  for (const TaskTrace& t : report.traces)
    traces.push_back({{"record_index", t.record_index},
                      {"annotator", t.annotator},
                      {"start_ns", t.start_ns},
                      {"end_ns", t.end_ns},
                      {"ok", t.ok},
                      {"attempts", t.attempts}});
  return {{"schema_version", kSchemaVersion},
          {"failures", std::move(failures)},
          {"traces", std::move(traces)}};
}

}  // namespace avatarforge
