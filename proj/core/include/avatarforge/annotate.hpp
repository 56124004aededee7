#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avatarforge/record.hpp"

namespace avatarforge {

// Offline annotation orchestration: pluggable annotator backends run as a
// dependency DAG over records and their outputs are merged into the unified
// schema. Backends are assumed non-thread-safe; the pool gives every worker
// its own instances.

enum class BackendKind { Builtin, Subprocess, Http };

struct AnnotatorSpec {
  std::string name;
  std::vector<std::string> produces;    // annotation field names; non-schema
                                        // names land in annotations.extras
  std::vector<std::string> depends_on;  // other annotator names
  BackendKind backend_kind = BackendKind::Builtin;
  std::string backend_target;  // mock name / command line / endpoint URL
  double timeout_s = 30.0;
  // Declared raw output range per dotted field, normalized to [0,1] at
  // ingest: stored = (value - min) / (max - min).
  std::map<std::string, std::pair<double, double>> output_ranges;
};

struct TaskGraph {
  std::vector<AnnotatorSpec> nodes;
  std::vector<std::vector<std::size_t>> dependents;  // edges prerequisite -> dependent
  std::vector<std::vector<std::size_t>> prerequisites;
  std::vector<std::size_t> topo_order;
  std::vector<std::size_t> depth;  // longest prerequisite chain per node

  std::size_t index_of(const std::string& name) const;
};

// Validates names, dependencies and acyclicity. Throws Error(CycleDetected)
// naming the cycle members, or Error(UnknownDependency).
TaskGraph build_task_graph(const std::vector<AnnotatorSpec>& specs);

// The default nine-annotator configuration: face, body, quality, camera,
// motion, caption and audio_extract run independently; vocal_separation
// depends on audio_extract; sync depends on vocal_separation. All built-in
// mocks, parameterized by seed.
std::vector<AnnotatorSpec> default_annotator_specs(std::uint64_t seed);

// Graph config loading (fail-closed on unknown keys).
std::vector<AnnotatorSpec> annotator_specs_from_config(const json& config, std::uint64_t default_seed);

struct PartialAnnotation {
  std::string annotator;
  json fields;  // field name -> annotation JSON
};

// Union-merge of disjoint partials into the record's annotation set, with
// schema re-validation. Throws Error(Conflict) when two partials (or a
// partial and the record) write the same field, Error(SchemaViolation) when
// the merged record breaks an invariant.
VideoRecord merge_annotations(const VideoRecord& record, const std::vector<PartialAnnotation>& partials);

class AnnotatorBackend {
 public:
  virtual ~AnnotatorBackend() = default;
  // Returns the reply's fields object. Throws Error(Timeout),
  // Error(MalformedOutput) or Error(BackendUnavailable).
  virtual json invoke(const AnnotatorSpec& spec, const VideoRecord& record) = 0;
};

std::unique_ptr<AnnotatorBackend> make_backend(const AnnotatorSpec& spec);

// Wire format shared by the subprocess and HTTP backends.
json backend_request(const AnnotatorSpec& spec, const VideoRecord& record);
json parse_backend_reply(const std::string& body);

// One backend call with range normalization and produces-validation.
PartialAnnotation invoke_annotator(AnnotatorBackend& backend, const AnnotatorSpec& spec,
                                   const VideoRecord& record);
PartialAnnotation invoke_annotator(const AnnotatorSpec& spec, const VideoRecord& record);

struct AnnotatorFailure {
  std::size_t record_index = 0;
  std::string video_id;
  std::string annotator;
  std::string error_kind;  // Errc name, or "DependencyFailed"
  std::string message;
};

struct TaskTrace {
  std::size_t record_index = 0;
  std::string annotator;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  bool ok = false;
  int attempts = 0;
};

struct RunReport {
  std::vector<AnnotatorFailure> failures;  // sorted by (record, annotator)
  std::vector<TaskTrace> traces;           // sorted by (record, annotator)
};

json run_report_to_json(const RunReport& report);

struct AnnotationRunResult {
  std::vector<VideoRecord> records;  // input order
  RunReport report;
};

// Runs the DAG over all records with a bounded worker pool. Per-record
// failures are collected, never thrown; one annotator's failure never
// removes another's output on the same record; annotated records are
// byte-identical for any parallelism level.
AnnotationRunResult run_offline_annotation(const std::vector<VideoRecord>& records,
                                           const TaskGraph& graph, unsigned parallelism);

}  // namespace avatarforge
