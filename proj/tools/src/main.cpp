#include <CLI11.hpp>

#include "commands.hpp"

// avatar-forge: data curation, conditioning and training-signal engine.
// Subcommands mirror the pipeline stages; identical inputs and seeds produce
// byte-identical outputs.

int main(int argc, char** argv) {
  using namespace avatarforge::cli;

  CLI::App app{"avatar-forge data curation and training-signal engine"};
  app.require_subcommand(1);

  AnnotateOptions annotate_opt;
  CLI::App* annotate = app.add_subcommand("annotate", "Run the offline annotation DAG over records");
  annotate->add_option("--in", annotate_opt.in_path, "Input records JSONL")->required();
  annotate->add_option("--out", annotate_opt.out_path, "Annotated records JSONL")->required();
  annotate->add_option("--graph", annotate_opt.graph_path, "Annotator graph config (TOML)");
  annotate->add_option("--report", annotate_opt.report_path, "Run report JSONL path");
  annotate->add_option("--parallelism", annotate_opt.parallelism, "Worker pool size")
      ->check(CLI::PositiveNumber);
  annotate->add_option("--seed", annotate_opt.seed, "Seed for builtin mock backends");

  ValidateOptions validate_opt;
  CLI::App* validate = app.add_subcommand("validate", "Run the online clip-level filter chain");
  validate->add_option("--in", validate_opt.in_path, "Annotated records JSONL")->required();
  validate->add_option("--clips", validate_opt.clips_path, "Candidate clips JSONL")->required();
  validate->add_option("--config", validate_opt.config_path,
                       "Filter thresholds (TOML); falls back to $AVATAR_FORGE_CONFIG");
  validate->add_option("--report", validate_opt.report_path, "Filter report JSON path");
  validate->add_option("--out", validate_opt.out_path, "Accepted candidates JSONL")->required();

  SampleOptions sample_opt;
  CLI::App* sample = app.add_subcommand("sample", "Select task subsets and emit a training manifest");
  sample->add_option("--in", sample_opt.in_path, "Accepted candidates JSONL")->required();
  sample->add_option("--profile", sample_opt.profile, "closeup|body|complex|music");
  sample->add_option("--profiles-file", sample_opt.profiles_file, "Declarative profile JSON");
  sample->add_option("--frames", sample_opt.frames, "Window length in frames")
      ->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_opt.seed, "Sampling seed");
  sample->add_option("--out", sample_opt.out_path, "Manifest JSONL")->required();

  MultipersonOptions multi_opt;
  CLI::App* multi = app.add_subcommand("multiperson", "Multi-person track and segment processing");
  multi->add_option("--tracks", multi_opt.tracks_path, "Track file JSONL")->required();
  multi->add_option("--min-seg", multi_opt.min_segment_s, "Minimum segment length (s)");
  multi->add_option("--min-disp", multi_opt.min_displacement_frac,
                    "Dynamic-track displacement threshold (fraction of diagonal)");
  multi->add_option("--min-frames", multi_opt.min_frames, "Dynamic-track minimum length");
  multi->add_option("--out", multi_opt.out_path, "Output JSONL")->required();
  CLI::App* bind = multi->add_subcommand("bind", "Build target/background condition bindings");
  bind->add_option("--targets", multi_opt.targets, "Target track ids (1 or 2)")
      ->required()
      ->delimiter(',');
  CLI::App* partition = multi->add_subcommand("partition", "Split records by dynamic-person count");

  SilentOptions silent_opt;
  CLI::App* silent = app.add_subcommand("silent", "Aggregate two-model silence verdicts");
  silent->add_option("--verdicts", silent_opt.verdicts_path, "Clip verdicts JSONL")->required();
  silent->add_option("--out", silent_opt.out_path, "Video labels JSONL")->required();

  EmotionOptions emotion_opt;
  CLI::App* emotion = app.add_subcommand("emotion", "Score and filter emotion data");
  emotion->add_option("--matrix", emotion_opt.matrix_path, "Frame emotion matrices JSONL")->required();
  emotion->add_option("--flags", emotion_opt.flags_path, "Exclusion flags JSONL")->required();
  emotion->add_option("--n", emotion_opt.top_n, "Top-N frames per class")->check(CLI::PositiveNumber);
  emotion->add_option("--threshold", emotion_opt.threshold, "Retention threshold (strict >)");
  emotion->add_option("--min-area", emotion_opt.min_area_fraction, "Minimum subject area fraction");
  emotion->add_option("--out", emotion_opt.out_path, "Verdicts JSONL")->required();

  AudioAlignOptions audio_opt;
  CLI::App* audio = app.add_subcommand("audio-align", "Audio feature alignment debug tool");
  audio->add_option("--duration", audio_opt.duration_s, "Audio duration in seconds")->required();
  audio->add_option("--seed", audio_opt.seed, "Stub encoder seed");
  audio->add_option("--dump", audio_opt.dump, "What to print (shapes)");
  audio->add_option("--out", audio_opt.out_prefix, "Tensor output path prefix");
  audio->add_option("--dim", audio_opt.dim, "Feature dimension")->check(CLI::PositiveNumber);
  audio->add_option("--window", audio_opt.window_frames, "Sliding window length at 50 Hz")
      ->check(CLI::PositiveNumber);

  GrpoAdvantageOptions adv_opt;
  GrpoRolloutOptions rollout_opt;
  CLI::App* grpo = app.add_subcommand("grpo", "Training-signal math");
  grpo->require_subcommand(1);
  CLI::App* advantage = grpo->add_subcommand("advantage", "Per-frame group-relative advantages");
  advantage->add_option("--rewards", adv_opt.rewards_path, "Reward tensor (G,K,J)")->required();
  advantage->add_option("--weights", adv_opt.weights_path, "Reward weights JSON")->required();
  advantage->add_option("--sigma-mode", adv_opt.sigma_mode, "max|per");
  advantage->add_option("--eps", adv_opt.eps_floor, "Denominator floor");
  advantage->add_option("--out", adv_opt.out_path, "Per-reward advantage tensor")->required();
  advantage->add_option("--totals-out", adv_opt.totals_out_path, "Weighted total tensor (G,J)");
  CLI::App* rollout = grpo->add_subcommand("rollout", "Plan multi-clip rollouts");
  rollout->add_option("--max-clips", rollout_opt.max_clips, "Maximum rollout length")
      ->check(CLI::PositiveNumber);
  rollout->add_option("--seed", rollout_opt.seed, "Plan seed");
  rollout->add_option("--count", rollout_opt.count, "Number of plans");
  rollout->add_option("--out", rollout_opt.out_path, "Plans JSONL (stdout when omitted)");

  StatsMergeOptions stats_opt;
  GenFixtureOptions fixture_opt;
  CLI::App* stats = app.add_subcommand("stats", "Merge filter reports / generate fixtures");
  stats->add_option("--reports", stats_opt.report_paths, "Filter report JSON files")->delimiter(',');
  stats->add_option("--out", stats_opt.out_path, "Merged report JSON");
  CLI::App* gen_fixture = stats->add_subcommand("gen-fixture", "Write the synthetic corpus");
  gen_fixture->add_option("--seed", fixture_opt.seed, "Corpus seed");
  gen_fixture->add_option("--count", fixture_opt.count, "Record count");
  gen_fixture->add_option("--out", fixture_opt.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  if (annotate->parsed()) return run_annotate(annotate_opt);
  if (validate->parsed()) return run_validate(validate_opt);
  if (sample->parsed()) return run_sample(sample_opt);
  if (multi->parsed()) {
    multi_opt.bind = bind->parsed();
    multi_opt.partition = partition->parsed();
    return run_multiperson(multi_opt);
  }
  if (silent->parsed()) return run_silent(silent_opt);
  if (emotion->parsed()) return run_emotion(emotion_opt);
  if (audio->parsed()) return run_audio_align(audio_opt);
  if (grpo->parsed()) {
    if (advantage->parsed()) return run_grpo_advantage(adv_opt);
    if (rollout->parsed()) return run_grpo_rollout(rollout_opt);
  }
  if (stats->parsed()) {
    if (gen_fixture->parsed()) return run_gen_fixture(fixture_opt);
    if (stats_opt.report_paths.empty()) {
      std::fprintf(stderr, "error: stats needs --reports or the gen-fixture subcommand\n");
      return kExitConfigError;
    }
    return run_stats_merge(stats_opt);
  }
  return kExitConfigError;
}
