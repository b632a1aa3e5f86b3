#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace erc {

enum class DenoiseMode { kDiff, kMovingAverage, kExponential, kMedian, kNone };
enum class GraphStrategy {
  kSingle,
  kParallelSum,
  kParallelConcat,
  kRelIncremental,
  kIncremental
};
enum class GatActivation { kElu, kIdentity };
enum class FusionMode { kDiffusion, kNone };
enum class FusionWeightMode { kFixed, kLearnableScalar };
enum class DegreeMode { kRow, kSym };
enum class Segmentation { kNone, kOverlap50, kNoOverlap };
enum class Component { kFull, kNoDifferential, kNoGating, kNoGraph, kNoDiffusion };

// Every hyperparameter and ablation switch of a run. JSON round trips are
// lossless; unknown keys are rejected.
struct RunConfig {
  int hidden_dim = 64;
  int heads = 4;
  int window = 4;

  // differential denoising
  DenoiseMode denoise = DenoiseMode::kDiff;
  std::string diff_on = "av";  // which streams run the denoiser: av|a|v|none
  double lambda_init = 0.5;
  int delta = 1;
  bool scale_full_d = false;
  int denoise_window = 3;  // MA / median baselines
  double ema_coeff = 0.3;

  // relation graph
  GraphStrategy graph_strategy = GraphStrategy::kIncremental;
  int relation_dim = 10;
  int gat_heads = 2;
  double leaky_slope = 0.2;
  GatActivation gat_activation = GatActivation::kElu;
  double speaker_noise = 0.0;
  bool no_speaker = false;

  // diffusion fusion
  FusionMode fusion = FusionMode::kDiffusion;
  double gamma = 1.0;
  bool fusion_scale_sqrt = false;
  DegreeMode degree_mode = DegreeMode::kRow;

  // encoding
  bool encode_text_with_se_pe = false;

  // heads and losses
  std::string modality = "avt";
  double alpha_t = 1.0;
  double alpha_a = 1.0;
  double alpha_v = 1.0;
  FusionWeightMode fusion_weights = FusionWeightMode::kFixed;
  double msl_factor = 0.1;
  bool class_weighting = true;

  // training
  double lr = 1e-3;
  double lr_min = 1e-5;
  int epochs = 30;
  int batch_size = 8;
  std::uint64_t seed = 1;
  double dropout = 0.1;

  // evaluation and ablation
  Segmentation segmentation = Segmentation::kNone;
  Component component = Component::kFull;

  void validate() const;  // throws ConfigError on out-of-range values

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;
  // Partial override from a JSON object; unknown keys throw ConfigError.
  void update_from_json(const std::string& text);
  // desk (default), iemocap, meld
  void apply_preset(const std::string& name);

  bool uses_modality(char m) const;  // m in {'a','v','t'}
  bool denoises(char m) const;       // diff_on contains m
};

// Knobs of the synthetic dialogue generator. Emotions follow a per-speaker
// Markov chain; features are class prototypes plus modality noise, with
// audio/visual carrying an AR(1) stationary component and sparse impulses.
struct SyntheticSpec {
  int classes = 4;
  int speakers = 2;
  int min_length = 8;
  int max_length = 16;
  int train_dialogues = 200;
  int valid_dialogues = 50;
  int test_dialogues = 50;
  int text_dim = 12;
  int audio_dim = 10;
  int visual_dim = 10;
  double stay_prob = 0.6;  // used when `transition` is empty
  std::vector<std::vector<double>> transition;  // optional full matrix, rows sum to 1
  double proto_sep_text = 3.0;
  double proto_sep_audio = 2.0;
  double proto_sep_visual = 2.0;
  double text_noise = 0.3;
  double av_noise = 1.0;  // stationary sigma for audio/visual
  double ar_coeff = 0.9;
  double impulse_prob = 0.02;
  double impulse_mag = 5.0;  // in units of av_noise

  void validate() const;
  std::string to_json() const;
  static SyntheticSpec from_json(const std::string& text);
  static SyntheticSpec load(const std::string& path);

  // Row-stochastic emotion transition matrix (built from stay_prob when no
  // explicit matrix is given).
  std::vector<std::vector<double>> transition_matrix() const;
};

const char* to_string(DenoiseMode m);
const char* to_string(GraphStrategy s);
const char* to_string(GatActivation a);
const char* to_string(FusionMode f);
const char* to_string(FusionWeightMode f);
const char* to_string(DegreeMode d);
const char* to_string(Segmentation s);
const char* to_string(Component c);

}  // namespace erc
