#include "erc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "erc/error.hpp"

namespace erc {

using nlohmann::json;

namespace {

template <typename E>
struct EnumEntry {
  E value;
  const char* name;
};

constexpr EnumEntry<DenoiseMode> kDenoise[] = {
    {DenoiseMode::kDiff, "diff"},       {DenoiseMode::kMovingAverage, "ma"},
    {DenoiseMode::kExponential, "ema"}, {DenoiseMode::kMedian, "median"},
    {DenoiseMode::kNone, "none"},
};
constexpr EnumEntry<GraphStrategy> kStrategy[] = {
    {GraphStrategy::kSingle, "single"},
    {GraphStrategy::kParallelSum, "parallel_sum"},
    {GraphStrategy::kParallelConcat, "parallel_concat"},
    {GraphStrategy::kRelIncremental, "rel_incremental"},
    {GraphStrategy::kIncremental, "incremental"},
};
constexpr EnumEntry<GatActivation> kGatAct[] = {
    {GatActivation::kElu, "elu"},
    {GatActivation::kIdentity, "identity"},
};
constexpr EnumEntry<FusionMode> kFusion[] = {
    {FusionMode::kDiffusion, "diffusion"},
    {FusionMode::kNone, "none"},
};
constexpr EnumEntry<FusionWeightMode> kFusionWeights[] = {
    {FusionWeightMode::kFixed, "fixed"},
    {FusionWeightMode::kLearnableScalar, "lsf"},
};
constexpr EnumEntry<DegreeMode> kDegree[] = {
    {DegreeMode::kRow, "row"},
    {DegreeMode::kSym, "sym"},
};
constexpr EnumEntry<Segmentation> kSegmentation[] = {
    {Segmentation::kNone, "none"},
    {Segmentation::kOverlap50, "overlap50"},
    {Segmentation::kNoOverlap, "no_overlap"},
};
constexpr EnumEntry<Component> kComponent[] = {
    {Component::kFull, "full"},
    {Component::kNoDifferential, "no_differential"},
    {Component::kNoGating, "no_gating"},
    {Component::kNoGraph, "no_graph"},
    {Component::kNoDiffusion, "no_diffusion"},
};

template <typename E, std::size_t N>
const char* enum_name(const EnumEntry<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  throw ConfigError("unknown enum value");
}

template <typename E, std::size_t N>
E enum_value(const EnumEntry<E> (&table)[N], const std::string& s, const char* field) {
  for (const auto& e : table) {
    if (s == e.name) return e.value;
  }
  std::ostringstream os;
  os << "invalid value '" << s << "' for " << field << " (expected one of:";
  for (const auto& e : table) os << " " << e.name;
  os << ")";
  throw ConfigError(os.str());
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError(std::string(what) + ": not a JSON object");
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool valid_subset(const std::string& s, const std::string& allowed) {
  if (s == "none") return true;
  if (s.empty()) return false;
  for (char c : s) {
    if (allowed.find(c) == std::string::npos) return false;
    if (std::count(s.begin(), s.end(), c) != 1) return false;
  }
  return true;
}

}  // namespace

const char* to_string(DenoiseMode m) { return enum_name(kDenoise, m); }
const char* to_string(GraphStrategy s) { return enum_name(kStrategy, s); }
const char* to_string(GatActivation a) { return enum_name(kGatAct, a); }
const char* to_string(FusionMode f) { return enum_name(kFusion, f); }
const char* to_string(FusionWeightMode f) { return enum_name(kFusionWeights, f); }
const char* to_string(DegreeMode d) { return enum_name(kDegree, d); }
const char* to_string(Segmentation s) { return enum_name(kSegmentation, s); }
const char* to_string(Component c) { return enum_name(kComponent, c); }

void RunConfig::validate() const {
  if (hidden_dim <= 0 || hidden_dim % 2 != 0) {
    throw ConfigError("hidden_dim must be positive and even");
  }
  if (heads <= 0 || hidden_dim % heads != 0) {
    throw ConfigError("heads must divide hidden_dim");
  }
  if (window < 0) throw ConfigError("window must be >= 0");
  if (delta < 1 || delta > 3) throw ConfigError("delta must be in {1,2,3}");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0,1]");
  if (denoise_window < 1 || denoise_window % 2 == 0) {
    throw ConfigError("denoise_window must be odd and >= 1");
  }
  if (ema_coeff <= 0.0 || ema_coeff >= 1.0) throw ConfigError("ema_coeff must lie in (0,1)");
  if (relation_dim <= 0) throw ConfigError("relation_dim must be positive");
  if (gat_heads <= 0) throw ConfigError("gat_heads must be positive");
  if (!valid_subset(diff_on, "av")) throw ConfigError("diff_on must be a subset of 'av' or 'none'");
  if (!valid_subset(modality, "avt") || modality == "none") {
    throw ConfigError("modality must be a non-empty subset of 'avt'");
  }
  if (alpha_t < 0 || alpha_a < 0 || alpha_v < 0) {
    throw ConfigError("fusion coefficients must be >= 0");
  }
  if (msl_factor < 0) throw ConfigError("msl_factor must be >= 0");
  if (lr <= 0 || lr_min < 0 || lr_min > lr) throw ConfigError("require 0 <= lr_min <= lr");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must lie in [0,1)");
  if (speaker_noise < 0 || speaker_noise > 1) throw ConfigError("speaker_noise must lie in [0,1]");
}

bool RunConfig::uses_modality(char m) const { return modality.find(m) != std::string::npos; }

bool RunConfig::denoises(char m) const {
  return diff_on != "none" && diff_on.find(m) != std::string::npos;
}

std::string RunConfig::to_json() const {
  json j;
  j["hidden_dim"] = hidden_dim;
  j["heads"] = heads;
  j["window"] = window;
  j["denoise"] = to_string(denoise);
  j["diff_on"] = diff_on;
  j["lambda_init"] = lambda_init;
  j["delta"] = delta;
  j["scale_full_d"] = scale_full_d;
  j["denoise_window"] = denoise_window;
  j["ema_coeff"] = ema_coeff;
  j["graph_strategy"] = to_string(graph_strategy);
  j["relation_dim"] = relation_dim;
  j["gat_heads"] = gat_heads;
  j["leaky_slope"] = leaky_slope;
  j["gat_activation"] = to_string(gat_activation);
  j["speaker_noise"] = speaker_noise;
  j["no_speaker"] = no_speaker;
  j["fusion"] = to_string(fusion);
  j["gamma"] = gamma;
  j["fusion_scale_sqrt"] = fusion_scale_sqrt;
  j["degree_mode"] = to_string(degree_mode);
  j["encode_text_with_se_pe"] = encode_text_with_se_pe;
  j["modality"] = modality;
  j["alpha_t"] = alpha_t;
  j["alpha_a"] = alpha_a;
  j["alpha_v"] = alpha_v;
  j["fusion_weights"] = to_string(fusion_weights);
  j["msl_factor"] = msl_factor;
  j["class_weighting"] = class_weighting;
  j["lr"] = lr;
  j["lr_min"] = lr_min;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["dropout"] = dropout;
  j["segmentation"] = to_string(segmentation);
  j["component"] = to_string(component);
  return j.dump(2);
}

void RunConfig::update_from_json(const std::string& text) {
  json j = parse(text, "config");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    try {
      if (k == "hidden_dim") hidden_dim = v.get<int>();
      else if (k == "heads") heads = v.get<int>();
      else if (k == "window") window = v.get<int>();
      else if (k == "denoise") denoise = enum_value(kDenoise, v.get<std::string>(), "denoise");
      else if (k == "diff_on") diff_on = v.get<std::string>();
      else if (k == "lambda_init") lambda_init = v.get<double>();
      else if (k == "delta") delta = v.get<int>();
      else if (k == "scale_full_d") scale_full_d = v.get<bool>();
      else if (k == "denoise_window") denoise_window = v.get<int>();
      else if (k == "ema_coeff") ema_coeff = v.get<double>();
      else if (k == "graph_strategy")
        graph_strategy = enum_value(kStrategy, v.get<std::string>(), "graph_strategy");
      else if (k == "relation_dim") relation_dim = v.get<int>();
      else if (k == "gat_heads") gat_heads = v.get<int>();
      else if (k == "leaky_slope") leaky_slope = v.get<double>();
      else if (k == "gat_activation")
        gat_activation = enum_value(kGatAct, v.get<std::string>(), "gat_activation");
      else if (k == "speaker_noise") speaker_noise = v.get<double>();
      else if (k == "no_speaker") no_speaker = v.get<bool>();
      else if (k == "fusion") fusion = enum_value(kFusion, v.get<std::string>(), "fusion");
      else if (k == "gamma") gamma = v.get<double>();
      else if (k == "fusion_scale_sqrt") fusion_scale_sqrt = v.get<bool>();
      else if (k == "degree_mode")
        degree_mode = enum_value(kDegree, v.get<std::string>(), "degree_mode");
      else if (k == "encode_text_with_se_pe") encode_text_with_se_pe = v.get<bool>();
      else if (k == "modality") modality = v.get<std::string>();
      else if (k == "alpha_t") alpha_t = v.get<double>();
      else if (k == "alpha_a") alpha_a = v.get<double>();
      else if (k == "alpha_v") alpha_v = v.get<double>();
      else if (k == "fusion_weights") {
        const std::string s = v.get<std::string>();
        if (s == "adf") {
          throw ConfigError("fusion_weights 'adf' is not supported; use fixed or lsf");
        }
        fusion_weights = enum_value(kFusionWeights, s, "fusion_weights");
      } else if (k == "msl_factor") msl_factor = v.get<double>();
      else if (k == "class_weighting") class_weighting = v.get<bool>();
      else if (k == "lr") lr = v.get<double>();
      else if (k == "lr_min") lr_min = v.get<double>();
      else if (k == "epochs") epochs = v.get<int>();
      else if (k == "batch_size") batch_size = v.get<int>();
      else if (k == "seed") seed = v.get<std::uint64_t>();
      else if (k == "dropout") dropout = v.get<double>();
      else if (k == "segmentation")
        segmentation = enum_value(kSegmentation, v.get<std::string>(), "segmentation");
      else if (k == "component")
        component = enum_value(kComponent, v.get<std::string>(), "component");
      else throw ConfigError("unknown config key '" + k + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + k + "': " + e.what());
    }
  }
  validate();
}

RunConfig RunConfig::from_json(const std::string& text) {
  RunConfig c;
  c.update_from_json(text);
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return from_json(read_file(path)); }

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << to_json() << "\n";
}

void RunConfig::apply_preset(const std::string& name) {
  if (name == "desk") {
    *this = RunConfig{};
  } else if (name == "iemocap") {
    hidden_dim = 512;
    heads = 64;
    window = 20;
    lr = 1e-4;
    alpha_t = 1.0;
    alpha_a = 1.0;
    alpha_v = 0.4;
  } else if (name == "meld") {
    hidden_dim = 256;
    heads = 16;
    window = 25;
    lr = 5e-5;
    alpha_t = 3.0;
    alpha_a = 1.0;
    alpha_v = 0.3;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk, iemocap, meld)");
  }
  validate();
}

// ---- SyntheticSpec ---------------------------------------------------------

void SyntheticSpec::validate() const {
  if (classes < 2) throw ConfigError("synthetic: classes must be >= 2");
  if (speakers < 1) throw ConfigError("synthetic: speakers must be >= 1");
  if (min_length < 1 || max_length < min_length) {
    throw ConfigError("synthetic: require 1 <= min_length <= max_length");
  }
  if (train_dialogues < 0 || valid_dialogues < 0 || test_dialogues < 0) {
    throw ConfigError("synthetic: dialogue counts must be >= 0");
  }
  if (text_dim < 1 || audio_dim < 1 || visual_dim < 1) {
    throw ConfigError("synthetic: feature dims must be >= 1");
  }
  if (stay_prob < 0 || stay_prob > 1) throw ConfigError("synthetic: stay_prob must lie in [0,1]");
  if (text_noise < 0 || av_noise < 0) throw ConfigError("synthetic: noise sigmas must be >= 0");
  if (ar_coeff < 0 || ar_coeff >= 1) throw ConfigError("synthetic: ar_coeff must lie in [0,1)");
  if (impulse_prob < 0 || impulse_prob > 1) {
    throw ConfigError("synthetic: impulse_prob must lie in [0,1]");
  }
  if (impulse_mag < 0) throw ConfigError("synthetic: impulse_mag must be >= 0");
  if (!transition.empty()) {
    if (static_cast<int>(transition.size()) != classes) {
      throw ConfigError("synthetic: transition matrix must be classes x classes");
    }
    for (const auto& row : transition) {
      if (static_cast<int>(row.size()) != classes) {
        throw ConfigError("synthetic: transition matrix must be classes x classes");
      }
      double s = 0;
      for (double p : row) {
        if (p < 0) throw ConfigError("synthetic: transition probabilities must be >= 0");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-9) {
        throw ConfigError("synthetic: transition matrix rows must sum to 1");
      }
    }
  }
}

std::vector<std::vector<double>> SyntheticSpec::transition_matrix() const {
  if (!transition.empty()) return transition;
  std::vector<std::vector<double>> t(classes, std::vector<double>(classes));
  const double other = classes > 1 ? (1.0 - stay_prob) / (classes - 1) : 0.0;
  for (int i = 0; i < classes; ++i) {
    for (int j = 0; j < classes; ++j) t[i][j] = (i == j) ? stay_prob : other;
  }
  return t;
}

std::string SyntheticSpec::to_json() const {
  json j;
  j["classes"] = classes;
  j["speakers"] = speakers;
  j["min_length"] = min_length;
  j["max_length"] = max_length;
  j["train_dialogues"] = train_dialogues;
  j["valid_dialogues"] = valid_dialogues;
  j["test_dialogues"] = test_dialogues;
  j["text_dim"] = text_dim;
  j["audio_dim"] = audio_dim;
  j["visual_dim"] = visual_dim;
  j["stay_prob"] = stay_prob;
  if (!transition.empty()) j["transition"] = transition;
  j["proto_sep_text"] = proto_sep_text;
  j["proto_sep_audio"] = proto_sep_audio;
  j["proto_sep_visual"] = proto_sep_visual;
  j["text_noise"] = text_noise;
  j["av_noise"] = av_noise;
  j["ar_coeff"] = ar_coeff;
  j["impulse_prob"] = impulse_prob;
  j["impulse_mag"] = impulse_mag;
  return j.dump(2);
}

SyntheticSpec SyntheticSpec::from_json(const std::string& text) {
  json j = parse(text, "synthetic spec");
  SyntheticSpec s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    try {
      if (k == "classes") s.classes = v.get<int>();
      else if (k == "speakers") s.speakers = v.get<int>();
      else if (k == "min_length") s.min_length = v.get<int>();
      else if (k == "max_length") s.max_length = v.get<int>();
      else if (k == "train_dialogues") s.train_dialogues = v.get<int>();
      else if (k == "valid_dialogues") s.valid_dialogues = v.get<int>();
      else if (k == "test_dialogues") s.test_dialogues = v.get<int>();
      else if (k == "text_dim") s.text_dim = v.get<int>();
      else if (k == "audio_dim") s.audio_dim = v.get<int>();
      else if (k == "visual_dim") s.visual_dim = v.get<int>();
      else if (k == "stay_prob") s.stay_prob = v.get<double>();
      else if (k == "transition") s.transition = v.get<std::vector<std::vector<double>>>();
      else if (k == "proto_sep_text") s.proto_sep_text = v.get<double>();
      else if (k == "proto_sep_audio") s.proto_sep_audio = v.get<double>();
      else if (k == "proto_sep_visual") s.proto_sep_visual = v.get<double>();
      else if (k == "text_noise") s.text_noise = v.get<double>();
      else if (k == "av_noise") s.av_noise = v.get<double>();
      else if (k == "ar_coeff") s.ar_coeff = v.get<double>();
      else if (k == "impulse_prob") s.impulse_prob = v.get<double>();
      else if (k == "impulse_mag") s.impulse_mag = v.get<double>();
      else throw ConfigError("unknown synthetic spec key '" + k + "'");
    } catch (const json::exception& e) {
      throw ConfigError("synthetic spec key '" + k + "': " + e.what());
    }
  }
  s.validate();
  return s;
}

SyntheticSpec SyntheticSpec::load(const std::string& path) {
  return from_json(read_file(path));
}

}  // namespace erc
