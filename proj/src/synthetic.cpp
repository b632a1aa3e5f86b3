#include "erc/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace erc {

namespace {

struct Prototypes {
  // [class][dim] per modality
  std::vector<std::vector<double>> text, audio, visual;
};

std::vector<std::vector<double>> draw_prototypes(int classes, int dim, double sep,
                                                 std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> protos(classes, std::vector<double>(dim));
  for (auto& p : protos) {
    double norm2 = 0;
    for (auto& v : p) {
      v = g(rng);
      norm2 += v * v;
    }
    const double s = sep / std::sqrt(std::max(norm2, 1e-12));
    for (auto& v : p) v *= s;
  }
  return protos;
}

int sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    r -= probs[i];
    if (r <= 0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

Dataset generate_split(const SyntheticSpec& spec, const Prototypes& protos,
                       const DatasetHeader& header, int n_dialogues, const std::string& tag,
                       std::mt19937_64& rng) {
  Dataset ds;
  ds.header = header;
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len_dist(spec.min_length, spec.max_length);
  std::uniform_int_distribution<int> spk_dist(0, spec.speakers - 1);
  std::uniform_int_distribution<int> cls_dist(0, spec.classes - 1);
  const auto transition = spec.transition_matrix();
  // stationary per-step innovation keeps Var(noise_t) = av_noise^2
  const double innov = spec.av_noise * std::sqrt(1.0 - spec.ar_coeff * spec.ar_coeff);

  for (int d = 0; d < n_dialogues; ++d) {
    DialogueRecord rec;
    rec.dialogue_id = tag + "_" + std::to_string(d);
    const int len = len_dist(rng);
    std::vector<int> emotion(spec.speakers);
    for (auto& e : emotion) e = cls_dist(rng);

    std::vector<double> ar_audio(spec.audio_dim), ar_visual(spec.visual_dim);
    for (auto& v : ar_audio) v = spec.av_noise * g(rng);
    for (auto& v : ar_visual) v = spec.av_noise * g(rng);

    for (int t = 0; t < len; ++t) {
      const int s = spk_dist(rng);
      if (t > 0) emotion[s] = sample_index(transition[emotion[s]], rng);
      const int c = emotion[s];

      Utterance ut;
      ut.speaker = header.speakers[s];
      ut.speaker_index = s;
      ut.label = header.classes[c];
      ut.label_index = c;

      ut.text.resize(spec.text_dim);
      for (int j = 0; j < spec.text_dim; ++j) {
        ut.text[j] = protos.text[c][j] + spec.text_noise * g(rng);
      }

      for (auto& v : ar_audio) v = spec.ar_coeff * v + innov * g(rng);
      for (auto& v : ar_visual) v = spec.ar_coeff * v + innov * g(rng);

      ut.audio.resize(spec.audio_dim);
      for (int j = 0; j < spec.audio_dim; ++j) ut.audio[j] = protos.audio[c][j] + ar_audio[j];
      ut.visual.resize(spec.visual_dim);
      for (int j = 0; j < spec.visual_dim; ++j) ut.visual[j] = protos.visual[c][j] + ar_visual[j];

      if (u(rng) < spec.impulse_prob) {
        const double mag = spec.impulse_mag * spec.av_noise;
        for (auto& v : ut.audio) v += mag * g(rng);
      }
      if (u(rng) < spec.impulse_prob) {
        const double mag = spec.impulse_mag * spec.av_noise;
        for (auto& v : ut.visual) v += mag * g(rng);
      }

      rec.utterances.push_back(std::move(ut));
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace

SyntheticSplits generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();

  DatasetHeader header;
  for (int c = 0; c < spec.classes; ++c) header.classes.push_back("c" + std::to_string(c));
  for (int s = 0; s < spec.speakers; ++s) header.speakers.push_back("s" + std::to_string(s));
  header.text_dim = spec.text_dim;
  header.audio_dim = spec.audio_dim;
  header.visual_dim = spec.visual_dim;

  std::mt19937_64 proto_rng(seed);
  Prototypes protos;
  protos.text = draw_prototypes(spec.classes, spec.text_dim, spec.proto_sep_text, proto_rng);
  protos.audio = draw_prototypes(spec.classes, spec.audio_dim, spec.proto_sep_audio, proto_rng);
  protos.visual = draw_prototypes(spec.classes, spec.visual_dim, spec.proto_sep_visual, proto_rng);

  SyntheticSplits out;
  std::mt19937_64 train_rng(seed ^ 0x9E3779B97F4A7C15ull);
  std::mt19937_64 valid_rng(seed ^ 0xC2B2AE3D27D4EB4Full);
  std::mt19937_64 test_rng(seed ^ 0x165667B19E3779F9ull);
  out.train = generate_split(spec, protos, header, spec.train_dialogues, "train", train_rng);
  out.valid = generate_split(spec, protos, header, spec.valid_dialogues, "valid", valid_rng);
  out.test = generate_split(spec, protos, header, spec.test_dialogues, "test", test_rng);
  return out;
}

}  // namespace erc
