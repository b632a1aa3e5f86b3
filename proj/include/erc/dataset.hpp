#pragma once

#include <string>
#include <vector>

#include "erc/error.hpp"

namespace erc {

// One speaker turn with precomputed per-modality feature vectors.
struct Utterance {
  std::string speaker;
  std::string label;  // empty when unlabeled
  std::vector<double> text;
  std::vector<double> audio;
  std::vector<double> visual;
  int speaker_index = -1;  // resolved against the header speaker list
  int label_index = -1;    // resolved against the header class list; -1 if absent
};

struct DialogueRecord {
  std::string dialogue_id;
  std::vector<Utterance> utterances;
};

// Sidecar header: declares the class list, the global speaker inventory
// and the raw feature dimensions all records must match.
struct DatasetHeader {
  std::vector<std::string> classes;
  std::vector<std::string> speakers;
  int text_dim = 0;
  int audio_dim = 0;
  int visual_dim = 0;

  int class_index(const std::string& name) const;    // -1 when unknown
  int speaker_index(const std::string& name) const;  // -1 when unknown
};

struct Dataset {
  DatasetHeader header;
  std::vector<DialogueRecord> records;

  std::size_t utterance_count() const;
  // Labeled-utterance count per class, indexed like header.classes.
  std::vector<int> class_counts() const;
};

// JSON-lines dataset format: `path` holds one DialogueRecord object per
// line; the header lives in a sidecar file derived from `path`
// (foo.jsonl -> foo.header.json). Parse errors name the offending line
// and field.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);
std::string header_path_for(const std::string& data_path);

// Serialization used by save_dataset and the generator determinism tests.
std::string dataset_to_jsonl(const Dataset& ds);
std::string header_to_json(const DatasetHeader& h);

}  // namespace erc
