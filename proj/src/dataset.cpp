#include "erc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace erc {

using nlohmann::json;

int DatasetHeader::class_index(const std::string& name) const {
  auto it = std::find(classes.begin(), classes.end(), name);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

int DatasetHeader::speaker_index(const std::string& name) const {
  auto it = std::find(speakers.begin(), speakers.end(), name);
  return it == speakers.end() ? -1 : static_cast<int>(it - speakers.begin());
}

std::size_t Dataset::utterance_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.utterances.size();
  return n;
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(header.classes.size(), 0);
  for (const auto& r : records) {
    for (const auto& u : r.utterances) {
      if (u.label_index >= 0) counts[u.label_index]++;
    }
  }
  return counts;
}

std::string header_path_for(const std::string& data_path) {
  const std::string suffix = ".jsonl";
  if (data_path.size() > suffix.size() &&
      data_path.compare(data_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return data_path.substr(0, data_path.size() - suffix.size()) + ".header.json";
  }
  return data_path + ".header.json";
}

std::string header_to_json(const DatasetHeader& h) {
  json j;
  j["classes"] = h.classes;
  j["speakers"] = h.speakers;
  j["dims"] = {{"text", h.text_dim}, {"audio", h.audio_dim}, {"visual", h.visual_dim}};
  return j.dump(2);
}

namespace {

DatasetHeader header_from_json(const std::string& text, const std::string& path) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw DataError(path + ": header is not a JSON object");
  }
  DatasetHeader h;
  try {
    h.classes = j.at("classes").get<std::vector<std::string>>();
    h.speakers = j.at("speakers").get<std::vector<std::string>>();
    h.text_dim = j.at("dims").at("text").get<int>();
    h.audio_dim = j.at("dims").at("audio").get<int>();
    h.visual_dim = j.at("dims").at("visual").get<int>();
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed header: " + e.what());
  }
  if (h.classes.empty()) throw DataError(path + ": header declares no classes");
  if (h.speakers.empty()) throw DataError(path + ": header declares no speakers");
  return h;
}

void check_dim(const char* field, std::size_t got, int want, const std::string& where) {
  if (static_cast<int>(got) != want) {
    std::ostringstream os;
    os << where << ": field '" << field << "' has dim " << got << ", header declares " << want;
    throw DataError(os.str());
  }
}

json utterance_to_json(const Utterance& u) {
  json j;
  j["speaker"] = u.speaker;
  if (!u.label.empty()) j["label"] = u.label;
  j["features"] = {{"text", u.text}, {"audio", u.audio}, {"visual", u.visual}};
  return j;
}

Utterance utterance_from_json(const json& j, const DatasetHeader& h, const std::string& where) {
  Utterance u;
  try {
    u.speaker = j.at("speaker").get<std::string>();
    if (j.contains("label")) u.label = j.at("label").get<std::string>();
    const json& f = j.at("features");
    u.text = f.at("text").get<std::vector<double>>();
    u.audio = f.at("audio").get<std::vector<double>>();
    u.visual = f.at("visual").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError(where + ": malformed utterance: " + e.what());
  }
  check_dim("text", u.text.size(), h.text_dim, where);
  check_dim("audio", u.audio.size(), h.audio_dim, where);
  check_dim("visual", u.visual.size(), h.visual_dim, where);
  u.speaker_index = h.speaker_index(u.speaker);
  if (u.speaker_index < 0) {
    throw DataError(where + ": speaker '" + u.speaker + "' not in header speaker list");
  }
  if (!u.label.empty()) {
    u.label_index = h.class_index(u.label);
    if (u.label_index < 0) {
      throw DataError(where + ": label '" + u.label + "' not in header class list");
    }
  }
  return u;
}

}  // namespace

std::string dataset_to_jsonl(const Dataset& ds) {
  std::ostringstream os;
  for (const auto& r : ds.records) {
    json j;
    j["dialogue_id"] = r.dialogue_id;
    json us = json::array();
    for (const auto& u : r.utterances) us.push_back(utterance_to_json(u));
    j["utterances"] = std::move(us);
    os << j.dump() << "\n";
  }
  return os.str();
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path);
  const std::string hpath = header_path_for(path);
  std::ifstream hin(hpath);
  if (!hin) throw DataError("missing dataset header " + hpath);
  std::ostringstream hos;
  hos << hin.rdbuf();

  Dataset ds;
  ds.header = header_from_json(hos.str(), hpath);

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::ostringstream where;
    where << path << ":" << lineno;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError(where.str() + ": not a JSON object");
    }
    DialogueRecord rec;
    try {
      rec.dialogue_id = j.at("dialogue_id").get<std::string>();
      for (const auto& ju : j.at("utterances")) {
        rec.utterances.push_back(utterance_from_json(ju, ds.header, where.str()));
      }
    } catch (const json::exception& e) {
      throw DataError(where.str() + ": malformed record: " + e.what());
    }
    if (rec.utterances.empty()) {
      throw DataError(where.str() + ": dialogue has no utterances");
    }
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) throw DataError(path + ": dataset is empty");
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file " + path);
  out << dataset_to_jsonl(ds);
  std::ofstream hout(header_path_for(path));
  if (!hout) throw DataError("cannot write dataset header for " + path);
  hout << header_to_json(ds.header) << "\n";
}

}  // namespace erc
