#include "hgrec/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "hgrec/errors.hpp"

namespace hgrec {

namespace {

constexpr int kVersion = 1;

nlohmann::ordered_json tensor_json(const Tensor& t) {
  nlohmann::ordered_json j;
  j["rows"] = t.rows;
  j["cols"] = t.cols;
  j["data"] = t.v;
  return j;
}

Tensor tensor_from_json(const nlohmann::json& j, const std::string& name) {
  Tensor t(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  if (static_cast<int>(data.size()) != t.size())
    throw DataError("checkpoint: tensor '" + name + "' data length does not match shape");
  for (int k = 0; k < t.size(); ++k) t.v[k] = data[k].get<double>();
  return t;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, ScholarEmbeddingModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "hgrec-checkpoint";
  j["version"] = kVersion;
  const ModelConfig& c = model.config();
  j["model"] = {{"input_dim", c.input_dim},
                {"head_dim", c.head_dim},
                {"num_heads", c.num_heads},
                {"sem_hidden", c.sem_hidden},
                {"slope", c.slope}};
  j["metapaths"] = model.metapath_names();
  nlohmann::ordered_json params;
  for (Parameter* p : model.parameters()) params[p->name] = tensor_json(p->value);
  j["params"] = params;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << j.dump(2) << "\n";
}

namespace {

nlohmann::json parse_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "hgrec-checkpoint")
    throw DataError("checkpoint " + path.string() + " has unknown format");
  if (j.value("version", -1) != kVersion)
    throw DataError("checkpoint " + path.string() + " has unsupported version");
  return j;
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  const auto& m = j.at("model");
  c.input_dim = m.at("input_dim").get<int>();
  c.head_dim = m.at("head_dim").get<int>();
  c.num_heads = m.at("num_heads").get<int>();
  c.sem_hidden = m.at("sem_hidden").get<int>();
  c.slope = m.at("slope").get<double>();
  return c;
}

}  // namespace

LoadedCheckpoint read_checkpoint_header(const std::filesystem::path& path) {
  nlohmann::json j = parse_checkpoint(path);
  return {config_from_json(j), j.at("metapaths").get<std::vector<std::string>>()};
}

ScholarEmbeddingModel load_checkpoint(const std::filesystem::path& path) {
  nlohmann::json j = parse_checkpoint(path);
  ScholarEmbeddingModel model(config_from_json(j),
                              j.at("metapaths").get<std::vector<std::string>>(), 0);
  const auto& params = j.at("params");
  size_t used = 0;
  for (Parameter* p : model.parameters()) {
    if (!params.contains(p->name))
      throw DataError("checkpoint: missing parameter '" + p->name + "'");
    Tensor t = tensor_from_json(params.at(p->name), p->name);
    if (!t.same_shape(p->value))
      throw DataError("checkpoint: parameter '" + p->name + "' has shape " + t.shape_str() +
                      ", model expects " + p->value.shape_str());
    p->value = std::move(t);
    ++used;
  }
  if (used != params.size())
    throw DataError("checkpoint: file holds " + std::to_string(params.size()) +
                    " parameters, model expects " + std::to_string(used));
  return model;
}

}  // namespace hgrec
