#include "varw/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "varw/errors.hpp"

namespace varw {

namespace {

using nlohmann::json;

Vector read_vector(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ModelError(std::string("model: missing key '") + key + "'");
  const json& node = doc.at(key);
  if (!node.is_array()) throw ModelError(std::string("model: '") + key + "' must be an array");
  Vector out;
  out.reserve(node.size());
  for (const json& e : node) {
    if (!e.is_number()) {
      throw ModelError(std::string("model: '") + key + "' must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

ModelParams parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model: top level must be an object");

  static const std::set<std::string> known = {"kernel", "lambda", "sigma", "nu", "labels"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) {
      throw ModelError("model: unknown key '" + item.key() + "'");
    }
  }

  if (!doc.contains("kernel")) throw ModelError("model: missing key 'kernel'");
  const json& k = doc.at("kernel");
  if (!k.is_array()) throw ModelError("model: 'kernel' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const json& row : k) {
    if (!row.is_array()) throw ModelError("model: every kernel row must be an array");
    std::vector<double> r;
    for (const json& e : row) {
      if (!e.is_number()) throw ModelError("model: kernel entries must be numbers");
      r.push_back(e.get<double>());
    }
    rows.push_back(std::move(r));
  }

  ModelParams params;
  params.kernel = Kernel::from_rows(rows);
  params.sleep_rates = read_vector(doc, "lambda");
  params.init_sleepers = read_vector(doc, "sigma");
  params.init_actives = read_vector(doc, "nu");
  if (doc.contains("labels")) {
    const json& labels = doc.at("labels");
    if (!labels.is_array()) throw ModelError("model: 'labels' must be an array of strings");
    for (const json& l : labels) {
      if (!l.is_string()) throw ModelError("model: 'labels' must be an array of strings");
      params.labels.push_back(l.get<std::string>());
    }
  }
  return params;
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string dump_model(const ModelParams& params) {
  json doc;
  json rows = json::array();
  for (std::size_t x = 0; x < params.num_villages(); ++x) {
    const auto r = params.kernel.row(x);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  doc["kernel"] = std::move(rows);
  doc["lambda"] = params.sleep_rates;
  doc["sigma"] = params.init_sleepers;
  doc["nu"] = params.init_actives;
  if (!params.labels.empty()) doc["labels"] = params.labels;
  return doc.dump(2);
}

}  // namespace varw
