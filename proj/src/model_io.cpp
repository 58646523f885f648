#include "fmdiag/model_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "fmdiag/error.hpp"

namespace fmdiag {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormatName = "fmdiag-model";

json settings_to_json(const FeatureSettings& s) {
  json fmd = {{"max_iter", s.fmd.max_iter}, {"ridge", s.fmd.ridge}};
  fmd["bank_size"] = s.fmd.bank_size ? json(*s.fmd.bank_size) : json(nullptr);
  fmd["min_period_lag"] = s.fmd.min_period_lag ? json(*s.fmd.min_period_lag) : json(nullptr);
  return {{"selected_modes", s.selected_modes},
          {"indicator", {{"embedding", s.indicator.embedding}, {"tolerance_factor", s.indicator.tolerance_factor}}},
          {"fmd", fmd}};
}

std::optional<int> optional_int(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

FeatureSettings settings_from_json(const json& j) {
  FeatureSettings s;
  s.selected_modes = j.at("selected_modes").get<int>();
  s.indicator.embedding = j.at("indicator").at("embedding").get<int>();
  s.indicator.tolerance_factor = j.at("indicator").at("tolerance_factor").get<double>();
  const auto& fmd = j.at("fmd");
  s.fmd.max_iter = fmd.at("max_iter").get<int>();
  s.fmd.ridge = fmd.at("ridge").get<double>();
  s.fmd.bank_size = optional_int(fmd.at("bank_size"));
  s.fmd.min_period_lag = optional_int(fmd.at("min_period_lag"));
  return s;
}

}  // namespace

std::string model_to_json(const DiagnosisModel& model) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = model.version;
  json conditions = json::array();
  for (const auto& c : model.conditions) {
    json intervals = json::array();
    for (const auto& iv : c.intervals) intervals.push_back({iv.lower, iv.upper});
    json svns = json::array();
    for (const auto& t : c.svns.features()) svns.push_back({t.truth, t.indeterminacy, t.falsity});
    conditions.push_back({{"label", c.label},
                          {"mode_count", c.mode_count},
                          {"filter_len", c.filter_len},
                          {"intervals", intervals},
                          {"svns", svns},
                          {"simi", c.simi}});
  }
  doc["conditions"] = conditions;
  doc["global_stats"] = {{"min", model.stats.min}, {"max", model.stats.max}};
  doc["weights"] = model.weights;
  doc["ind_floor"] = model.ind_floor;
  doc["features"] = settings_to_json(model.features);
  return doc.dump(2) + "\n";
}

DiagnosisModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("model is not valid JSON: ") + e.what());
  }
  DiagnosisModel model;
  try {
    if (doc.at("format").get<std::string>() != kFormatName)
      throw Error(ErrorKind::ParseError, "not an fmdiag model document");
    model.version = doc.at("version").get<int>();
    if (model.version != DiagnosisModel::kFormatVersion)
      throw Error(ErrorKind::VersionError, "unsupported model version " + std::to_string(model.version));
    for (const auto& c : doc.at("conditions")) {
      ConditionModel cm;
      cm.label = c.at("label").get<std::string>();
      cm.mode_count = c.at("mode_count").get<int>();
      cm.filter_len = c.at("filter_len").get<int>();
      for (const auto& iv : c.at("intervals")) cm.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      std::vector<NeutroTriple> triples;
      for (const auto& t : c.at("svns")) triples.push_back({t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()});
      cm.svns = Svns(std::move(triples));
      cm.simi = c.at("simi").get<std::vector<double>>();
      model.conditions.push_back(std::move(cm));
    }
    model.stats.min = doc.at("global_stats").at("min").get<std::vector<double>>();
    model.stats.max = doc.at("global_stats").at("max").get<std::vector<double>>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.ind_floor = doc.at("ind_floor").get<double>();
    model.features = settings_from_json(doc.at("features"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw Error(ErrorKind::ParseError, e.what());
    throw;
  }
  model.validate();
  return model;
}

void save_model(const DiagnosisModel& model, std::ostream& out) {
  out << model_to_json(model);
  if (!out) throw Error(ErrorKind::IoError, "failed to write model");
}

void save_model(const DiagnosisModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  save_model(model, out);
}

DiagnosisModel load_model(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

DiagnosisModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open model " + path.string());
  return load_model(in);
}

}  // namespace fmdiag
