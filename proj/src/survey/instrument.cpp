#include "coopvax/survey/instrument.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coopvax::survey {

namespace {

constexpr std::array<std::string_view, kFactorCount> kFactorNames{"ABC", "LO", "FA", "F", "Ch", "SI", "C",
                                                                   "R",   "S",  "L",  "O", "A",  "Acc"};
constexpr std::array<std::string_view, 3> kDimensionNames{"pedagogy", "player_experience", "usability"};

[[noreturn]] void invalid(const std::string& what) { throw SurveyError(SurveyErrc::InvalidInstrument, what); }

}  // namespace

Dimension dimension_of(Factor f) {
  switch (f) {
    case Factor::ABC:
    case Factor::LO:
      return Dimension::Pedagogy;
    case Factor::L:
    case Factor::O:
    case Factor::A:
    case Factor::Acc:
      return Dimension::Usability;
    default:
      return Dimension::PlayerExperience;
  }
}

std::string_view to_string(Factor f) { return kFactorNames[static_cast<std::size_t>(f)]; }
std::string_view to_string(Dimension d) { return kDimensionNames[static_cast<std::size_t>(d)]; }

std::optional<Factor> factor_from_string(std::string_view s) {
  const auto it = std::find(kFactorNames.begin(), kFactorNames.end(), s);
  if (it == kFactorNames.end()) return std::nullopt;
  return static_cast<Factor>(it - kFactorNames.begin());
}

std::optional<Dimension> dimension_from_string(std::string_view s) {
  const auto it = std::find(kDimensionNames.begin(), kDimensionNames.end(), s);
  if (it == kDimensionNames.end()) return std::nullopt;
  return static_cast<Dimension>(it - kDimensionNames.begin());
}

std::string_view to_string(SurveyErrc c) {
  switch (c) {
    case SurveyErrc::Io:
      return "io";
    case SurveyErrc::InvalidInstrument:
      return "invalid_instrument";
    case SurveyErrc::MalformedCsv:
      return "malformed_csv";
    case SurveyErrc::UnknownColumn:
      return "unknown_column";
    case SurveyErrc::OutOfRangeResponse:
      return "out_of_range_response";
    case SurveyErrc::EmptyDataset:
      return "empty_dataset";
    case SurveyErrc::NoResponses:
      return "no_responses";
    case SurveyErrc::MissingDimension:
      return "missing_dimension";
    case SurveyErrc::InvalidWeights:
      return "invalid_weights";
  }
  return "?";
}

std::optional<std::size_t> Instrument::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < questions.size(); ++i)
    if (questions[i].id == id) return i;
  return std::nullopt;
}

Instrument parse_instrument(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("instrument is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) invalid("instrument must be a JSON object");
  for (const auto& [k, _] : doc.items())
    if (k != "name" && k != "demographics" && k != "questions") invalid("unknown field '" + k + "'");
  if (!doc.contains("questions") || !doc["questions"].is_array()) invalid("'questions' must be an array");

  Instrument inst;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) invalid("'name' must be a string");
    inst.name = doc["name"].get<std::string>();
  }
  std::set<std::string> seen;
  if (doc.contains("demographics")) {
    if (!doc["demographics"].is_array()) invalid("'demographics' must be an array");
    for (const auto& d : doc["demographics"]) {
      if (!d.is_string() || d.get<std::string>().empty()) invalid("demographics entries must be non-empty strings");
      if (!seen.insert(d.get<std::string>()).second) invalid("duplicate column '" + d.get<std::string>() + "'");
      inst.demographics.push_back(d.get<std::string>());
    }
  }
  const auto& qs = doc["questions"];
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto where = "questions[" + std::to_string(i) + "]";
    const auto& q = qs[i];
    if (!q.is_object()) invalid(where + " must be an object");
    for (const auto& [k, _] : q.items())
      if (k != "id" && k != "text" && k != "factor" && k != "dimension") invalid(where + ": unknown field '" + k + "'");
    for (const char* k : {"id", "text", "factor", "dimension"})
      if (!q.contains(k) || !q[k].is_string()) invalid(where + ": '" + k + "' must be a string");
    Question out;
    out.id = q["id"].get<std::string>();
    out.text = q["text"].get<std::string>();
    if (out.id.empty()) invalid(where + ": empty id");
    if (!seen.insert(out.id).second) invalid(where + ": duplicate id '" + out.id + "'");
    const auto f = factor_from_string(q["factor"].get<std::string>());
    if (!f) invalid(where + ": unknown factor '" + q["factor"].get<std::string>() + "'");
    const auto d = dimension_from_string(q["dimension"].get<std::string>());
    if (!d) invalid(where + ": unknown dimension '" + q["dimension"].get<std::string>() + "'");
    if (dimension_of(*f) != *d)
      invalid(where + ": factor " + std::string(to_string(*f)) + " belongs to " + std::string(to_string(dimension_of(*f))));
    out.factor = *f;
    out.dimension = *d;
    inst.questions.push_back(std::move(out));
  }
  if (inst.questions.empty()) invalid("instrument has no questions");
  return inst;
}

Instrument load_instrument(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SurveyError(SurveyErrc::Io, "cannot open instrument " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instrument(ss.str());
}

std::filesystem::path default_instrument_path() { return COOPVAX_DEFAULT_INSTRUMENT; }

}  // namespace coopvax::survey
