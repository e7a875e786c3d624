#include "coopvax/survey/scoring.hpp"

#include <cmath>

namespace coopvax::survey {

using ojson = nlohmann::ordered_json;

Stats describe(std::span<const double> values, SdKind kind) {
  Stats s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double denom = kind == SdKind::Population ? static_cast<double>(s.n) : static_cast<double>(s.n) - 1.0;
  s.sd = denom > 0.0 ? std::sqrt(ss / denom) : 0.0;
  return s;
}

Stats question_stats(const SurveyDataset& data, std::size_t question, SdKind kind) {
  if (question >= data.questions()) throw SurveyError(SurveyErrc::NoResponses, "no such question");
  std::vector<double> values;
  for (const auto& row : data.responses)
    if (row[question]) values.push_back(*row[question]);
  if (values.empty())
    throw SurveyError(SurveyErrc::NoResponses, "question '" + data.question_ids[question] + "' has no responses");
  return describe(values, kind);
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Poor:
      return "poor";
    case Classification::Regular:
      return "regular";
    case Classification::Excellent:
      return "excellent";
  }
  return "?";
}

Classification classify(double q) {
  if (q > kExcellentAbove) return Classification::Excellent;
  if (q < kPoorBelow) return Classification::Poor;
  return Classification::Regular;
}

double quality_score(double px, double us, Weights w) {
  if (!(w.player_experience > 0.0) || !(w.usability > 0.0) || !std::isfinite(w.player_experience) ||
      !std::isfinite(w.usability))
    throw SurveyError(SurveyErrc::InvalidWeights, "weights must be positive");
  const double raw =
      100.0 * (w.player_experience * (px - 1.0) / 4.0 + w.usability * (us - 1.0) / 4.0) / (w.player_experience + w.usability);
  return std::round(raw * 1e9) / 1e9;
}

ScoreReport score(const SurveyDataset& data, const Instrument& instrument, Weights weights, SdKind kind) {
  ScoreReport r;
  r.respondents = data.respondents();
  r.missing = data.missing;
  r.weights = weights;
  r.sd_kind = kind;

  std::array<std::vector<double>, kFactorCount> pooled;
  std::array<std::size_t, kFactorCount> answered_questions{};
  std::array<double, 3> dim_sum{};
  std::array<std::size_t, 3> dim_count{};
  for (std::size_t q = 0; q < instrument.questions.size(); ++q) {
    const auto& question = instrument.questions[q];
    std::vector<double> values;
    for (const auto& row : data.responses)
      if (row[q]) values.push_back(*row[q]);
    if (values.empty()) {
      r.unanswered.push_back(question.id);
      continue;
    }
    const auto st = describe(values, kind);
    r.questions.push_back({question.id, question.factor, st});
    const auto f = static_cast<std::size_t>(question.factor);
    pooled[f].insert(pooled[f].end(), values.begin(), values.end());
    ++answered_questions[f];
    const auto d = static_cast<std::size_t>(question.dimension);
    dim_sum[d] += st.mean;
    ++dim_count[d];
  }
  for (std::size_t f = 0; f < kFactorCount; ++f)
    if (!pooled[f].empty()) r.factors.push_back({static_cast<Factor>(f), describe(pooled[f], kind), answered_questions[f]});
  for (std::size_t d = 0; d < 3; ++d) {
    r.dimension_present[d] = dim_count[d] > 0;
    if (dim_count[d] > 0) r.dimension_means[d] = dim_sum[d] / static_cast<double>(dim_count[d]);
  }
  for (const auto d : {Dimension::PlayerExperience, Dimension::Usability})
    if (!r.dimension_present[static_cast<std::size_t>(d)])
      throw SurveyError(SurveyErrc::MissingDimension, "no answered questions in dimension " + std::string(to_string(d)));

  r.quality_score = quality_score(r.dimension_means[static_cast<std::size_t>(Dimension::PlayerExperience)],
                                  r.dimension_means[static_cast<std::size_t>(Dimension::Usability)], weights);
  r.classification = classify(r.quality_score);
  return r;
}

MeanAggregate aggregate_from_question_means(const Instrument& instrument, std::span<const double> means) {
  if (means.size() != instrument.questions.size())
    throw SurveyError(SurveyErrc::MalformedCsv, "need one mean per instrument question");
  MeanAggregate a;
  std::array<std::size_t, kFactorCount> fc{};
  std::array<std::size_t, 3> dc{};
  for (std::size_t q = 0; q < means.size(); ++q) {
    const auto f = static_cast<std::size_t>(instrument.questions[q].factor);
    const auto d = static_cast<std::size_t>(instrument.questions[q].dimension);
    a.factor_means[f] += means[q];
    ++fc[f];
    a.dimension_means[d] += means[q];
    ++dc[d];
  }
  for (std::size_t f = 0; f < kFactorCount; ++f) {
    a.factor_present[f] = fc[f] > 0;
    if (fc[f] > 0) a.factor_means[f] /= static_cast<double>(fc[f]);
  }
  for (std::size_t d = 0; d < 3; ++d) {
    a.dimension_present[d] = dc[d] > 0;
    if (dc[d] > 0) a.dimension_means[d] /= static_cast<double>(dc[d]);
  }
  return a;
}

ojson to_json(const ScoreReport& r) {
  ojson j;
  j["respondents"] = r.respondents;
  j["sd"] = r.sd_kind == SdKind::Population ? "population" : "sample";
  ojson qs = ojson::array();
  for (const auto& q : r.questions)
    qs.push_back({{"id", q.id}, {"factor", to_string(q.factor)}, {"n", q.stats.n}, {"mean", q.stats.mean}, {"sd", q.stats.sd}});
  j["questions"] = std::move(qs);
  j["unanswered_questions"] = r.unanswered;
  ojson missing = ojson::array();
  for (const auto& m : r.missing) missing.push_back({{"row", m.row}, {"question", m.question}});
  j["missing_cells"] = std::move(missing);
  ojson fs = ojson::array();
  for (const auto& f : r.factors)
    fs.push_back({{"factor", to_string(f.factor)},
                  {"dimension", to_string(dimension_of(f.factor))},
                  {"questions", f.questions},
                  {"n", f.stats.n},
                  {"mean", f.stats.mean},
                  {"sd", f.stats.sd}});
  j["factors"] = std::move(fs);
  ojson dims = ojson::object();
  for (std::size_t d = 0; d < 3; ++d)
    dims[std::string(to_string(static_cast<Dimension>(d)))] =
        r.dimension_present[d] ? ojson(r.dimension_means[d]) : ojson(nullptr);
  j["dimension_means"] = std::move(dims);
  j["weights"] = {{"a_px", r.weights.player_experience}, {"a_us", r.weights.usability}};
  j["formula"] = kQualityFormula;
  j["quality_score"] = r.quality_score;
  j["classification"] = to_string(r.classification);
  j["thresholds"] = {{"excellent_above", kExcellentAbove}, {"poor_below", kPoorBelow}};
  return j;
}

}  // namespace coopvax::survey
