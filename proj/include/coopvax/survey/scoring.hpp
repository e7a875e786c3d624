#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coopvax/survey/dataset.hpp"
#include "coopvax/survey/instrument.hpp"

namespace coopvax::survey {

enum class SdKind { Population, Sample };

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

// Sample SD of a single value is reported as 0.
Stats describe(std::span<const double> values, SdKind kind = SdKind::Population);

Stats question_stats(const SurveyDataset& data, std::size_t question, SdKind kind = SdKind::Population);

struct Weights {
  double player_experience = 1.0;
  double usability = 1.0;
};

inline constexpr double kExcellentAbove = 65.0;
inline constexpr double kPoorBelow = 42.5;

enum class Classification { Poor, Regular, Excellent };
std::string_view to_string(Classification c);
Classification classify(double quality_score);

inline constexpr std::string_view kQualityFormula =
    "quality_score = 100 * (a_px * (m_px - 1) / 4 + a_us * (m_us - 1) / 4) / (a_px + a_us)";

// Weighted mean of the two 1..5 dimension means rescaled to 0..100, snapped
// to a 1e-9 grid so scores meant to land on a threshold do.
double quality_score(double player_experience_mean, double usability_mean, Weights w);

struct QuestionReport {
  std::string id;
  Factor factor;
  Stats stats;
};

struct FactorReport {
  Factor factor;
  Stats stats;  // pooled over every answered cell of the factor's questions
  std::size_t questions = 0;
};

struct ScoreReport {
  std::size_t respondents = 0;
  std::vector<QuestionReport> questions;  // answered questions only, instrument order
  std::vector<std::string> unanswered;
  std::vector<MissingCell> missing;
  std::vector<FactorReport> factors;       // factors with at least one answered question
  std::array<double, 3> dimension_means{};  // indexed by Dimension; mean of question means
  std::array<bool, 3> dimension_present{};
  double quality_score = 0.0;
  Classification classification = Classification::Regular;
  Weights weights;
  SdKind sd_kind = SdKind::Population;
};

ScoreReport score(const SurveyDataset& data, const Instrument& instrument, Weights weights,
                  SdKind kind = SdKind::Population);

struct MeanAggregate {
  std::array<double, kFactorCount> factor_means{};  // mean of the factor's question means
  std::array<bool, kFactorCount> factor_present{};
  std::array<double, 3> dimension_means{};
  std::array<bool, 3> dimension_present{};
};

// Factor and dimension aggregation from per-question means alone (one value
// per instrument question). Agrees with score() on the same means.
MeanAggregate aggregate_from_question_means(const Instrument& instrument, std::span<const double> means);

nlohmann::ordered_json to_json(const ScoreReport& r);

}  // namespace coopvax::survey
