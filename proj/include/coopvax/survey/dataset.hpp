#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coopvax/survey/instrument.hpp"

namespace coopvax::survey {

struct MissingCell {
  std::size_t row = 0;  // 1-based data row
  std::string question;
  bool operator==(const MissingCell&) const = default;
};

// Respondents x questions, columns in instrument order. A question absent
// from the CSV header is missing for every respondent.
struct SurveyDataset {
  std::vector<std::string> question_ids;
  std::vector<std::vector<std::optional<int>>> responses;
  std::vector<MissingCell> missing;
  std::size_t csv_columns = 0;
  std::size_t ignored_columns = 0;  // demographics

  std::size_t respondents() const { return responses.size(); }
  std::size_t questions() const { return question_ids.size(); }
};

// Header row names the columns; each must be a question id or a demographics column.
// Empty cells are missing. Responses must be integers 1..5.
SurveyDataset parse_csv(std::string_view text, const Instrument& instrument);
SurveyDataset load_dataset(const std::filesystem::path& csv, const Instrument& instrument);

// A dataset from in-memory rows, validated like CSV input.
SurveyDataset make_dataset(const Instrument& instrument, std::vector<std::vector<std::optional<int>>> rows);

}  // namespace coopvax::survey
