#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coopvax::survey {

enum class Dimension { Pedagogy, PlayerExperience, Usability };

// Pedagogy: ABC, LO. Player experience: FA, F, Ch, SI, C, R, S. Usability: L, O, A, Acc.
enum class Factor { ABC, LO, FA, F, Ch, SI, C, R, S, L, O, A, Acc };
inline constexpr std::size_t kFactorCount = 13;

Dimension dimension_of(Factor f);
std::string_view to_string(Factor f);
std::string_view to_string(Dimension d);
std::optional<Factor> factor_from_string(std::string_view s);
std::optional<Dimension> dimension_from_string(std::string_view s);

enum class SurveyErrc {
  Io,
  InvalidInstrument,
  MalformedCsv,
  UnknownColumn,
  OutOfRangeResponse,
  EmptyDataset,
  NoResponses,
  MissingDimension,
  InvalidWeights,
};
std::string_view to_string(SurveyErrc c);

class SurveyError : public std::runtime_error {
 public:
  SurveyError(SurveyErrc code, const std::string& what, std::optional<std::size_t> row = std::nullopt,
              std::optional<std::size_t> column = std::nullopt)
      : std::runtime_error(what), code_(code), row_(row), column_(column) {}
  SurveyErrc code() const noexcept { return code_; }
  // 1-based data row (the header is row 0) and 1-based column, when the error has a location.
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  SurveyErrc code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

struct Question {
  std::string id;
  std::string text;
  Factor factor = Factor::ABC;
  Dimension dimension = Dimension::Pedagogy;
  bool operator==(const Question&) const = default;
};

struct Instrument {
  std::string name;
  std::vector<Question> questions;
  std::vector<std::string> demographics;  // CSV columns that are accepted and ignored

  std::optional<std::size_t> index_of(std::string_view id) const;
};

// {"name", "demographics": [...], "questions": [{"id","text","factor","dimension"}]}.
// A question's dimension must match its factor.
Instrument parse_instrument(std::string_view json_text);
Instrument load_instrument(const std::filesystem::path& path);
std::filesystem::path default_instrument_path();

}  // namespace coopvax::survey
