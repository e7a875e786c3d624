#include "coopvax/survey/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace coopvax::survey {

namespace {

constexpr int kMinResponse = 1;
constexpr int kMaxResponse = 5;

// RFC 4180 records: quoted fields may hold commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw SurveyError(SurveyErrc::MalformedCsv, "stray quote on line " + std::to_string(line));
        quoted = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        records.push_back(std::move(record));
        record.clear();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw SurveyError(SurveyErrc::MalformedCsv, "unterminated quoted field");
  if (field_started || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  // Blank lines carry no data.
  std::erase_if(records, [](const auto& r) { return r.size() == 1 && r[0].empty(); });
  return records;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

SurveyDataset empty_for(const Instrument& instrument) {
  SurveyDataset ds;
  for (const auto& q : instrument.questions) ds.question_ids.push_back(q.id);
  return ds;
}

}  // namespace

SurveyDataset parse_csv(std::string_view text, const Instrument& instrument) {
  const auto records = split_records(text);
  if (records.empty()) throw SurveyError(SurveyErrc::EmptyDataset, "CSV has no header row");

  // column -> question index (or none for demographics)
  std::vector<std::optional<std::size_t>> column_question;
  std::set<std::string> seen;
  const auto& header = records.front();
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (!seen.insert(name).second)
      throw SurveyError(SurveyErrc::MalformedCsv, "duplicate column '" + name + "'", 0, c + 1);
    if (const auto q = instrument.index_of(name)) {
      column_question.push_back(*q);
    } else if (std::find(instrument.demographics.begin(), instrument.demographics.end(), name) !=
               instrument.demographics.end()) {
      column_question.push_back(std::nullopt);
    } else {
      throw SurveyError(SurveyErrc::UnknownColumn, "column '" + name + "' is not in the instrument", 0, c + 1);
    }
  }

  auto ds = empty_for(instrument);
  ds.csv_columns = header.size();
  ds.ignored_columns = static_cast<std::size_t>(std::count(column_question.begin(), column_question.end(), std::nullopt));
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw SurveyError(SurveyErrc::MalformedCsv,
                        "row " + std::to_string(r) + " has " + std::to_string(rec.size()) + " fields, expected " +
                            std::to_string(header.size()),
                        r);
    std::vector<std::optional<int>> row(instrument.questions.size());
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (!column_question[c]) continue;
      const auto cell = trim(rec[c]);
      if (cell.empty()) continue;
      int value = 0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || end != cell.data() + cell.size() || value < kMinResponse || value > kMaxResponse)
        throw SurveyError(SurveyErrc::OutOfRangeResponse,
                          "response '" + cell + "' at row " + std::to_string(r) + ", column " + std::to_string(c + 1) +
                              " is not an integer 1..5",
                          r, c + 1);
      row[*column_question[c]] = value;
    }
    ds.responses.push_back(std::move(row));
  }
  if (ds.responses.empty()) throw SurveyError(SurveyErrc::EmptyDataset, "CSV has no data rows");
  for (std::size_t r = 0; r < ds.responses.size(); ++r)
    for (std::size_t q = 0; q < ds.questions(); ++q)
      if (!ds.responses[r][q]) ds.missing.push_back({r + 1, ds.question_ids[q]});
  return ds;
}

SurveyDataset load_dataset(const std::filesystem::path& csv, const Instrument& instrument) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw SurveyError(SurveyErrc::Io, "cannot open " + csv.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), instrument);
}

SurveyDataset make_dataset(const Instrument& instrument, std::vector<std::vector<std::optional<int>>> rows) {
  if (rows.empty()) throw SurveyError(SurveyErrc::EmptyDataset, "no respondents");
  auto ds = empty_for(instrument);
  ds.csv_columns = instrument.questions.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != instrument.questions.size())
      throw SurveyError(SurveyErrc::MalformedCsv, "row " + std::to_string(r + 1) + " has the wrong width", r + 1);
    for (std::size_t q = 0; q < rows[r].size(); ++q) {
      const auto& v = rows[r][q];
      if (!v) {
        ds.missing.push_back({r + 1, ds.question_ids[q]});
      } else if (*v < kMinResponse || *v > kMaxResponse) {
        throw SurveyError(SurveyErrc::OutOfRangeResponse,
                          "response " + std::to_string(*v) + " at row " + std::to_string(r + 1) + ", column " +
                              std::to_string(q + 1) + " is not an integer 1..5",
                          r + 1, q + 1);
      }
    }
  }
  ds.responses = std::move(rows);
  return ds;
}

}  // namespace coopvax::survey
