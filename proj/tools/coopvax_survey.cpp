#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "coopvax/survey/dataset.hpp"
#include "coopvax/survey/instrument.hpp"
#include "coopvax/survey/scoring.hpp"

int main(int argc, char** argv) {
  using namespace coopvax::survey;
  CLI::App app{"coopvax-survey: scores likert questionnaire responses"};
  app.require_subcommand(1);
  auto* cmd = app.add_subcommand("score", "compute question, factor and dimension statistics and the quality score");

  std::string csv;
  std::string instrument_path;
  double alpha_px = 1.0;
  double alpha_us = 1.0;
  bool sample_sd = false;
  std::string out;
  cmd->add_option("--csv", csv, "responses, one row per respondent, header row of question ids")->required();
  cmd->add_option("--instrument", instrument_path, "instrument JSON (default: bundled questionnaire)");
  cmd->add_option("--alpha-px", alpha_px, "player experience weight")->capture_default_str();
  cmd->add_option("--alpha-us", alpha_us, "usability weight")->capture_default_str();
  cmd->add_flag("--sample-sd", sample_sd, "divide by n-1 instead of n");
  cmd->add_option("--out", out, "report file (default: stdout)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto instrument = load_instrument(instrument_path.empty() ? default_instrument_path() : std::filesystem::path(instrument_path));
    const auto data = load_dataset(csv, instrument);
    const auto report = score(data, instrument, {alpha_px, alpha_us}, sample_sd ? SdKind::Sample : SdKind::Population);
    const auto text = to_json(report).dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out);
      if (!f) throw std::runtime_error("cannot write " + out);
      f << text;
    }
  } catch (const SurveyError& e) {
    std::cerr << "coopvax-survey: " << to_string(e.code()) << ": " << e.what() << '\n';
    return EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "coopvax-survey: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
