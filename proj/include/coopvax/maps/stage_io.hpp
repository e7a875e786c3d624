#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coopvax/sim/types.hpp"

namespace coopvax::maps {

enum class MapErrc { Io, ParseError, ValidationError, NonMonotoneCampaign, DuplicateStageIndex, EmptyCampaign };

struct FieldIssue {
  std::string field;    // e.g. "pickups[3]"
  std::string message;  // e.g. "cell (4,5) is a wall"
};

class MapError : public std::runtime_error {
 public:
  MapError(MapErrc code, std::string what, std::vector<FieldIssue> issues = {});
  MapErrc code() const noexcept { return code_; }
  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  MapErrc code_;
  std::vector<FieldIssue> issues_;
};

sim::StageSpec parse_stage(std::string_view text, const std::string& origin = "<memory>");
sim::StageSpec load_stage(const std::filesystem::path& path);

// Canonical stage document; parse_stage(stage_to_json(s)) == s for valid s.
std::string stage_to_json(const sim::StageSpec& stage);

// Empty when the stage is valid.
std::vector<FieldIssue> validate_stage(const sim::StageSpec& stage);

// Reads every stage_<n>.json in `dir`, ordered by stage_index.
sim::Campaign load_campaign(const std::filesystem::path& dir);

// Throws DuplicateStageIndex / NonMonotoneCampaign. Expects stages sorted by index.
void validate_campaign(const sim::Campaign& stages);

// $COOPVAX_STAGES when set, otherwise the stages/ directory shipped with the sources.
std::filesystem::path default_stages_dir();

}  // namespace coopvax::maps
