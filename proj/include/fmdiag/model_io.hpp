#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fmdiag/pipeline.hpp"

namespace fmdiag {

// JSON model document; see docs/formats.md for the schema.
std::string model_to_json(const DiagnosisModel& model);
DiagnosisModel model_from_json(const std::string& text);

void save_model(const DiagnosisModel& model, std::ostream& out);
void save_model(const DiagnosisModel& model, const std::filesystem::path& path);
DiagnosisModel load_model(std::istream& in);
DiagnosisModel load_model(const std::filesystem::path& path);

}  // namespace fmdiag
