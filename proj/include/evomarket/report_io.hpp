#pragma once

// JSON serialization of fit and ensemble reports.

#include <filesystem>
#include <string>

#include "evomarket/ensemble.hpp"
#include "evomarket/estimators.hpp"

namespace evomarket {

/// Non-finite numbers are written as null.
std::string fit_report_json(const FitReport& report);
std::string ensemble_report_json(const EnsembleReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace evomarket
