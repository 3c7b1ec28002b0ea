#include "evomarket/error.hpp"

namespace evomarket {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::Monopoly: return "monopoly market";
    case ErrorKind::DegenerateMarket: return "degenerate market";
    case ErrorKind::StepSize: return "step size violation";
    case ErrorKind::ClampedRegion: return "clamped demand region";
    case ErrorKind::DegenerateDistribution: return "degenerate distribution";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::PreconditionViolated: return "precondition violated";
    case ErrorKind::ScenarioFormat: return "scenario format";
    case ErrorKind::Io: return "i/o";
  }
  return "unknown";
}

}  // namespace evomarket
