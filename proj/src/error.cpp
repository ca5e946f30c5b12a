#include "framesel/error.hpp"

namespace framesel {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Verification:
      return 1;
    case ErrorKind::Format:
    case ErrorKind::Io:
    case ErrorKind::DegenerateEmbedding:
    case ErrorKind::MissingClass:
    case ErrorKind::DegenerateData:
    case ErrorKind::IncompleteTable:
      return 2;
    case ErrorKind::Alignment:
      return 3;
    case ErrorKind::Parameter:
    case ErrorKind::EmptyPool:
    case ErrorKind::DegenerateSpacing:
    case ErrorKind::Index:
    case ErrorKind::Duplicate:
    case ErrorKind::Budget:
    case ErrorKind::InstanceTooLarge:
      return 4;
    case ErrorKind::RoutingGap:
      return 5;
  }
  return 1;
}

std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Io: return "io";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::DegenerateEmbedding: return "degenerate-embedding";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::EmptyPool: return "empty-pool";
    case ErrorKind::DegenerateSpacing: return "degenerate-spacing";
    case ErrorKind::Index: return "index";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::InstanceTooLarge: return "instance-too-large";
    case ErrorKind::MissingClass: return "missing-class";
    case ErrorKind::DegenerateData: return "degenerate-data";
    case ErrorKind::IncompleteTable: return "incomplete-table";
    case ErrorKind::RoutingGap: return "routing-gap";
    case ErrorKind::Verification: return "verification";
  }
  return "unknown";
}

}  // namespace framesel
