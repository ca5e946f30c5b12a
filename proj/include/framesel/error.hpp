#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace framesel {

enum class ErrorKind {
  Format,
  Io,
  Alignment,
  DegenerateEmbedding,
  Parameter,
  EmptyPool,
  DegenerateSpacing,
  Index,
  Duplicate,
  Budget,
  InstanceTooLarge,
  MissingClass,
  DegenerateData,
  IncompleteTable,
  RoutingGap,
  Verification,
};

// Process exit code for an error kind: 1 verification, 2 format/io,
// 3 alignment, 4 parameter, 5 routing.
int exit_code(ErrorKind kind) noexcept;
std::string_view kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace framesel
