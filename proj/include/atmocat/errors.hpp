#pragma once

#include <stdexcept>
#include <string>

namespace atmocat {

struct MalformedUrl : std::runtime_error {
  explicit MalformedUrl(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedXml : std::runtime_error {
  explicit MalformedXml(const std::string& what) : std::runtime_error(what) {}
};

struct NotCapabilities : std::runtime_error {
  explicit NotCapabilities(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedVersion : std::runtime_error {
  explicit UnsupportedVersion(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyVocabulary : std::runtime_error {
  explicit EmptyVocabulary(const std::string& what) : std::runtime_error(what) {}
};

struct StorageFailure : std::runtime_error {
  explicit StorageFailure(const std::string& what) : std::runtime_error(what) {}
};

struct DuplicateUser : std::runtime_error {
  explicit DuplicateUser(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidEmail : std::runtime_error {
  explicit InvalidEmail(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownUser : std::runtime_error {
  explicit UnknownUser(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownWorkspace : std::runtime_error {
  explicit UnknownWorkspace(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownLayer : std::runtime_error {
  explicit UnknownLayer(const std::string& what) : std::runtime_error(what) {}
};

struct DisplayOrderConflict : std::runtime_error {
  explicit DisplayOrderConflict(const std::string& what) : std::runtime_error(what) {}
};

struct LinkNotFound : std::runtime_error {
  explicit LinkNotFound(const std::string& what) : std::runtime_error(what) {}
};

struct LayerInUse : std::runtime_error {
  explicit LayerInUse(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedDocument : std::runtime_error {
  explicit MalformedDocument(const std::string& what) : std::runtime_error(what) {}
};

// CQL parse failure, with a byte offset into the query text.
struct CqlSyntaxError : std::runtime_error {
  CqlSyntaxError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position(position) {}
  std::size_t position;
};

struct InvalidQuery : std::runtime_error {
  explicit InvalidQuery(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidWeights : std::runtime_error {
  explicit InvalidWeights(const std::string& what) : std::runtime_error(what) {}
};

struct NoSamples : std::runtime_error {
  explicit NoSamples(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidK : std::runtime_error {
  explicit InvalidK(const std::string& what) : std::runtime_error(what) {}
};

struct NoPlan : std::runtime_error {
  explicit NoPlan(const std::string& what) : std::runtime_error(what) {}
};

struct TaskNotRunning : std::runtime_error {
  explicit TaskNotRunning(const std::string& what) : std::runtime_error(what) {}
};

struct FetchFailed : std::runtime_error {
  explicit FetchFailed(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace atmocat
