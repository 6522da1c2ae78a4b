#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cowest {

// Every failure raised by the library carries one of these codes. The CLI maps
// them onto process exit codes.
enum class ErrorCode {
  malformed_record,
  duplicate_id,
  constraint_violation,
  io_failure,
  invalid_request,
  backend_unavailable,
  fixture_miss,
  budget_exceeded,
  cache_corrupt,
  batch_aborted,
  template_error,
  precondition_violation,
  judge_parse_error,
  length_mismatch,
  unknown_label,
  divergence_detected,
  config_error,
  missing_file,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line_no, const std::string& detail);
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id);
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class ConstraintViolation : public Error {
 public:
  ConstraintViolation(std::string id, std::string reason);
  const std::string& id() const noexcept { return id_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string id_;
  std::string reason_;
};

class IoFailure : public Error {
 public:
  IoFailure(std::string path, const std::string& detail);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class InvalidRequest : public Error {
 public:
  explicit InvalidRequest(const std::string& detail)
      : Error(ErrorCode::invalid_request, "invalid request: " + detail) {}
};

class BackendUnavailable : public Error {
 public:
  explicit BackendUnavailable(const std::string& detail)
      : Error(ErrorCode::backend_unavailable, "backend unavailable: " + detail) {}
};

class FixtureMiss : public Error {
 public:
  explicit FixtureMiss(std::string digest);
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(std::size_t limit);
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

class CacheCorrupt : public Error {
 public:
  CacheCorrupt(std::string digest, const std::string& detail);
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

class BatchAborted : public Error {
 public:
  explicit BatchAborted(const std::string& detail)
      : Error(ErrorCode::batch_aborted, "batch aborted: " + detail) {}
};

class TemplateError : public Error {
 public:
  explicit TemplateError(const std::string& detail)
      : Error(ErrorCode::template_error, "template error: " + detail) {}
};

class PreconditionViolation : public Error {
 public:
  explicit PreconditionViolation(const std::string& detail)
      : Error(ErrorCode::precondition_violation, "precondition violated: " + detail) {}
};

enum class JudgeParseFailure { missing_field, out_of_range };

class JudgeParseError : public Error {
 public:
  JudgeParseError(JudgeParseFailure reason, const std::string& detail);
  JudgeParseFailure reason() const noexcept { return reason_; }

 private:
  JudgeParseFailure reason_;
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t left, std::size_t right);
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(std::string label);
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class DivergenceDetected : public Error {
 public:
  DivergenceDetected(std::size_t step, double loss);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& detail);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class MissingFile : public Error {
 public:
  MissingFile(std::string path, const std::string& detail);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace cowest
