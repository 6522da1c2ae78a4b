#include "cowest/core/errors.hpp"

namespace cowest {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed_record: return "MalformedRecord";
    case ErrorCode::duplicate_id: return "DuplicateId";
    case ErrorCode::constraint_violation: return "ConstraintViolation";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::invalid_request: return "InvalidRequest";
    case ErrorCode::backend_unavailable: return "BackendUnavailable";
    case ErrorCode::fixture_miss: return "FixtureMiss";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::cache_corrupt: return "CacheCorrupt";
    case ErrorCode::batch_aborted: return "BatchAborted";
    case ErrorCode::template_error: return "TemplateError";
    case ErrorCode::precondition_violation: return "PreconditionViolation";
    case ErrorCode::judge_parse_error: return "JudgeParseError";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::unknown_label: return "UnknownLabel";
    case ErrorCode::divergence_detected: return "DivergenceDetected";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::missing_file: return "MissingFile";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

MalformedRecord::MalformedRecord(std::size_t line_no, const std::string& detail)
    : Error(ErrorCode::malformed_record,
            "malformed record at line " + std::to_string(line_no) + ": " + detail),
      line_no_(line_no) {}

DuplicateId::DuplicateId(std::string id)
    : Error(ErrorCode::duplicate_id, "duplicate id: " + id), id_(std::move(id)) {}

ConstraintViolation::ConstraintViolation(std::string id, std::string reason)
    : Error(ErrorCode::constraint_violation, "record " + id + ": " + reason),
      id_(std::move(id)),
      reason_(std::move(reason)) {}

IoFailure::IoFailure(std::string path, const std::string& detail)
    : Error(ErrorCode::io_failure, "i/o failure on " + path + ": " + detail),
      path_(std::move(path)) {}

FixtureMiss::FixtureMiss(std::string digest)
    : Error(ErrorCode::fixture_miss, "no fixture entry for request " + digest),
      digest_(std::move(digest)) {}

BudgetExceeded::BudgetExceeded(std::size_t limit)
    : Error(ErrorCode::budget_exceeded,
            "request budget of " + std::to_string(limit) + " exhausted"),
      limit_(limit) {}

CacheCorrupt::CacheCorrupt(std::string digest, const std::string& detail)
    : Error(ErrorCode::cache_corrupt, "cache entry " + digest + " corrupt: " + detail),
      digest_(std::move(digest)) {}

JudgeParseError::JudgeParseError(JudgeParseFailure reason, const std::string& detail)
    : Error(ErrorCode::judge_parse_error,
            std::string(reason == JudgeParseFailure::missing_field ? "missing_field"
                                                                    : "out_of_range") +
                ": " + detail),
      reason_(reason) {}

LengthMismatch::LengthMismatch(std::size_t left, std::size_t right)
    : Error(ErrorCode::length_mismatch,
            "length mismatch: " + std::to_string(left) + " vs " + std::to_string(right)) {}

UnknownLabel::UnknownLabel(std::string label)
    : Error(ErrorCode::unknown_label, "unknown label: " + label), label_(std::move(label)) {}

DivergenceDetected::DivergenceDetected(std::size_t step, double loss)
    : Error(ErrorCode::divergence_detected,
            "loss increased for 10 consecutive steps ending at step " +
                std::to_string(step) + " (loss " + std::to_string(loss) + ")"),
      step_(step) {}

ConfigError::ConfigError(std::string field, const std::string& detail)
    : Error(ErrorCode::config_error, field + ": " + detail), field_(std::move(field)) {}

MissingFile::MissingFile(std::string path, const std::string& detail)
    : Error(ErrorCode::missing_file, path + ": " + detail), path_(std::move(path)) {}

}  // namespace cowest
