#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentlab {

/// Root of every error the library throws. `kind()` is a stable short tag
/// used by the CLI for exit-code mapping and by tests.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class CalendarError : public Error {
public:
    explicit CalendarError(const std::string& what) : Error("calendar", what) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& what) : Error("alignment", what) {}
};

class SizingError : public Error {
public:
    explicit SizingError(const std::string& what) : Error("sizing", what) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& what) : Error("training", what) {}
};

class CorruptionError : public Error {
public:
    explicit CorruptionError(const std::string& what) : Error("corruption", what) {}
};

class UnsupportedVersionError : public Error {
public:
    explicit UnsupportedVersionError(int version)
        : Error("unsupported_version", "unsupported version " + std::to_string(version)) {}
};

class MissingPrerequisiteError : public Error {
public:
    explicit MissingPrerequisiteError(const std::string& path)
        : Error("missing_prerequisite", "missing prerequisite: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace sentlab
