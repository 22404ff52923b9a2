#pragma once

#include <stdexcept>
#include <string>

namespace tsecon {

/// Base class for all engine errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Series too short for the requested operation.
class InsufficientData : public Error {
  public:
    using Error::Error;
};

/// Percent change undefined: nonpositive price encountered.
class InvalidPrice : public Error {
  public:
    using Error::Error;
};

/// Zero-variance (or otherwise degenerate) series where variation is required.
class DegenerateSeries : public Error {
  public:
    using Error::Error;
};

/// Two series that must share identical dates do not.
class AlignmentError : public Error {
  public:
    using Error::Error;
};

/// Moment or design matrix is singular to working precision.
class NumericalSingularity : public Error {
  public:
    using Error::Error;
};

/// Parameters outside the stationary/invertible region.
class ParameterDomainError : public Error {
  public:
    using Error::Error;
};

/// Every candidate model in an order search failed.
class SearchFailed : public Error {
  public:
    using Error::Error;
};

/// Input file lacks a required column.
class SchemaError : public Error {
  public:
    using Error::Error;
};

/// A cell could not be parsed. Carries the 1-based row number.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, std::size_t row)
        : Error(msg + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const { return row_; }

  private:
    std::size_t row_ = 0;
};

class UnsortedDates : public ParseError {
  public:
    using ParseError::ParseError;
};

class DuplicateDate : public ParseError {
  public:
    using ParseError::ParseError;
};

/// Inner join of two raw series produced no rows.
class NoOverlap : public Error {
  public:
    using Error::Error;
};

/// Regression design matrix is rank deficient.
class SingularDesign : public Error {
  public:
    using Error::Error;
};

/// Filesystem write failed.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace tsecon
