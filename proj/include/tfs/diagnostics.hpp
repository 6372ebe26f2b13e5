// tfs/diagnostics.hpp - source locations and error types
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tfs
{

/// Half-open byte range [begin, end) into an input buffer, plus the 1-based
/// line and column of its start.
struct SourceSpan
{
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in a signature file or an AVM description.
class ParseError : public Error
{
public:
  ParseError(const std::string& msg, SourceSpan span)
      : Error(msg + " (line " + std::to_string(span.line) + ", column " +
              std::to_string(span.column) + ")"),
        span_(span)
  {
  }

  [[nodiscard]] const SourceSpan& span() const { return span_; }

private:
  SourceSpan span_;
};

/// Signature that parses but violates a well-formedness rule.
class SignatureError : public Error
{
public:
  using Error::Error;
};

/// A brute-force enumeration would exceed its configured bound.
class BoundError : public Error
{
public:
  using Error::Error;
};

} // namespace tfs
