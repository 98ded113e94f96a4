#pragma once

#include <stdexcept>
#include <string>

namespace pansharp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Image dimensions or channel counts do not agree with what an operation needs.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape error: " + message) {}
};

/// A parameter is outside its documented domain (even window, zero factor, ...).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& message) : Error("invalid argument: " + message) {}
};

/// Serialized input (FBANK1, RAWTEN, PNG) is malformed.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format error: " + message) {}
};

/// A quantity is mathematically undefined for the given input (zero band mean, flat high-pass, ...).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error("numeric error: " + message) {}
};

} // namespace pansharp
