#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace egv {

// Base for every failure raised by the library. Each subclass maps onto one
// failure kind a caller may want to branch on (the CLI turns them into exit
// codes).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("input is empty") {}
};

class NonZeroPad : public Error {
public:
    using Error::Error;
};

class BadHeader : public Error {
public:
    using Error::Error;
};

class CorruptPayload : public Error {
public:
    using Error::Error;
};

class BlockLengthMismatch : public Error {
public:
    using Error::Error;
};

class BadCipherPad : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class InvalidCell : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConnectionError : public Error {
public:
    using Error::Error;
};

class RejectedByReceiver : public Error {
public:
    using Error::Error;
};

} // namespace egv
