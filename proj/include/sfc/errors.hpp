#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfc {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column "
                + std::to_string(column) + ")"),
          line_(line), column_(column)
    {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Raised when a referenced id does not resolve; id() names the dangling id.
class IntegrityError : public Error
{
public:
    IntegrityError(const std::string& what, std::string id)
        : Error(what), id_(std::move(id))
    {}

    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class DuplicateIdError : public IntegrityError
{
public:
    using IntegrityError::IntegrityError;
};

class ValidationError : public Error
{
public:
    using Error::Error;
};

class UnknownChainError : public Error
{
public:
    explicit UnknownChainError(unsigned sfc_id)
        : Error("unknown-sfc-id: " + std::to_string(sfc_id)), sfc_id_(sfc_id)
    {}

    unsigned sfc_id() const { return sfc_id_; }

private:
    unsigned sfc_id_;
};

class UnavailableSfError : public IntegrityError
{
public:
    explicit UnavailableSfError(std::string sf_id)
        : IntegrityError("unavailable-sf: " + sf_id, sf_id)
    {}
};

class NoRouteError : public Error
{
public:
    using Error::Error;
};

class SimulationError : public Error
{
public:
    using Error::Error;
};

class IntentError : public Error
{
public:
    using Error::Error;
};

class MissingKeyError : public IntentError
{
public:
    explicit MissingKeyError(std::string key)
        : IntentError("missing key: " + key), key_(std::move(key))
    {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class MalformedValueError : public IntentError
{
public:
    MalformedValueError(const std::string& what, std::size_t line)
        : IntentError(what + " (line " + std::to_string(line) + ")"), line_(line)
    {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class NoMatchingBlueprintError : public IntentError
{
public:
    using IntentError::IntentError;
};

class NoInstanceForRoleError : public IntentError
{
public:
    explicit NoInstanceForRoleError(std::string role)
        : IntentError("no-instance-for-role: " + role), role_(std::move(role))
    {}

    const std::string& role() const { return role_; }

private:
    std::string role_;
};

class ConsistencyError : public IntentError
{
public:
    using IntentError::IntentError;
};

} // namespace sfc
