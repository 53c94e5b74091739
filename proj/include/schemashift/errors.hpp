#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace schemashift {

// Root of every typed failure in the library. code() is the stable,
// machine-readable name used in skip records and CLI diagnostics.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "Error"; }
};

#define SCHEMASHIFT_ERROR(Name)                                            \
    class Name : public Error {                                            \
    public:                                                                \
        using Error::Error;                                                \
        const char* code() const noexcept override { return #Name; }       \
    }

// DDL that does not follow the accepted CREATE TABLE grammar.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t line, std::size_t offset)
        : Error(msg + " (line " + std::to_string(line) + ", offset " +
                std::to_string(offset) + ")"),
          line_(line),
          offset_(offset) {}
    const char* code() const noexcept override { return "SyntaxError"; }
    std::size_t line() const { return line_; }
    std::size_t offset() const { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

// Schema invariant broken (dangling FK, duplicate name, ...).
class IntegrityError : public Error {
public:
    IntegrityError(const std::string& msg, std::string identifier)
        : Error(msg), identifier_(std::move(identifier)) {}
    const char* code() const noexcept override { return "IntegrityError"; }
    const std::string& identifier() const { return identifier_; }

private:
    std::string identifier_;
};

class SqlSyntaxError : public Error {
public:
    SqlSyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    const char* code() const noexcept override { return "SqlSyntaxError"; }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnresolvedIdentifier : public Error {
public:
    explicit UnresolvedIdentifier(std::string name)
        : Error("unresolved identifier: " + name), name_(std::move(name)) {}
    const char* code() const noexcept override { return "UnresolvedIdentifier"; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class MalformedProposal : public Error {
public:
    MalformedProposal(const std::string& msg, std::string raw)
        : Error(msg), raw_(std::move(raw)) {}
    const char* code() const noexcept override { return "MalformedProposal"; }
    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::string file, std::size_t record)
        : Error(file + ":" + std::to_string(record) + ": " + msg),
          file_(std::move(file)),
          record_(record) {}
    const char* code() const noexcept override { return "FormatError"; }
    const std::string& file() const { return file_; }
    std::size_t record() const { return record_; }

private:
    std::string file_;
    std::size_t record_;
};

SCHEMASHIFT_ERROR(UnsupportedShape);
SCHEMASHIFT_ERROR(NeedsReview);
SCHEMASHIFT_ERROR(SynthesisExhausted);
SCHEMASHIFT_ERROR(NoEligibleColumns);
SCHEMASHIFT_ERROR(NoEligibleTables);
SCHEMASHIFT_ERROR(BackendUnavailable);
SCHEMASHIFT_ERROR(Timeout);
SCHEMASHIFT_ERROR(CyclicFkUnsatisfiable);
SCHEMASHIFT_ERROR(MigrationUnsupported);
SCHEMASHIFT_ERROR(ExecError);
SCHEMASHIFT_ERROR(InvalidArgument);

#undef SCHEMASHIFT_ERROR

}  // namespace schemashift
