#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reliance {

/// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data does not satisfy the corpus schema or one of its invariants.
///
/// `file` and `line` are filled for parse failures (line is 1-based, 0 when
/// not applicable); `record` names the offending record for invariant
/// violations.
class ValidationError : public Error {
public:
    ValidationError(std::string message, std::string file = {}, std::size_t line = 0,
                    std::string record = {})
        : Error(compose(message, file, line, record)),
          message_(std::move(message)),
          file_(std::move(file)),
          line_(line),
          record_(std::move(record)) {}

    const std::string& detail() const noexcept { return message_; }
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& record() const noexcept { return record_; }

private:
    static std::string compose(const std::string& message, const std::string& file,
                               std::size_t line, const std::string& record) {
        std::string out;
        if (!file.empty()) {
            out += file;
            if (line > 0) out += ":" + std::to_string(line);
            out += ": ";
        }
        out += message;
        if (!record.empty()) out += " [" + record + "]";
        return out;
    }

    std::string message_;
    std::string file_;
    std::size_t line_;
    std::string record_;
};

/// A statistical routine was called outside its domain (too few samples,
/// singular matrix, undefined statistic).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An external classifier endpoint could not be reached or failed.
class EndpointError : public Error {
public:
    using Error::Error;
};

}  // namespace reliance
