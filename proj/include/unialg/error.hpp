#ifndef UNIALG_ERROR_HPP_
#define UNIALG_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>

namespace unialg {

  // Base class for every exception thrown by the library.
  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  class ParseError : public Error {
   public:
    ParseError(std::size_t line, std::string const& msg)
        : Error("line " + std::to_string(line) + ": " + msg),
          _line(line),
          _message(msg) {}

    std::size_t line() const noexcept {
      return _line;
    }
    // The message without the line prefix.
    std::string const& message() const noexcept {
      return _message;
    }

   private:
    std::size_t _line;
    std::string _message;
  };

  // A size cap was hit. This is a verdict, not a failure, so it travels as a
  // value (see Capped) rather than as an exception.
  struct CapExceeded {
    std::string what;
    std::size_t lower_bound = 0;
  };

  template <typename T>
  using Capped = std::variant<T, CapExceeded>;

  template <typename T>
  bool exceeded(Capped<T> const& c) {
    return std::holds_alternative<CapExceeded>(c);
  }

}  // namespace unialg

#endif  // UNIALG_ERROR_HPP_
