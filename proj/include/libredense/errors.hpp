#pragma once

#include <stdexcept>
#include <string>

namespace libredense {

  // Base of every error thrown by the library. Callers that only care about
  // "something went wrong" catch this; the subclasses name the failure.
  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  class InvalidArgument : public Error {
   public:
    using Error::Error;
  };

  class RankMismatch : public Error {
   public:
    using Error::Error;
  };

  class IndexOutOfRange : public Error {
   public:
    using Error::Error;
  };

  class DegreeMismatch : public Error {
   public:
    using Error::Error;
  };

  class ParseError : public Error {
   public:
    using Error::Error;
  };

  // A bounded search ran out of candidates before finding what it needed.
  class SearchExhausted : public Error {
   public:
    using Error::Error;
  };

  class SearchTimeout : public Error {
   public:
    using Error::Error;
  };

  // The degree profile has no coordinate left that can host the next planted
  // witness; carries the text form of the word that could not be planted.
  class ProfileExhausted : public Error {
   public:
    ProfileExhausted(std::string const& word, std::string const& detail)
        : Error("profile exhausted: cannot plant word " + word + " (" + detail
                + ")"),
          word_(word) {}

    std::string const& word() const noexcept {
      return word_;
    }

   private:
    std::string word_;
  };

  class NotFreeBasis : public Error {
   public:
    using Error::Error;
  };

  class EmptyNeighborhood : public Error {
   public:
    using Error::Error;
  };

  class IoError : public Error {
   public:
    using Error::Error;
  };

}  // namespace libredense
