#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlslayer {

enum class Errc {
  UnreadableFile,
  UnknownMagic,
  UnknownLinkType,
  TruncatedFrame,
  MalformedHeader,
  MalformedLine,
  GapAtOffset,
  BadRecordHeader,
  OversizeRecord,
  MalformedHello,
  UnsupportedCipherSuite,
  LengthMismatch,
  AuthFailure,
  EmptyInnerPlaintext,
  FinishedNotFound,
  UnknownGroup,
  NoRequestFound,
  NoResponseFound,
  InvalidTimeline,
  EmptySamples,
  ZeroBaseline,
  ZeroDenominator,
  ZeroBaselineSD,
  InvalidSpec,
  WriteFailure,
  InvalidDocument,
  IncompatibleDocuments,
  CryptoBackend,
};

std::string_view errc_name(Errc code) noexcept;

// All toolkit failures carry a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tlslayer
