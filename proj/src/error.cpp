#include "tlslayer/error.hpp"

namespace tlslayer {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::UnreadableFile: return "UnreadableFile";
    case Errc::UnknownMagic: return "UnknownMagic";
    case Errc::UnknownLinkType: return "UnknownLinkType";
    case Errc::TruncatedFrame: return "TruncatedFrame";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::GapAtOffset: return "GapAtOffset";
    case Errc::BadRecordHeader: return "BadRecordHeader";
    case Errc::OversizeRecord: return "OversizeRecord";
    case Errc::MalformedHello: return "MalformedHello";
    case Errc::UnsupportedCipherSuite: return "UnsupportedCipherSuite";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::EmptyInnerPlaintext: return "EmptyInnerPlaintext";
    case Errc::FinishedNotFound: return "FinishedNotFound";
    case Errc::UnknownGroup: return "UnknownGroup";
    case Errc::NoRequestFound: return "NoRequestFound";
    case Errc::NoResponseFound: return "NoResponseFound";
    case Errc::InvalidTimeline: return "InvalidTimeline";
    case Errc::EmptySamples: return "EmptySamples";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::ZeroBaselineSD: return "ZeroBaselineSD";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::WriteFailure: return "WriteFailure";
    case Errc::InvalidDocument: return "InvalidDocument";
    case Errc::IncompatibleDocuments: return "IncompatibleDocuments";
    case Errc::CryptoBackend: return "CryptoBackend";
  }
  return "Unknown";
}

}  // namespace tlslayer
