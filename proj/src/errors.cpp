#include "spikedeig/errors.hpp"

namespace spikedeig {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateSVD: return "DegenerateSVD";
    case Errc::DegenerateAlignment: return "DegenerateAlignment";
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::NotSeparated: return "NotSeparated";
    case Errc::NoRoot: return "NoRoot";
    case Errc::TiedEigenvalues: return "TiedEigenvalues";
    case Errc::SpikeAtOne: return "SpikeAtOne";
    case Errc::InsideBulk: return "InsideBulk";
    case Errc::InsideSpectrum: return "InsideSpectrum";
    case Errc::TooLarge: return "TooLarge";
    case Errc::SeriesDiverges: return "SeriesDiverges";
    case Errc::InvalidDims: return "InvalidDims";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::Empty: return "Empty";
    case Errc::Io: return "IO";
  }
  return "Unknown";
}

bool is_numeric_precondition(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSpec:
    case Errc::ConfigInvalid:
    case Errc::IndexOutOfRange:
    case Errc::InvalidDims:
    case Errc::Io:
      return false;
    default:
      return true;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace spikedeig
