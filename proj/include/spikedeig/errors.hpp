#pragma once

#include <stdexcept>
#include <string>

namespace spikedeig {

enum class Errc {
  InvalidSpec,
  IndexOutOfRange,
  NotSymmetric,
  NoConvergence,
  DegenerateSVD,
  DegenerateAlignment,
  NotInvertible,
  NotSeparated,
  NoRoot,
  TiedEigenvalues,
  SpikeAtOne,
  InsideBulk,
  InsideSpectrum,
  TooLarge,
  SeriesDiverges,
  InvalidDims,
  ConfigInvalid,
  Empty,
  Io,
};

const char* errc_name(Errc code) noexcept;

// True for the errors that signal a violated numeric precondition
// (as opposed to bad input files or configuration).
bool is_numeric_precondition(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace spikedeig
