#pragma once

#include <complex>
#include <ostream>
#include <string>

namespace holoquad::io {

enum ExitCode { kOk = 0, kConfig = 1, kDomain = 2, kNumerical = 3 };

// accepts "x", "x+yi", "x-yi", "yi" or "x,y"
std::complex<double> parse_complex(const std::string& text);

// entry point of the holoquad tool; never throws
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace holoquad::io
