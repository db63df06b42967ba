#pragma once

#include <string>
#include <vector>

#include "vsrplan/common.hpp"
#include "vsrplan/config.hpp"
#include "vsrplan/network.hpp"

namespace vsr {

// Case matrices exactly as read, MW and per-table conventions untouched.
struct RawCase {
  std::string case_name;
  double base_mva = 100.0;
  std::vector<std::vector<double>> bus_rows;
  std::vector<std::vector<double>> gen_rows;
  std::vector<std::vector<double>> branch_rows;
  std::vector<std::vector<double>> gencost_rows;
};

// Parses the MATLAB-style case text. Comments, blank lines, continuations,
// and unrelated assignments are tolerated. Throws MalformedMatrix on ragged
// rows, MissingSection when baseMVA/bus/gen/branch is absent, NumericParse on
// a bad token; all with the 1-based source line.
RawCase parse_case(const std::string& text);
RawCase read_case(const std::string& path);

// Serializes in the same format parse_case reads; numbers round-trip exactly.
std::string write_case(const RawCase& raw);

// Converts to per-unit on base_mva, drops out-of-service rows, computes
// susceptances, identifies the reference bus, and runs full validation.
// Keys consumed: network.*, gen.*, penalty.adjust_up_frac/adjust_dn_frac.
Network build_network(const RawCase& raw, const Config& cfg,
                      Warnings* warnings = nullptr);

}  // namespace vsr
