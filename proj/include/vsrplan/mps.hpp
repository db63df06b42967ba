#pragma once

#include <string>
#include <vector>

#include "vsrplan/lp.hpp"

namespace vsr {

// Free-format MPS with INTORG/INTEND markers for binaries. Emission is
// deterministic: one coefficient per line, objective first, rows in model
// order, shortest round-trip number formatting. Reading the output back and
// writing it again reproduces the bytes exactly.
std::string mps_string(const LinearProgram& lp,
                       const std::string& model_name = "MODEL");
void write_mps(const LinearProgram& lp, const std::string& path,
               const std::string& model_name = "MODEL");

LinearProgram parse_mps_string(const std::string& text);
LinearProgram read_mps(const std::string& path);

// External solver result: `# objective <v>` and `# status <s>` headers plus
// one `<variable> <value>` line per nonzero. Unlisted variables are zero.
struct ImportedSolution {
  SolveStatus status = SolveStatus::Optimal;
  double objective = 0.0;
  std::vector<double> primal;
};

ImportedSolution parse_solution_string(const std::string& text,
                                       const LinearProgram& lp);
ImportedSolution read_solution(const std::string& path,
                               const LinearProgram& lp);

}  // namespace vsr
