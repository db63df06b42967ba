#include "vsrplan/mps.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "vsrplan/common.hpp"

namespace vsr {

namespace {

constexpr const char* kObjRow = "COST";

std::string fmt(double v) { return format_number(v); }

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    throw Error(ErrorCode::NumericParse, "bad number '" + tok + "'", line_no);
  return v;
}

}  // namespace

std::string mps_string(const LinearProgram& lp, const std::string& model_name) {
  lp.validate();
  std::ostringstream out;
  out << "NAME " << model_name << "\n";
  out << "ROWS\n";
  out << " N " << kObjRow << "\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    char s = 'E';
    if (lp.row(i).sense == RowSense::LE) s = 'L';
    if (lp.row(i).sense == RowSense::GE) s = 'G';
    out << " " << s << " " << lp.row_name(i) << "\n";
  }

  // Column-major entry lists, each in row order.
  std::vector<std::vector<std::pair<int, double>>> cols(lp.num_vars());
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto rc = lp.row_cols(i);
    const auto rv = lp.row_coefs(i);
    for (std::size_t t = 0; t < rc.size(); ++t)
      cols[rc[t]].push_back({i, rv[t]});
  }

  out << "COLUMNS\n";
  bool in_int = false;
  for (int j = 0; j < lp.num_vars(); ++j) {
    const bool want_int = lp.kind(j) == VarKind::Binary;
    if (want_int != in_int) {
      out << "    MARKER 'MARKER' " << (want_int ? "'INTORG'" : "'INTEND'")
          << "\n";
      in_int = want_int;
    }
    out << "    " << lp.var_name(j) << " " << kObjRow << " " << fmt(lp.obj(j))
        << "\n";
    for (const auto& [row, coef] : cols[j])
      out << "    " << lp.var_name(j) << " " << lp.row_name(row) << " "
          << fmt(coef) << "\n";
  }
  if (in_int) out << "    MARKER 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  if (lp.obj_constant() != 0.0)
    out << "    RHS1 " << kObjRow << " " << fmt(-lp.obj_constant()) << "\n";
  for (int i = 0; i < lp.num_rows(); ++i)
    if (lp.row(i).rhs != 0.0)
      out << "    RHS1 " << lp.row_name(i) << " " << fmt(lp.row(i).rhs) << "\n";

  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower(j);
    const double up = lp.upper(j);
    const std::string& name = lp.var_name(j);
    if (lo == up) {
      out << " FX BND " << name << " " << fmt(lo) << "\n";
      continue;
    }
    const bool lo_inf = std::isinf(lo);
    const bool up_inf = std::isinf(up);
    if (lo_inf && up_inf) {
      out << " FR BND " << name << "\n";
      continue;
    }
    if (lo_inf) out << " MI BND " << name << "\n";
    if (!lo_inf && lo != 0.0) out << " LO BND " << name << " " << fmt(lo) << "\n";
    if (!up_inf) out << " UP BND " << name << " " << fmt(up) << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

void write_mps(const LinearProgram& lp, const std::string& path,
               const std::string& model_name) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path + " for write");
  f << mps_string(lp, model_name);
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

LinearProgram parse_mps_string(const std::string& text) {
  enum Section { kNone, kRows, kColumns, kRhs, kRanges, kBounds, kDone };
  Section section = kNone;

  struct RowDecl {
    std::string name;
    RowSense sense;
  };
  std::vector<RowDecl> rows;
  std::unordered_map<std::string, int> row_index;   // constraint rows only
  std::string obj_name;

  struct VarData {
    std::string name;
    double obj = 0.0;
    bool integer = false;
    double lo = 0.0;
    double up = kInf;
    bool lo_set = false, up_set = false;
    std::vector<std::pair<int, double>> entries;  // (row, coef)
  };
  std::vector<VarData> vars;
  std::unordered_map<std::string, int> var_index;
  std::vector<double> rhs_values;
  double obj_constant = 0.0;
  bool in_int = false;
  bool saw_endata = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = toks[0];
      if (head == "NAME") {
        continue;
      } else if (head == "OBJSENSE") {
        // value may be on this line or the next; only MIN accepted
        if (toks.size() > 1 && toks[1] != "MIN" && toks[1] != "MINIMIZE")
          throw Error(ErrorCode::MalformedMatrix, "only minimization supported",
                      line_no);
        section = kNone;
      } else if (head == "ROWS") {
        section = kRows;
      } else if (head == "COLUMNS") {
        section = kColumns;
      } else if (head == "RHS") {
        section = kRhs;
      } else if (head == "RANGES") {
        throw Error(ErrorCode::MalformedMatrix, "RANGES section not supported",
                    line_no);
      } else if (head == "BOUNDS") {
        section = kBounds;
      } else if (head == "ENDATA") {
        saw_endata = true;
        section = kDone;
        break;
      } else if (head == "MIN" || head == "MINIMIZE") {
        continue;  // OBJSENSE value on its own line
      } else if (head == "MAX" || head == "MAXIMIZE") {
        throw Error(ErrorCode::MalformedMatrix, "only minimization supported",
                    line_no);
      } else {
        throw Error(ErrorCode::MalformedMatrix, "unknown section " + head,
                    line_no);
      }
      continue;
    }

    switch (section) {
      case kRows: {
        if (toks.size() != 2)
          throw Error(ErrorCode::MalformedMatrix, "bad row declaration",
                      line_no);
        const std::string& type = toks[0];
        const std::string& name = toks[1];
        if (type == "N") {
          if (obj_name.empty()) obj_name = name;
          continue;
        }
        RowSense sense;
        if (type == "L") sense = RowSense::LE;
        else if (type == "G") sense = RowSense::GE;
        else if (type == "E") sense = RowSense::EQ;
        else
          throw Error(ErrorCode::MalformedMatrix, "bad row type " + type,
                      line_no);
        if (!row_index.emplace(name, static_cast<int>(rows.size())).second)
          throw Error(ErrorCode::NameCollision, "duplicate row " + name,
                      line_no);
        rows.push_back({name, sense});
        break;
      }
      case kColumns: {
        if (toks.size() >= 3 && toks[1] == "'MARKER'") {
          if (toks[2] == "'INTORG'") in_int = true;
          else if (toks[2] == "'INTEND'") in_int = false;
          else
            throw Error(ErrorCode::MalformedMatrix, "bad marker", line_no);
          continue;
        }
        if (toks.size() != 3 && toks.size() != 5)
          throw Error(ErrorCode::MalformedMatrix, "bad column entry", line_no);
        auto it = var_index.find(toks[0]);
        int j;
        if (it == var_index.end()) {
          j = static_cast<int>(vars.size());
          var_index.emplace(toks[0], j);
          VarData v;
          v.name = toks[0];
          v.integer = in_int;
          if (in_int) v.up = 1.0;
          vars.push_back(std::move(v));
        } else {
          j = it->second;
        }
        for (std::size_t t = 1; t + 1 < toks.size(); t += 2) {
          const std::string& rname = toks[t];
          const double value = parse_number(toks[t + 1], line_no);
          if (rname == obj_name) {
            vars[j].obj = value;
          } else {
            auto rit = row_index.find(rname);
            if (rit == row_index.end())
              throw Error(ErrorCode::MalformedMatrix, "unknown row " + rname,
                          line_no);
            vars[j].entries.push_back({rit->second, value});
          }
        }
        break;
      }
      case kRhs: {
        if (toks.size() != 3 && toks.size() != 5)
          throw Error(ErrorCode::MalformedMatrix, "bad rhs entry", line_no);
        if (rhs_values.empty()) rhs_values.assign(rows.size(), 0.0);
        for (std::size_t t = 1; t + 1 < toks.size(); t += 2) {
          const double value = parse_number(toks[t + 1], line_no);
          if (toks[t] == obj_name) {
            obj_constant = -value;
          } else {
            auto rit = row_index.find(toks[t]);
            if (rit == row_index.end())
              throw Error(ErrorCode::MalformedMatrix, "unknown row " + toks[t],
                          line_no);
            rhs_values[rit->second] = value;
          }
        }
        break;
      }
      case kBounds: {
        if (toks.size() < 3)
          throw Error(ErrorCode::MalformedMatrix, "bad bound entry", line_no);
        const std::string& type = toks[0];
        auto vit = var_index.find(toks[2]);
        if (vit == var_index.end())
          throw Error(ErrorCode::MalformedMatrix, "unknown column " + toks[2],
                      line_no);
        VarData& v = vars[vit->second];
        double value = 0.0;
        if (type == "LO" || type == "UP" || type == "FX") {
          if (toks.size() != 4)
            throw Error(ErrorCode::MalformedMatrix, "bad bound entry", line_no);
          value = parse_number(toks[3], line_no);
        } else if (toks.size() != 3) {
          throw Error(ErrorCode::MalformedMatrix, "bad bound entry", line_no);
        }
        if (type == "LO") {
          v.lo = value;
          v.lo_set = true;
        } else if (type == "UP") {
          v.up = value;
          v.up_set = true;
        } else if (type == "FX") {
          v.lo = v.up = value;
          v.lo_set = v.up_set = true;
        } else if (type == "FR") {
          v.lo = -kInf;
          v.up = kInf;
          v.lo_set = v.up_set = true;
        } else if (type == "MI") {
          v.lo = -kInf;
          v.lo_set = true;
        } else if (type == "PL") {
          v.up = kInf;
          v.up_set = true;
        } else if (type == "BV") {
          v.integer = true;
          v.lo = 0.0;
          v.up = 1.0;
          v.lo_set = v.up_set = true;
        } else {
          throw Error(ErrorCode::MalformedMatrix, "bad bound type " + type,
                      line_no);
        }
        break;
      }
      case kNone:
      case kRanges:
      case kDone:
        throw Error(ErrorCode::MalformedMatrix, "data outside a section",
                    line_no);
    }
  }
  if (!saw_endata)
    throw Error(ErrorCode::MissingSection, "missing ENDATA", line_no);
  if (obj_name.empty())
    throw Error(ErrorCode::MissingSection, "missing objective row");
  if (rhs_values.empty()) rhs_values.assign(rows.size(), 0.0);

  LinearProgram lp;
  for (auto& v : vars) {
    if (v.integer && !(v.lo >= 0.0 && v.up <= 1.0))
      throw Error(ErrorCode::MalformedMatrix,
                  "integer column " + v.name + " is not binary");
    lp.add_var(v.name, v.lo, v.up,
               v.integer ? VarKind::Binary : VarKind::Continuous, v.obj);
  }
  lp.set_obj_constant(obj_constant);

  // Rebuild rows in declaration order; entries accumulate in column order,
  // matching the writer's emission order so round trips are byte-stable.
  std::vector<std::vector<std::pair<int, double>>> row_entries(rows.size());
  for (int j = 0; j < static_cast<int>(vars.size()); ++j)
    for (const auto& [row, coef] : vars[j].entries)
      row_entries[row].push_back({j, coef});
  for (std::size_t i = 0; i < rows.size(); ++i)
    lp.add_row(rows[i].name, rows[i].sense, rhs_values[i],
               std::span<const std::pair<int, double>>(row_entries[i]));
  lp.validate();
  return lp;
}

LinearProgram read_mps(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_mps_string(buf.str());
}

ImportedSolution parse_solution_string(const std::string& text,
                                       const LinearProgram& lp) {
  std::unordered_map<std::string, int> var_index;
  for (int j = 0; j < lp.num_vars(); ++j) var_index.emplace(lp.var_name(j), j);

  ImportedSolution out;
  out.primal.assign(lp.num_vars(), 0.0);

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "#") {
      if (toks.size() >= 3 && toks[1] == "objective")
        out.objective = parse_number(toks[2], line_no);
      else if (toks.size() >= 3 && toks[1] == "status") {
        if (toks[2] == "optimal") out.status = SolveStatus::Optimal;
        else if (toks[2] == "infeasible") out.status = SolveStatus::Infeasible;
        else if (toks[2] == "unbounded") out.status = SolveStatus::Unbounded;
        else out.status = SolveStatus::IterLimit;
      }
      continue;
    }
    if (toks[0][0] == '#') continue;  // plain comment
    if (toks.size() != 2)
      throw Error(ErrorCode::MalformedMatrix, "expected '<name> <value>'",
                  line_no);
    auto it = var_index.find(toks[0]);
    if (it == var_index.end())
      throw Error(ErrorCode::MalformedMatrix, "unknown variable " + toks[0],
                  line_no);
    out.primal[it->second] = parse_number(toks[1], line_no);
  }
  return out;
}

ImportedSolution read_solution(const std::string& path,
                               const LinearProgram& lp) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_solution_string(buf.str(), lp);
}

}  // namespace vsr
