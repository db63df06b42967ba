#include "vsrplan/matpower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "vsrplan/lu.hpp"

namespace vsr {

namespace {

// Standard case table columns.
constexpr int kBusId = 0, kBusType = 1, kBusPd = 2;
constexpr int kGenBus = 0, kGenStatus = 7, kGenPmax = 8, kGenPmin = 9;
constexpr int kBrFrom = 0, kBrTo = 1, kBrX = 3, kBrRateA = 5, kBrStatus = 10;
constexpr int kCostModel = 0, kCostN = 3, kCostCoef = 4;

std::string strip_comment(const std::string& line) {
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

double parse_token(const std::string& tok, int line_no) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || std::isnan(v)) {
    throw Error(ErrorCode::NumericParse, "bad number '" + tok + "'", line_no);
  }
  return v;
}

struct MatrixReader {
  std::string name;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  std::vector<double> current;
  int start_line = 0;

  void end_row(int line_no) {
    if (current.empty()) return;
    if (!rows.empty() && rows.front().size() != current.size()) {
      throw Error(ErrorCode::MalformedMatrix,
                  name + " row has " + std::to_string(current.size()) +
                      " entries, expected " +
                      std::to_string(rows.front().size()),
                  line_no);
    }
    rows.push_back(std::move(current));
    row_lines.push_back(line_no);
    current.clear();
  }

  // Consumes matrix body text without brackets. Semicolons end rows and may
  // be glued to values.
  void feed(const std::string& chunk, int line_no) {
    std::istringstream in(chunk);
    std::string tok;
    while (in >> tok) {
      size_t start = 0;
      while (start <= tok.size()) {
        size_t semi = tok.find(';', start);
        std::string piece = tok.substr(
            start, semi == std::string::npos ? std::string::npos : semi - start);
        if (!piece.empty()) current.push_back(parse_token(piece, line_no));
        if (semi == std::string::npos) break;
        end_row(line_no);
        start = semi + 1;
      }
    }
  }
};

// Matches "<ident>.<field>" at the start of a trimmed line, returns field.
std::string assigned_field(const std::string& line) {
  size_t i = line.find_first_not_of(" \t");
  if (i == std::string::npos) return {};
  size_t eq = line.find('=', i);
  if (eq == std::string::npos) return {};
  std::string lhs = line.substr(i, eq - i);
  while (!lhs.empty() && (lhs.back() == ' ' || lhs.back() == '\t')) {
    lhs.pop_back();
  }
  size_t dot = lhs.rfind('.');
  if (dot == std::string::npos) return {};
  std::string field = lhs.substr(dot + 1);
  if (field.empty() ||
      field.find_first_of(" \t([{") != std::string::npos) {
    return {};
  }
  return field;
}

}  // namespace

RawCase parse_case(const std::string& text) {
  RawCase raw;
  raw.case_name = "case";
  bool have_base = false;
  std::map<std::string, MatrixReader> readers;
  const std::set<std::string> wanted = {"bus", "gen", "branch", "gencost"};

  MatrixReader* active = nullptr;
  bool skipping_block = false;

  std::istringstream in(text);
  std::string source_line;
  int line_no = 0;
  while (std::getline(in, source_line)) {
    ++line_no;
    std::string line = strip_comment(source_line);

    // Drop a trailing continuation so the row keeps accumulating.
    size_t cont = line.rfind("...");
    bool continued = false;
    if (cont != std::string::npos && is_blank(line.substr(cont + 3))) {
      line = line.substr(0, cont);
      continued = true;
    }

    if (active) {
      size_t close = line.find(']');
      if (close == std::string::npos) {
        active->feed(line, line_no);
        if (!continued) active->end_row(line_no);
      } else {
        active->feed(line.substr(0, close), line_no);
        active->end_row(line_no);
        active = nullptr;
      }
      continue;
    }
    if (skipping_block) {
      if (line.find(']') != std::string::npos ||
          line.find('}') != std::string::npos) {
        skipping_block = false;
      }
      continue;
    }
    if (is_blank(line)) continue;

    size_t first = line.find_first_not_of(" \t");
    if (line.compare(first, 8, "function") == 0) {
      std::istringstream fn(line.substr(first + 8));
      std::string tok, last;
      while (fn >> tok) last = tok;
      if (!last.empty() && last != "=") raw.case_name = last;
      continue;
    }

    std::string field = assigned_field(line);
    if (field.empty()) continue;
    size_t eq = line.find('=');
    std::string rhs = line.substr(eq + 1);

    if (field == "baseMVA") {
      std::string value = rhs;
      size_t semi = value.find(';');
      if (semi != std::string::npos) value = value.substr(0, semi);
      std::istringstream vs(value);
      std::string tok;
      if (!(vs >> tok)) {
        throw Error(ErrorCode::NumericParse, "baseMVA has no value", line_no);
      }
      raw.base_mva = parse_token(tok, line_no);
      have_base = true;
      continue;
    }

    size_t open_sq = rhs.find('[');
    size_t open_br = rhs.find('{');
    if (wanted.count(field) && open_sq != std::string::npos) {
      MatrixReader& reader = readers[field];
      reader = MatrixReader{};
      reader.name = field;
      reader.start_line = line_no;
      std::string body = rhs.substr(open_sq + 1);
      size_t close = body.find(']');
      if (close == std::string::npos) {
        reader.feed(body, line_no);
        if (!continued) reader.end_row(line_no);
        active = &reader;
      } else {
        reader.feed(body.substr(0, close), line_no);
        reader.end_row(line_no);
      }
      continue;
    }
    if (open_sq != std::string::npos || open_br != std::string::npos) {
      char closer = open_sq != std::string::npos ? ']' : '}';
      if (rhs.find(closer) == std::string::npos) skipping_block = true;
      continue;
    }
    // Unrelated scalar assignment, ignored.
  }

  if (active) {
    throw Error(ErrorCode::MalformedMatrix,
                "unterminated " + active->name + " matrix", line_no);
  }
  if (!have_base) {
    throw Error(ErrorCode::MissingSection, "baseMVA not found");
  }
  for (const char* need : {"bus", "gen", "branch"}) {
    if (!readers.count(need) || readers[need].rows.empty()) {
      throw Error(ErrorCode::MissingSection,
                  std::string(need) + " matrix not found");
    }
  }
  raw.bus_rows = std::move(readers["bus"].rows);
  raw.gen_rows = std::move(readers["gen"].rows);
  raw.branch_rows = std::move(readers["branch"].rows);
  if (readers.count("gencost")) {
    raw.gencost_rows = std::move(readers["gencost"].rows);
  }

  const auto& bus_lines = readers["bus"].row_lines;
  std::set<int> bus_ids;
  for (size_t i = 0; i < raw.bus_rows.size(); ++i) {
    int id = static_cast<int>(raw.bus_rows[i][kBusId]);
    if (!bus_ids.insert(id).second) {
      throw Error(ErrorCode::MalformedMatrix,
                  "duplicate bus number " + std::to_string(id), bus_lines[i]);
    }
  }
  const auto& branch_lines = readers["branch"].row_lines;
  for (size_t i = 0; i < raw.branch_rows.size(); ++i) {
    const auto& row = raw.branch_rows[i];
    if (row.size() < 2 || !bus_ids.count(static_cast<int>(row[kBrFrom])) ||
        !bus_ids.count(static_cast<int>(row[kBrTo]))) {
      throw Error(ErrorCode::MalformedMatrix,
                  "branch row " + std::to_string(i + 1) +
                      " references unknown bus",
                  branch_lines[i]);
    }
  }
  const auto& gen_lines = readers["gen"].row_lines;
  for (size_t i = 0; i < raw.gen_rows.size(); ++i) {
    if (raw.gen_rows[i].empty() ||
        !bus_ids.count(static_cast<int>(raw.gen_rows[i][kGenBus]))) {
      throw Error(ErrorCode::MalformedMatrix,
                  "gen row " + std::to_string(i + 1) + " references unknown bus",
                  gen_lines[i]);
    }
  }
  return raw;
}

RawCase read_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open case file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_case(text.str());
}

namespace {

void write_matrix(std::ostream& out, const std::string& field,
                  const std::vector<std::vector<double>>& rows) {
  out << "mpc." << field << " = [\n";
  for (const auto& row : rows) {
    out << "\t";
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << "\t";
      out << format_number(row[j]);
    }
    out << ";\n";
  }
  out << "];\n\n";
}

}  // namespace

std::string write_case(const RawCase& raw) {
  std::ostringstream out;
  out << "function mpc = " << raw.case_name << "\n";
  out << "mpc.version = '2';\n\n";
  out << "mpc.baseMVA = " << format_number(raw.base_mva) << ";\n\n";
  write_matrix(out, "bus", raw.bus_rows);
  write_matrix(out, "gen", raw.gen_rows);
  write_matrix(out, "branch", raw.branch_rows);
  if (!raw.gencost_rows.empty()) write_matrix(out, "gencost", raw.gencost_rows);
  return out.str();
}

namespace {

// Marginal cost in $/MWh from a cost table row, linearized when nonlinear.
double marginal_cost(const std::vector<double>& row, double p_min_mw,
                     double p_max_mw, int gen_id, Warnings* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) {
      warnings->push_back("generator " + std::to_string(gen_id) + ": " + msg);
    }
  };
  int model = static_cast<int>(row[kCostModel]);
  if (static_cast<int>(row.size()) <= kCostN) {
    warn("cost row too short, using zero cost");
    return 0.0;
  }
  int n = static_cast<int>(row[kCostN]);
  if (model == 1) {
    // Piecewise points (x1,y1,...): overall slope between the end points.
    if (n < 2 || static_cast<int>(row.size()) < kCostCoef + 2 * n) {
      warn("piecewise cost needs two points, using zero cost");
      return 0.0;
    }
    double x0 = row[kCostCoef], y0 = row[kCostCoef + 1];
    double x1 = row[kCostCoef + 2 * n - 2], y1 = row[kCostCoef + 2 * n - 1];
    if (x1 == x0) {
      warn("degenerate piecewise cost, using zero cost");
      return 0.0;
    }
    warn("piecewise cost replaced by end-to-end slope");
    return (y1 - y0) / (x1 - x0);
  }
  if (static_cast<int>(row.size()) < kCostCoef + n) {
    warn("cost row shorter than declared order, using zero cost");
    return 0.0;
  }
  // Polynomial coefficients, highest order first.
  if (n <= 1) {
    warn("constant cost curve, marginal cost zero");
    return 0.0;
  }
  if (n == 2) return row[kCostCoef];
  // Derivative of the polynomial at the midpoint of the dispatch range.
  double mid = 0.5 * (p_min_mw + p_max_mw);
  double slope = 0.0;
  for (int k = 0; k < n - 1; ++k) {
    int degree = n - 1 - k;
    slope += degree * row[kCostCoef + k] * std::pow(mid, degree - 1);
  }
  warn("nonlinear cost linearized at dispatch midpoint");
  return slope;
}

// DC flows at nominal load with dispatch spread over capacity, for sizing
// ratings on cases that ship without them.
std::vector<double> nominal_flows(const Network& net) {
  size_t nb = net.buses.size();
  std::unordered_map<int, size_t> bus_pos;
  for (size_t i = 0; i < nb; ++i) bus_pos[net.buses[i].id] = i;
  size_t ref = bus_pos.at(net.reference_bus());

  std::vector<double> injection(nb, 0.0);
  double total_load = net.total_load();
  double total_cap = 0.0;
  for (const Generator& g : net.generators) total_cap += g.p_max;
  for (const Generator& g : net.generators) {
    double share = total_cap > 0.0
                       ? total_load * g.p_max / total_cap
                       : total_load / static_cast<double>(net.generators.size());
    injection[bus_pos.at(g.bus)] += share;
  }
  for (const Load& d : net.loads) injection[bus_pos.at(d.bus)] -= d.p;

  // Reduced nodal susceptance system, reference row and column removed.
  auto reduced = [&](size_t i) { return i < ref ? i : i - 1; };
  size_t n = nb - 1;
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (const Branch& br : net.branches) {
    size_t i = bus_pos.at(br.from_bus), j = bus_pos.at(br.to_bus);
    if (i != ref && j != ref) {
      dense[reduced(i)][reduced(j)] -= br.b;
      dense[reduced(j)][reduced(i)] -= br.b;
    }
    if (i != ref) dense[reduced(i)][reduced(i)] += br.b;
    if (j != ref) dense[reduced(j)][reduced(j)] += br.b;
  }
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      if (dense[i][j] != 0.0) {
        cols[j].push_back({static_cast<int>(i), dense[i][j]});
      }
    }
  }
  SparseLU lu;
  if (!lu.factorize(static_cast<int>(n), cols)) {
    throw Error(ErrorCode::IslandedNetwork,
                "nodal susceptance matrix is singular");
  }
  std::vector<double> theta_red(n);
  for (size_t i = 0; i < nb; ++i) {
    if (i != ref) theta_red[reduced(i)] = injection[i];
  }
  lu.ftran(theta_red);

  auto angle = [&](size_t i) { return i == ref ? 0.0 : theta_red[reduced(i)]; };
  std::vector<double> flows(net.branches.size());
  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    flows[k] =
        br.b * (angle(bus_pos.at(br.from_bus)) - angle(bus_pos.at(br.to_bus)));
  }
  return flows;
}

}  // namespace

Network build_network(const RawCase& raw, const Config& cfg,
                      Warnings* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  if (!(raw.base_mva > 0.0)) {
    throw Error(ErrorCode::MalformedMatrix, "baseMVA must be positive");
  }
  for (const auto& row : raw.bus_rows) {
    if (row.size() < 13) {
      throw Error(ErrorCode::MalformedMatrix, "bus rows need 13 columns");
    }
  }
  for (const auto& row : raw.gen_rows) {
    if (row.size() < 10) {
      throw Error(ErrorCode::MalformedMatrix, "gen rows need 10 columns");
    }
  }
  for (const auto& row : raw.branch_rows) {
    if (row.size() < 11) {
      throw Error(ErrorCode::MalformedMatrix, "branch rows need 11 columns");
    }
  }

  Network net;
  net.base_mva = raw.base_mva;
  net.theta_max = cfg.number("network.theta_max");
  if (!(net.theta_max > 0.0)) {
    throw Error(ErrorCode::BadConfig, "network.theta_max must be positive");
  }
  double emergency = cfg.number("network.emergency_factor");
  double thermal_scale = cfg.number("network.thermal_scale");
  double default_rating = cfg.number("network.default_rating_mva");
  bool auto_rating = cfg.flag("network.auto_rating");
  double ramp_frac = cfg.number("gen.ramp_frac");
  double up_frac = cfg.number("penalty.adjust_up_frac");
  double dn_frac = cfg.number("penalty.adjust_dn_frac");

  for (const auto& row : raw.bus_rows) {
    Bus bus;
    bus.id = static_cast<int>(row[kBusId]);
    net.buses.push_back(bus);
    double pd = row[kBusPd];
    if (pd < 0.0) {
      throw Error(ErrorCode::MalformedMatrix,
                  "bus " + std::to_string(bus.id) + " has negative demand");
    }
    if (pd > 0.0) {
      Load load;
      load.id = static_cast<int>(net.loads.size()) + 1;
      load.bus = bus.id;
      load.p = pd / net.base_mva;
      net.loads.push_back(load);
    }
  }

  int reference = 0;
  int slack_count = 0;
  for (const auto& row : raw.bus_rows) {
    if (static_cast<int>(row[kBusType]) == 3) {
      ++slack_count;
      int id = static_cast<int>(row[kBusId]);
      if (reference == 0 || id < reference) reference = id;
    }
  }
  if (slack_count > 1) warn("multiple slack buses, keeping the lowest");

  std::set<int> resched_ids;
  bool resched_all = true;
  if (cfg.is_list("gen.reschedulable")) {
    resched_all = false;
    for (int id : cfg.integer_list("gen.reschedulable")) resched_ids.insert(id);
  } else if (cfg.text("gen.reschedulable") != "all") {
    throw Error(ErrorCode::BadConfig,
                "gen.reschedulable must be 'all' or a list of generator ids");
  }

  for (size_t i = 0; i < raw.gen_rows.size(); ++i) {
    const auto& row = raw.gen_rows[i];
    int gen_id = static_cast<int>(i) + 1;
    if (row[kGenStatus] <= 0.0) continue;
    Generator gen;
    gen.id = gen_id;
    gen.bus = static_cast<int>(row[kGenBus]);
    gen.p_max = row[kGenPmax] / net.base_mva;
    gen.p_min = row[kGenPmin] / net.base_mva;
    if (gen.p_min < 0.0) {
      warn("generator " + std::to_string(gen_id) +
           " p_min below zero clamped to 0");
      gen.p_min = 0.0;
    }
    if (i < raw.gencost_rows.size()) {
      gen.cost = marginal_cost(raw.gencost_rows[i], row[kGenPmin],
                               row[kGenPmax], gen_id, warnings);
      if (gen.cost < 0.0) {
        warn("generator " + std::to_string(gen_id) +
             " negative marginal cost clamped to 0");
        gen.cost = 0.0;
      }
    } else {
      warn("generator " + std::to_string(gen_id) +
           " has no cost row, using zero cost");
    }
    gen.adjust_up_cost = up_frac * gen.cost;
    gen.adjust_down_cost = dn_frac * gen.cost;
    gen.ramp_up = ramp_frac * gen.p_max;
    gen.ramp_dn = ramp_frac * gen.p_max;
    gen.reschedulable = resched_all || resched_ids.count(gen_id) > 0;
    net.generators.push_back(gen);
  }

  if (reference == 0) {
    for (const Generator& gen : net.generators) {
      if (reference == 0 || gen.bus < reference) reference = gen.bus;
    }
    if (reference == 0) {
      throw Error(ErrorCode::NoReference,
                  "no slack bus and no in-service generator");
    }
    warn("no slack bus in case, using bus " + std::to_string(reference));
  }
  for (Bus& bus : net.buses) bus.is_reference = bus.id == reference;

  std::vector<size_t> unrated;
  for (size_t i = 0; i < raw.branch_rows.size(); ++i) {
    const auto& row = raw.branch_rows[i];
    if (row[kBrStatus] == 0.0) continue;
    Branch br;
    br.id = static_cast<int>(i) + 1;
    br.from_bus = static_cast<int>(row[kBrFrom]);
    br.to_bus = static_cast<int>(row[kBrTo]);
    br.x = row[kBrX];
    if (!(br.x > 0.0)) {
      throw Error(ErrorCode::ZeroReactance,
                  "branch " + std::to_string(br.id) + " has x = " +
                      format_number(br.x));
    }
    br.b = 1.0 / br.x;
    br.emergency_factor = emergency;
    double rate = row[kBrRateA];
    if (rate <= 0.0) {
      if (auto_rating) {
        unrated.push_back(net.branches.size());
        br.s_max = default_rating / net.base_mva;
      } else {
        warn("branch " + std::to_string(br.id) +
             " has no rating, using default " + format_number(default_rating) +
             " MVA");
        br.s_max = default_rating / net.base_mva * thermal_scale;
      }
    } else {
      br.s_max = rate / net.base_mva * thermal_scale;
    }
    net.branches.push_back(br);
  }

  if (!is_connected(net)) {
    throw Error(ErrorCode::IslandedNetwork,
                "in-service network is not connected");
  }

  if (auto_rating && !unrated.empty()) {
    double margin = cfg.number("network.auto_rating_margin");
    std::vector<double> flows = nominal_flows(net);
    double max_abs = 0.0;
    for (double f : flows) max_abs = std::max(max_abs, std::fabs(f));
    double floor = 0.05 * max_abs;
    for (size_t idx : unrated) {
      double sized =
          margin * std::max(std::fabs(flows[idx]), floor) * thermal_scale;
      net.branches[idx].s_max = sized;
      warn("branch " + std::to_string(net.branches[idx].id) +
           " rating sized from nominal flow: " +
           format_number(sized * net.base_mva) + " MVA");
    }
  }

  net.validate();
  return net;
}

}  // namespace vsr
