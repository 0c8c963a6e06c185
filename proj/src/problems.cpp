#include "learnbd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "json.hpp"
#include "learnbd/errors.hpp"

namespace learnbd {

using nlohmann::json;

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---------------------------------------------------------------------------
// Two-stage problem

void TwoStageProblem::validate() const {
  const std::size_t n1 = first_stage_cost.size();
  if (!all_finite(first_stage_cost)) throw InputError("first-stage cost is not finite");
  if (scenarios.empty()) throw InputError("two-stage problem needs at least one scenario");
  if (theta_lower.size() != scenarios.size()) throw InputError("theta lower bounds must match the scenario count");
  double total = 0.0;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const Scenario& sc = scenarios[s];
    const std::string tag = "scenario " + std::to_string(s);
    if (!sc.block) throw InputError(tag + " has no recourse block");
    const RecourseBlock& b = *sc.block;
    const std::size_t rows = b.relations.size();
    if (b.recourse_matrix.rows != rows || b.technology.rows != rows || sc.rhs.size() != rows) {
      throw InputError(tag + ": recourse row counts disagree");
    }
    if (b.technology.cols != n1) throw InputError(tag + ": technology matrix width differs from first stage");
    if (b.recourse_matrix.cols != b.recourse_cost.size()) throw InputError(tag + ": recourse cost length mismatch");
    if (!all_finite(sc.rhs) || !std::isfinite(sc.probability) || sc.probability < 0.0) {
      throw InputError(tag + ": invalid rhs or probability");
    }
    if (s > 0 && (b.technology.cols != scenarios[0].block->technology.cols)) {
      throw InputError(tag + ": inconsistent dimensions across scenarios");
    }
    total += sc.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("scenario probabilities must sum to 1");
}

LpInstance recourse_lp(const TwoStageProblem& problem, std::size_t scenario, const std::vector<double>& x) {
  if (scenario >= problem.num_scenarios()) throw InputError("scenario index out of range");
  if (x.size() != problem.num_binaries()) throw InputError("first-stage vector has wrong length");
  const Scenario& sc = problem.scenarios[scenario];
  const RecourseBlock& b = *sc.block;
  LpInstance lp;
  lp.objective = b.recourse_cost;
  lp.rows.resize(b.relations.size());
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    LpRow& row = lp.rows[i];
    const auto begin = b.recourse_matrix.data.begin() + static_cast<std::ptrdiff_t>(i * b.recourse_matrix.cols);
    row.coefficients.assign(begin, begin + static_cast<std::ptrdiff_t>(b.recourse_matrix.cols));
    row.relation = b.relations[i];
    double tx = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) tx += b.technology(i, j) * x[j];
    row.rhs = sc.rhs[i] - tx;
  }
  return lp;
}

double recourse_value(const TwoStageProblem& problem, std::size_t scenario, const std::vector<double>& x) {
  const LpSolution s = solve_lp(recourse_lp(problem, scenario, x));
  if (s.status != LpStatus::Optimal) {
    throw SolverError("recourse LP of scenario " + std::to_string(scenario) + " is " +
                      std::string(to_string(s.status)) + "; complete recourse violated");
  }
  return s.objective;
}

double evaluate_first_stage(const TwoStageProblem& problem, const std::vector<double>& x) {
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) z += problem.first_stage_cost[j] * x[j];
  for (std::size_t s = 0; s < problem.num_scenarios(); ++s) {
    z += problem.scenarios[s].probability * recourse_value(problem, s, x);
  }
  return z;
}

MipInstance extensive_form(const TwoStageProblem& problem) {
  problem.validate();
  const std::size_t n1 = problem.num_binaries();
  std::size_t total = n1;
  for (const Scenario& sc : problem.scenarios) total += sc.block->recourse_cost.size();

  MipInstance mip;
  LpInstance& lp = mip.lp;
  lp.objective.assign(total, 0.0);
  lp.lower.assign(total, 0.0);
  lp.upper.assign(total, kInfinity);
  for (std::size_t j = 0; j < n1; ++j) {
    lp.objective[j] = problem.first_stage_cost[j];
    lp.upper[j] = 1.0;
    mip.binaries.push_back(j);
  }
  std::size_t offset = n1;
  for (const Scenario& sc : problem.scenarios) {
    const RecourseBlock& b = *sc.block;
    const std::size_t n2 = b.recourse_cost.size();
    for (std::size_t j = 0; j < n2; ++j) lp.objective[offset + j] = sc.probability * b.recourse_cost[j];
    for (std::size_t i = 0; i < b.relations.size(); ++i) {
      LpRow row;
      row.coefficients.assign(total, 0.0);
      for (std::size_t j = 0; j < n1; ++j) row.coefficients[j] = b.technology(i, j);
      for (std::size_t j = 0; j < n2; ++j) row.coefficients[offset + j] = b.recourse_matrix(i, j);
      row.relation = b.relations[i];
      row.rhs = sc.rhs[i];
      lp.rows.push_back(std::move(row));
    }
    offset += n2;
  }
  return mip;
}

// ---------------------------------------------------------------------------
// Scenarios

void ScenarioSet::validate(std::size_t dimension) const {
  if (demands.empty()) throw InputError("scenario set is empty");
  if (probabilities.size() != demands.size()) throw InputError("one probability per scenario is required");
  double total = 0.0;
  for (std::size_t s = 0; s < demands.size(); ++s) {
    if (demands[s].size() != dimension) {
      throw InputError("scenario " + std::to_string(s) + " has " + std::to_string(demands[s].size()) +
                       " demands, expected " + std::to_string(dimension));
    }
    for (double d : demands[s]) {
      if (!std::isfinite(d) || d < 0.0) throw InputError("scenario demands must be finite and nonnegative");
    }
    if (!(probabilities[s] >= 0.0)) throw InputError("scenario probabilities must be nonnegative");
    total += probabilities[s];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("scenario probabilities must sum to 1");
}

ScenarioSet sample_scenarios(const std::vector<double>& nominal, double sigma_ratio, std::size_t count,
                             std::uint64_t seed) {
  if (count == 0) throw InputError("scenario count must be positive");
  if (!(sigma_ratio >= 0.0)) throw InputError("sigma ratio must be nonnegative");
  ScenarioSet set;
  set.seed = seed;
  set.sigma_ratio = sigma_ratio;
  set.probabilities.assign(count, 1.0 / static_cast<double>(count));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  set.demands.assign(count, std::vector<double>(nominal.size(), 0.0));
  for (auto& scenario : set.demands) {
    for (std::size_t j = 0; j < nominal.size(); ++j) {
      const double z = standard(rng);
      scenario[j] = clamp_demand(nominal[j] + sigma_ratio * nominal[j] * z);
    }
  }
  return set;
}

ScenarioSet nominal_scenario(const std::vector<double>& nominal) {
  ScenarioSet set;
  set.demands = {nominal};
  set.probabilities = {1.0};
  return set;
}

void write_scenarios_csv(std::ostream& out, const ScenarioSet& set) {
  const std::size_t dim = set.demands.empty() ? 0 : set.demands.front().size();
  for (std::size_t j = 0; j < dim; ++j) out << 'd' << j << ',';
  out << "probability\n";
  out << std::setprecision(17);
  for (std::size_t s = 0; s < set.size(); ++s) {
    for (double d : set.demands[s]) out << d << ',';
    out << set.probabilities[s] << '\n';
  }
}

ScenarioSet read_scenarios_csv(std::istream& in) {
  ScenarioSet set;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.find("probability") != std::string::npos) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (used != cell.size() && cell.find_first_not_of(" \t", used) != std::string::npos) {
          throw ParseError("non-numeric cell '" + cell + "'", line_no);
        }
      } catch (const std::logic_error&) {
        throw ParseError("non-numeric cell '" + cell + "'", line_no);
      }
    }
    if (values.size() < 2) throw ParseError("scenario row needs demands and a probability", line_no);
    if (width == 0) width = values.size();
    if (values.size() != width) throw ParseError("scenario row has a different number of columns", line_no);
    set.probabilities.push_back(values.back());
    values.pop_back();
    set.demands.push_back(std::move(values));
  }
  if (set.demands.empty()) throw ParseError("no scenario rows", line_no);
  set.validate(width - 1);
  return set;
}

// ---------------------------------------------------------------------------
// CFLP

std::vector<double> CflpData::nominal_demand() const {
  std::vector<double> d;
  d.reserve(customers.size());
  for (const Customer& c : customers) d.push_back(c.demand);
  return d;
}

void CflpData::validate() const {
  if (facilities.empty() || customers.empty()) throw InputError("CFLP needs facilities and customers");
  if (unit_cost.rows != facilities.size() || unit_cost.cols != customers.size()) {
    throw InputError("CFLP unit cost matrix must be |W| x |F|");
  }
  for (const Facility& f : facilities) {
    if (!(f.capacity >= 0.0 && f.setup_cost >= 0.0) || !std::isfinite(f.capacity) || !std::isfinite(f.setup_cost)) {
      throw InputError("facility capacity and setup cost must be finite and nonnegative");
    }
  }
  for (const Customer& c : customers) {
    if (!(c.demand >= 0.0 && c.penalty >= 0.0) || !std::isfinite(c.demand) || !std::isfinite(c.penalty)) {
      throw InputError("customer demand and penalty must be finite and nonnegative");
    }
  }
  for (double c : unit_cost.data) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("unit costs must be finite and nonnegative");
  }
}

TwoStageProblem build_cflp(const CflpData& data, const ScenarioSet& scenarios) {
  data.validate();
  const std::size_t nw = data.facilities.size();
  const std::size_t nf = data.customers.size();
  scenarios.validate(nf);

  auto block = std::make_shared<RecourseBlock>();
  const std::size_t rows = nw + nf;
  const std::size_t vars = nw * nf + nf;
  block->recourse_matrix = DenseMatrix(rows, vars);
  block->technology = DenseMatrix(rows, nw);
  block->recourse_cost.assign(vars, 0.0);
  block->relations.assign(rows, Relation::LessEqual);
  for (std::size_t i = 0; i < nw; ++i) {
    for (std::size_t j = 0; j < nf; ++j) {
      block->recourse_matrix(i, i * nf + j) = 1.0;
      block->recourse_matrix(nw + j, i * nf + j) = 1.0;
      block->recourse_cost[i * nf + j] = data.unit_cost(i, j);
    }
    block->technology(i, i) = -data.facilities[i].capacity;
  }
  for (std::size_t j = 0; j < nf; ++j) {
    block->recourse_matrix(nw + j, nw * nf + j) = 1.0;
    block->recourse_cost[nw * nf + j] = data.customers[j].penalty;
    block->relations[nw + j] = Relation::GreaterEqual;
  }

  TwoStageProblem problem;
  problem.name = "cflp";
  for (const Facility& f : data.facilities) problem.first_stage_cost.push_back(f.setup_cost);
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    Scenario sc;
    sc.probability = scenarios.probabilities[s];
    sc.block = block;
    sc.rhs.assign(rows, 0.0);
    for (std::size_t j = 0; j < nf; ++j) sc.rhs[nw + j] = scenarios.demands[s][j];
    problem.scenarios.push_back(std::move(sc));
  }
  problem.theta_lower.assign(scenarios.size(), 0.0);
  problem.validate();
  return problem;
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::stringstream ss(line);
      std::string tok;
      while (ss >> tok) tokens_.push_back({tok, line_no});
    }
    last_line_ = std::max<std::size_t>(line_no, 1);
  }

  double number(const char* what) {
    if (pos_ >= tokens_.size()) throw ParseError(std::string("truncated file, expected ") + what, last_line_);
    const Token& t = tokens_[pos_++];
    try {
      std::size_t used = 0;
      const double v = std::stod(t.text, &used);
      if (used != t.text.size()) throw ParseError("non-numeric token '" + t.text + "'", t.line);
      return v;
    } catch (const std::logic_error&) {
      throw ParseError("non-numeric token '" + t.text + "'", t.line);
    }
  }

  std::size_t count(const char* what) {
    const std::size_t line = pos_ < tokens_.size() ? tokens_[pos_].line : last_line_;
    const double v = number(what);
    if (v < 0.0 || v != std::floor(v)) throw ParseError(std::string(what) + " must be a nonnegative integer", line);
    return static_cast<std::size_t>(v);
  }

  std::size_t current_line() const { return pos_ < tokens_.size() ? tokens_[pos_].line : last_line_; }
  bool empty() const { return tokens_.empty(); }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 1;
};

}  // namespace

CflpData parse_orlib_cap(std::istream& in, const CapParseOptions& options) {
  TokenReader reader(in);
  if (reader.empty()) throw ParseError("empty cap file", 1);
  CflpData data;
  const std::size_t m = reader.count("facility count");
  const std::size_t n = reader.count("customer count");
  if (m == 0 || n == 0) throw ParseError("facility and customer counts must be positive", 1);
  data.facilities.resize(m);
  for (Facility& f : data.facilities) {
    f.capacity = reader.number("facility capacity");
    f.setup_cost = reader.number("facility fixed cost");
  }
  data.customers.resize(n);
  data.unit_cost = DenseMatrix(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t line = reader.current_line();
    const double demand = reader.number("customer demand");
    if (demand < 0.0) throw ParseError("negative demand", line);
    data.customers[j].demand = demand;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t cost_line = reader.current_line();
      const double allocation = reader.number("allocation cost");
      if (allocation < 0.0) throw ParseError("negative allocation cost", cost_line);
      if (demand == 0.0) {
        if (allocation != 0.0) throw ParseError("zero demand with nonzero allocation cost", cost_line);
        data.unit_cost(i, j) = 0.0;
      } else {
        data.unit_cost(i, j) = allocation / demand;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, data.unit_cost(i, j));
    data.customers[j].penalty = options.penalty_factor * worst;
  }
  data.validate();
  return data;
}

void write_orlib_cap(std::ostream& out, const CflpData& data) {
  data.validate();
  const std::size_t m = data.facilities.size();
  out << std::setprecision(17);
  out << m << ' ' << data.customers.size() << '\n';
  for (const Facility& f : data.facilities) out << f.capacity << ' ' << f.setup_cost << '\n';
  for (std::size_t j = 0; j < data.customers.size(); ++j) {
    out << data.customers[j].demand << '\n';
    for (std::size_t i = 0; i < m; ++i) {
      out << data.unit_cost(i, j) * data.customers[j].demand << (i + 1 == m ? '\n' : ' ');
    }
  }
}

CflpData generate_cflp(const CflpGeneratorSpec& spec, std::uint64_t seed) {
  if (spec.facilities == 0 || spec.customers == 0) throw InputError("generator needs facilities and customers");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> demand(spec.min_demand, spec.max_demand);

  struct Point {
    double x, y;
  };
  std::vector<Point> fac(spec.facilities), cus(spec.customers);
  for (Point& p : fac) p = {unit(rng), unit(rng)};
  for (Point& p : cus) p = {unit(rng), unit(rng)};

  CflpData data;
  data.customers.resize(spec.customers);
  double total_demand = 0.0;
  for (Customer& c : data.customers) {
    c.demand = std::round(demand(rng));
    total_demand += c.demand;
  }
  const double capacity = std::round(spec.capacity_ratio * total_demand / static_cast<double>(spec.facilities));
  data.facilities.assign(spec.facilities, Facility{capacity, spec.setup_cost});
  data.unit_cost = DenseMatrix(spec.facilities, spec.customers);
  for (std::size_t i = 0; i < spec.facilities; ++i) {
    for (std::size_t j = 0; j < spec.customers; ++j) {
      const double dist = std::hypot(fac[i].x - cus[j].x, fac[i].y - cus[j].y);
      data.unit_cost(i, j) = std::round(100.0 * spec.cost_scale * dist) / 100.0;
    }
  }
  for (std::size_t j = 0; j < spec.customers; ++j) {
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.facilities; ++i) worst = std::max(worst, data.unit_cost(i, j));
    data.customers[j].penalty = spec.penalty_factor * worst;
  }
  data.validate();
  return data;
}

// ---------------------------------------------------------------------------
// CMND

std::vector<double> CmndData::nominal_demand() const {
  std::vector<double> d;
  d.reserve(commodities.size());
  for (const Commodity& k : commodities) d.push_back(k.demand);
  return d;
}

void CmndData::validate() const {
  if (nodes == 0) throw InputError("CMND needs at least one node");
  if (commodities.empty()) throw InputError("CMND needs at least one commodity");
  for (const Arc& a : arcs) {
    if (a.tail >= nodes || a.head >= nodes) throw InputError("arc endpoint is not a valid node");
    if (!(a.capacity >= 0.0 && a.fixed_cost >= 0.0) || !std::isfinite(a.capacity) || !std::isfinite(a.fixed_cost)) {
      throw InputError("arc capacity and fixed cost must be finite and nonnegative");
    }
  }
  for (const Commodity& k : commodities) {
    if (k.origin >= nodes || k.destination >= nodes) throw InputError("commodity endpoint is not a valid node");
    if (k.origin == k.destination) throw InputError("commodity origin and destination must differ");
    if (!(k.demand >= 0.0) || !std::isfinite(k.demand)) throw InputError("commodity demand must be nonnegative");
  }
  if (unit_cost.rows != arcs.size() || unit_cost.cols != commodities.size()) {
    throw InputError("CMND unit cost table must be |A| x |K|");
  }
  for (double c : unit_cost.data) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("unit costs must be finite and nonnegative");
  }
  if (!(penalty > 0.0) || !std::isfinite(penalty)) throw InputError("penalty B must be positive");
}

double default_cmnd_penalty(const DenseMatrix& unit_cost) {
  double worst = 0.0;
  for (double c : unit_cost.data) worst = std::max(worst, c);
  return 1e4 * (worst > 0.0 ? worst : 1.0);
}

TwoStageProblem build_cmnd(const CmndData& data, const ScenarioSet& scenarios) {
  data.validate();
  const std::size_t na = data.arcs.size();
  const std::size_t nk = data.commodities.size();
  const std::size_t nn = data.nodes;
  scenarios.validate(nk);

  const std::size_t flow_rows = nn * nk;
  const std::size_t rows = flow_rows + na;
  const std::size_t vars = na * nk + nn * nk;
  auto block = std::make_shared<RecourseBlock>();
  block->recourse_matrix = DenseMatrix(rows, vars);
  block->technology = DenseMatrix(rows, na);
  block->recourse_cost.assign(vars, 0.0);
  block->relations.assign(rows, Relation::GreaterEqual);

  for (std::size_t a = 0; a < na; ++a) {
    const Arc& arc = data.arcs[a];
    for (std::size_t k = 0; k < nk; ++k) {
      const std::size_t y = a * nk + k;
      block->recourse_cost[y] = data.unit_cost(a, k);
      block->recourse_matrix(arc.head * nk + k, y) += 1.0;  // inflow at head
      block->recourse_matrix(arc.tail * nk + k, y) -= 1.0;  // outflow at tail
      block->recourse_matrix(flow_rows + a, y) = 1.0;
    }
    block->relations[flow_rows + a] = Relation::LessEqual;
    block->technology(flow_rows + a, a) = -arc.capacity;
  }
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t k = 0; k < nk; ++k) {
      const std::size_t alpha = na * nk + i * nk + k;
      block->recourse_cost[alpha] = data.penalty;
      block->recourse_matrix(i * nk + k, alpha) = 1.0;
    }
  }

  TwoStageProblem problem;
  problem.name = "cmnd";
  for (const Arc& a : data.arcs) problem.first_stage_cost.push_back(a.fixed_cost);
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    Scenario sc;
    sc.probability = scenarios.probabilities[s];
    sc.block = block;
    sc.rhs.assign(rows, 0.0);
    for (std::size_t k = 0; k < nk; ++k) {
      const double v = scenarios.demands[s][k];
      const Commodity& c = data.commodities[k];
      // rhs = −d̃: −v at the origin, +v at the destination
      sc.rhs[c.origin * nk + k] = -v;
      sc.rhs[c.destination * nk + k] = v;
    }
    problem.scenarios.push_back(std::move(sc));
  }
  problem.theta_lower.assign(scenarios.size(), 0.0);
  problem.validate();
  return problem;
}

namespace {

std::size_t json_line(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::size_t as_index(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw InputError(std::string("CMND field '") + what + "' must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

double as_number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string("CMND field '") + what + "' must be a number");
  return j.get<double>();
}

}  // namespace

CmndData parse_cmnd_json(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), json_line(text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("CMND instance must be a JSON object", 1);
  for (const char* key : {"nodes", "arcs", "commodities", "unit_costs"}) {
    if (!doc.contains(key)) throw InputError(std::string("CMND instance is missing '") + key + "'");
  }
  CmndData data;
  data.nodes = as_index(doc["nodes"], "nodes");
  for (const json& a : doc["arcs"]) {
    data.arcs.push_back(Arc{as_index(a.at("tail"), "tail"), as_index(a.at("head"), "head"),
                            as_number(a.at("capacity"), "capacity"), as_number(a.at("fixed_cost"), "fixed_cost")});
  }
  for (const json& k : doc["commodities"]) {
    data.commodities.push_back(Commodity{as_index(k.at("origin"), "origin"),
                                         as_index(k.at("destination"), "destination"),
                                         as_number(k.at("demand"), "demand")});
  }
  const json& costs = doc["unit_costs"];
  if (!costs.is_array() || costs.size() != data.arcs.size()) {
    throw InputError("'unit_costs' must have one entry per arc");
  }
  data.unit_cost = DenseMatrix(data.arcs.size(), data.commodities.size());
  for (std::size_t a = 0; a < data.arcs.size(); ++a) {
    const json& entry = costs[a];
    if (entry.is_number()) {
      for (std::size_t k = 0; k < data.commodities.size(); ++k) data.unit_cost(a, k) = entry.get<double>();
    } else if (entry.is_array() && entry.size() == data.commodities.size()) {
      for (std::size_t k = 0; k < data.commodities.size(); ++k) data.unit_cost(a, k) = as_number(entry[k], "unit_costs");
    } else {
      throw InputError("'unit_costs' entry must be a number or one number per commodity");
    }
  }
  data.penalty = doc.contains("penalty_B") ? as_number(doc["penalty_B"], "penalty_B")
                                           : default_cmnd_penalty(data.unit_cost);
  data.validate();
  return data;
}

void write_cmnd_json(std::ostream& out, const CmndData& data) {
  data.validate();
  json doc;
  doc["nodes"] = data.nodes;
  doc["arcs"] = json::array();
  for (const Arc& a : data.arcs) {
    doc["arcs"].push_back({{"tail", a.tail}, {"head", a.head}, {"capacity", a.capacity}, {"fixed_cost", a.fixed_cost}});
  }
  doc["commodities"] = json::array();
  for (const Commodity& k : data.commodities) {
    doc["commodities"].push_back({{"origin", k.origin}, {"destination", k.destination}, {"demand", k.demand}});
  }
  doc["unit_costs"] = json::array();
  for (std::size_t a = 0; a < data.arcs.size(); ++a) {
    json row = json::array();
    for (std::size_t k = 0; k < data.commodities.size(); ++k) row.push_back(data.unit_cost(a, k));
    doc["unit_costs"].push_back(row);
  }
  doc["penalty_B"] = data.penalty;
  out << doc.dump(2) << '\n';
}

CmndData generate_cmnd(const CmndGeneratorSpec& spec, std::uint64_t seed) {
  if (spec.nodes < 2) throw InputError("CMND generator needs at least two nodes");
  const std::size_t max_arcs = spec.nodes * (spec.nodes - 1);
  if (spec.arcs > max_arcs) throw InputError("too many arcs for the node count");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  CmndData data;
  data.nodes = spec.nodes;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    for (std::size_t j = 0; j < spec.nodes; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  pairs.resize(spec.arcs);
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [tail, head] : pairs) {
    data.arcs.push_back(Arc{tail, head, std::round(uniform(spec.min_capacity, spec.max_capacity)),
                            std::round(uniform(spec.min_fixed_cost, spec.max_fixed_cost))});
  }
  std::uniform_int_distribution<std::size_t> node(0, spec.nodes - 1);
  for (std::size_t k = 0; k < spec.commodities; ++k) {
    Commodity c;
    c.origin = node(rng);
    do {
      c.destination = node(rng);
    } while (c.destination == c.origin);
    c.demand = std::round(uniform(spec.min_demand, spec.max_demand));
    data.commodities.push_back(c);
  }
  data.unit_cost = DenseMatrix(data.arcs.size(), data.commodities.size());
  for (double& c : data.unit_cost.data) c = std::round(uniform(spec.min_unit_cost, spec.max_unit_cost));
  data.penalty = spec.penalty > 0.0 ? spec.penalty : default_cmnd_penalty(data.unit_cost);
  data.validate();
  return data;
}

}  // namespace learnbd
