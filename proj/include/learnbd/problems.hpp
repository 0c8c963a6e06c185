#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "learnbd/lp.hpp"
#include "learnbd/mip.hpp"

namespace learnbd {

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// ---------------------------------------------------------------------------
// Generic two-stage representation

/// Scenario-independent part of a recourse problem
///   Q(x) = min q·y  s.t.  W y (rel) h − T x,  y >= 0.
/// Recourse variables are nonnegative and unbounded above, so the row duals
/// alone certify Q(x) = π·(h − T x).
struct RecourseBlock {
  DenseMatrix recourse_matrix;  // W: rows × recourse vars
  DenseMatrix technology;       // T: rows × first-stage vars
  std::vector<double> recourse_cost;
  std::vector<Relation> relations;
};

struct Scenario {
  double probability = 0.0;
  std::vector<double> rhs;  // h_ω
  std::shared_ptr<const RecourseBlock> block;
};

/// min c·x + Σ_ω p_ω Q_ω(x) over binary x.
struct TwoStageProblem {
  std::string name;
  std::vector<double> first_stage_cost;
  std::vector<Scenario> scenarios;
  /// Lower bound on θ_ω used by the master problem (0 when Q_ω >= 0).
  std::vector<double> theta_lower;

  std::size_t num_binaries() const { return first_stage_cost.size(); }
  std::size_t num_scenarios() const { return scenarios.size(); }

  /// Dimensional consistency, probabilities summing to one, finite data.
  void validate() const;
};

/// LP whose optimum is Q_ω(x): min q·y s.t. W y (rel) h − T x, y >= 0.
LpInstance recourse_lp(const TwoStageProblem& problem, std::size_t scenario, const std::vector<double>& x);

/// Q_ω(x); throws SolverError when the recourse LP is not feasible and bounded.
double recourse_value(const TwoStageProblem& problem, std::size_t scenario, const std::vector<double>& x);

/// c·x + Σ_ω p_ω Q_ω(x).
double evaluate_first_stage(const TwoStageProblem& problem, const std::vector<double>& x);

/// The monolithic MIP over x and every scenario's recourse variables.
MipInstance extensive_form(const TwoStageProblem& problem);

// ---------------------------------------------------------------------------
// Scenarios

struct ScenarioSet {
  std::vector<std::vector<double>> demands;
  std::vector<double> probabilities;
  std::uint64_t seed = 0;
  double sigma_ratio = 0.0;

  std::size_t size() const { return demands.size(); }
  void validate(std::size_t dimension) const;
};

/// Negative Normal draws become 0.
inline double clamp_demand(double draw) { return draw < 0.0 ? 0.0 : draw; }

/// Independent Normal(nominal, sigma_ratio·nominal) demands, uniform probabilities.
ScenarioSet sample_scenarios(const std::vector<double>& nominal, double sigma_ratio, std::size_t count,
                             std::uint64_t seed);

/// Every scenario equal to the nominal vector (deterministic problem).
ScenarioSet nominal_scenario(const std::vector<double>& nominal);

/// CSV: header d0,...,d{n-1},probability; one row per scenario.
void write_scenarios_csv(std::ostream& out, const ScenarioSet& set);
ScenarioSet read_scenarios_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Capacitated facility location

struct Facility {
  double capacity = 0.0;
  double setup_cost = 0.0;
};

struct Customer {
  double demand = 0.0;
  double penalty = 0.0;  // lost-sale cost per unit
};

struct CflpData {
  std::vector<Facility> facilities;
  std::vector<Customer> customers;
  DenseMatrix unit_cost;  // facilities × customers

  std::vector<double> nominal_demand() const;
  void validate() const;
};

/// First stage opens facilities; recourse ships y_ij (index i·|F| + j) and
/// records lost sales α_j. Rows: capacity Σ_j y_ij − u_i x_i <= 0 for each
/// facility, then demand Σ_i y_ij + α_j >= d_ωj for each customer.
TwoStageProblem build_cflp(const CflpData& data, const ScenarioSet& scenarios);

struct CapParseOptions {
  /// ρ_j = penalty_factor · max_i c_ij (cap files carry no lost-sale cost).
  double penalty_factor = 2.0;
};

/// OR-Library cap format: "m n", m × (capacity fixed_cost), then per customer
/// a demand followed by m whole-demand allocation costs. Allocation costs are
/// converted to unit costs by dividing by the demand.
CflpData parse_orlib_cap(std::istream& in, const CapParseOptions& options = {});
void write_orlib_cap(std::ostream& out, const CflpData& data);

/// Random instance in the style of the OR-Library capacitated sets: points in
/// the unit square, distance-proportional costs, equal capacities chosen so
/// that the fleet covers `capacity_ratio` times total nominal demand.
struct CflpGeneratorSpec {
  std::size_t facilities = 16;
  std::size_t customers = 50;
  double capacity_ratio = 1.4;
  double setup_cost = 7500.0;
  double min_demand = 50.0;
  double max_demand = 2000.0;
  double cost_scale = 20.0;
  double penalty_factor = 2.0;
};
CflpData generate_cflp(const CflpGeneratorSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Fixed-charge multicommodity network design

struct Arc {
  std::size_t tail = 0;
  std::size_t head = 0;
  double capacity = 0.0;
  double fixed_cost = 0.0;
};

struct Commodity {
  std::size_t origin = 0;
  std::size_t destination = 0;
  double demand = 0.0;
};

struct CmndData {
  std::size_t nodes = 0;
  std::vector<Arc> arcs;
  std::vector<Commodity> commodities;
  DenseMatrix unit_cost;  // arcs × commodities
  double penalty = 0.0;   // B, cost per unit of unmet flow balance

  std::vector<double> nominal_demand() const;
  void validate() const;
};

/// B defaults to 1e4 × the largest arc unit cost (1e4 when all costs are 0).
double default_cmnd_penalty(const DenseMatrix& unit_cost);

/// First stage installs arcs; recourse routes y_a^k (index a·|K| + k) and
/// records per-node slack α_i^k (index |A||K| + i·|K| + k) at cost B.
/// Rows: flow balance inflow − outflow + α >= −d̃_i^k for every (node,
/// commodity), with d̃ = v_k at the origin and −v_k at the destination, so the
/// destination must receive v_k unless slack is paid; then arc capacity
/// Σ_k y_a^k − u_a x_a <= 0.
TwoStageProblem build_cmnd(const CmndData& data, const ScenarioSet& scenarios);

/// JSON instance format, see docs/formats.md.
CmndData parse_cmnd_json(std::istream& in);
void write_cmnd_json(std::ostream& out, const CmndData& data);

struct CmndGeneratorSpec {
  std::size_t nodes = 5;
  std::size_t arcs = 10;
  std::size_t commodities = 3;
  double min_demand = 5.0;
  double max_demand = 20.0;
  double min_unit_cost = 1.0;
  double max_unit_cost = 10.0;
  double min_fixed_cost = 20.0;
  double max_fixed_cost = 80.0;
  double min_capacity = 10.0;
  double max_capacity = 40.0;
  /// 0 selects default_cmnd_penalty.
  double penalty = 0.0;
};
CmndData generate_cmnd(const CmndGeneratorSpec& spec, std::uint64_t seed);

}  // namespace learnbd
