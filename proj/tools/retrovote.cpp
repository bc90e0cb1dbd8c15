// retrovote: command-line front end.
//
//   retrovote simulate [flags]            run the Monte Carlo campaign
//   retrovote oracle <name> [flags]       closed-form attack oracles
//   retrovote serve [--port N]            local HTTP API

#include "retrovote/attacks.hpp"
#include "retrovote/engine.hpp"
#include "retrovote/prefgen.hpp"
#include "retrovote/report_json.hpp"
#include "retrovote/service.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace retrovote;

constexpr int kExitInvalidConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitRunFailure = 3;

struct SimulateArgs {
  SimulationConfig config;
  std::string config_path;
  std::string preferences_path;
  std::string out_path = "report.json";
  std::string distribution = "pareto";
  std::string pareto_variant = "lomax";
  std::string selection = "top_by_supporters";
  std::string budget_mode = "budget_preserving";
  unsigned workers = 0;
  bool include_scores = false;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

void print_table(const SimulationReport& report, std::ostream& os) {
  os << std::left << std::setw(12) << "mechanism";
  for (auto scenario : kScenarios) os << std::right << std::setw(18) << to_string(scenario);
  os << '\n';
  for (auto mechanism : kReportedMechanisms) {
    os << std::left << std::setw(12) << to_string(mechanism);
    for (auto scenario : kScenarios) {
      os << std::right << std::setw(18) << std::setprecision(6) << report.cell(mechanism, scenario).stats.mean;
    }
    os << '\n';
  }
  os << "iterations: " << report.completed_iterations << " completed, " << report.failed_iterations
     << " failed; " << std::setprecision(3) << report.runtime_seconds << " s\n";
}

int run_simulate(SimulateArgs& args, const CLI::App& sub) {
  SimulationConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << args.config_path << '\n';
      return kExitIo;
    }
    try {
      config = config_from_json(nlohmann::json::parse(in));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInvalidConfig;
    }
  }

  // Explicit flags override the config document.
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  const auto& f = args.config;
  if (given("--voters")) config.n_voters = f.n_voters;
  if (given("--projects")) config.n_projects = f.n_projects;
  if (given("--tokens")) config.total_tokens = f.total_tokens;
  if (given("--iterations")) config.iterations = f.iterations;
  if (given("--seed")) config.seed = f.seed;
  if (given("--epsilon")) config.epsilon = f.epsilon;
  if (given("--constant")) config.normalization_constant = f.normalization_constant;
  if (given("--alpha")) config.distribution.alpha = f.distribution.alpha;
  if (given("--mu")) config.distribution.mu = f.distribution.mu;
  if (given("--sigma")) config.distribution.sigma = f.distribution.sigma;
  if (given("--attackers")) config.voter_attack.attacker_count = f.voter_attack.attacker_count;
  if (given("--quadratic-attackers")) {
    config.voter_attack.quadratic_attacker_count = f.voter_attack.quadratic_attacker_count;
  }
  if (given("--colluding")) config.project_attack.colluding_count = f.project_attack.colluding_count;
  try {
    if (given("--distribution")) config.distribution.kind = parse_distribution_kind(args.distribution);
    if (given("--pareto-variant")) config.distribution.variant = parse_pareto_variant(args.pareto_variant);
    if (given("--selection")) config.project_attack.selection = parse_selection(args.selection);
    if (given("--budget-mode")) config.project_attack.budget_mode = parse_budget_mode(args.budget_mode);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  RunOptions options;
  options.workers = args.workers;
  if (!args.preferences_path.empty()) {
    try {
      options.preferences = load_preference_matrix(args.preferences_path);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitIo;
    }
  }

  SimulationReport report;
  try {
    report = run_simulation(config, options);
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRunFailure;
  }

  std::ofstream out(args.out_path);
  out << report_to_json(report, args.include_scores).dump(2) << '\n';
  if (!out) {
    std::cerr << "error: cannot write " << args.out_path << '\n';
    return kExitIo;
  }
  print_table(report, std::cout);
  std::cout << "report: " << args.out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retroactive funding vote simulator: aggregation mechanisms, collusion attacks, PMS"};
  app.require_subcommand(1);

  // --- simulate ---
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo manipulation campaign");
  simulate->add_option("--config", sim.config_path, "JSON request document; flags override its fields");
  simulate->add_option("--voters", sim.config.n_voters, "Number of voters")->capture_default_str();
  simulate->add_option("--projects", sim.config.n_projects, "Number of projects")->capture_default_str();
  simulate->add_option("--tokens", sim.config.total_tokens, "Total tokens T")->capture_default_str();
  simulate->add_option("--iterations", sim.config.iterations, "Monte Carlo iterations")->capture_default_str();
  simulate->add_option("--seed", sim.config.seed, "Master seed")->capture_default_str();
  simulate->add_option("--epsilon", sim.config.epsilon, "Minimum vote used by attackers")->capture_default_str();
  simulate->add_option("--constant", sim.config.normalization_constant, "Weight normalization constant c")
      ->capture_default_str();
  simulate->add_option("--distribution", sim.distribution, "pareto | uniform | gaussian")->capture_default_str();
  simulate->add_option("--alpha", sim.config.distribution.alpha, "Pareto shape")->capture_default_str();
  simulate->add_option("--pareto-variant", sim.pareto_variant, "lomax | standard")->capture_default_str();
  simulate->add_option("--mu", sim.config.distribution.mu, "Gaussian mean")->capture_default_str();
  simulate->add_option("--sigma", sim.config.distribution.sigma, "Gaussian std")->capture_default_str();
  simulate->add_option("--attackers", sim.config.voter_attack.attacker_count, "Mean/median voter attackers")
      ->capture_default_str();
  simulate->add_option("--quadratic-attackers", sim.config.voter_attack.quadratic_attacker_count,
                       "Quadratic colluders (pairs)")
      ->capture_default_str();
  simulate->add_option("--colluding", sim.config.project_attack.colluding_count, "Colluding projects")
      ->capture_default_str();
  simulate->add_option("--selection", sim.selection, "top_by_supporters | random_pair")->capture_default_str();
  simulate->add_option("--budget-mode", sim.budget_mode, "budget_preserving | literal")->capture_default_str();
  simulate->add_option("--preferences", sim.preferences_path, "CSV preference matrix used for every iteration");
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = hardware concurrency)");
  simulate->add_option("--out", sim.out_path, "Report path")->capture_default_str();
  simulate->add_flag("--include-scores", sim.include_scores, "Embed per-iteration scores in the report");

  // --- oracle ---
  auto* oracle = app.add_subcommand("oracle", "Closed-form attack oracles with brute-force checks");
  oracle->require_subcommand(1);
  double tokens = 100.0;
  auto* collusion = oracle->add_subcommand("quadratic-collusion", "Two-voter quadratic collusion gain");
  collusion->add_option("--tokens", tokens, "Tokens per voter")->capture_default_str();

  int n = 1;
  int k = 0;
  std::string allocs_text;
  double epsilon = 0.0;
  auto* mean_phantom = oracle->add_subcommand("mean-phantom", "Mean phantom-vote ratio n/(n+k)");
  mean_phantom->add_option("--n", n, "Honest non-zero allocations");
  mean_phantom->add_option("--k", k, "Adversaries")->required();
  mean_phantom->add_option("--allocs", allocs_text, "Comma-separated honest allocations (default: n ones)");
  mean_phantom->add_option("--epsilon", epsilon, "Phantom vote size (default 1e-12)");

  auto* median_phantom = oracle->add_subcommand("median-phantom", "Median phantom-vote order-statistic bound");
  median_phantom->add_option("--allocs", allocs_text, "Comma-separated honest allocations")->required();
  median_phantom->add_option("--k", k, "Adversaries")->required();
  median_phantom->add_option("--epsilon", epsilon, "Phantom vote size (default min(allocs) * 1e-9)");

  // --- serve ---
  int port = default_port();
  std::string host = "127.0.0.1";
  unsigned concurrency = 2;
  unsigned serve_workers = 0;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--port", port, "Port (env RETROVOTE_PORT, default 8080)")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--concurrency", concurrency, "Simulations allowed to run at once")->capture_default_str();
  serve->add_option("--workers", serve_workers, "Worker threads per simulation");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return run_simulate(sim, *simulate);

  std::cout << std::setprecision(8);
  try {
    if (collusion->parsed()) {
      const auto o = quadratic_collusion_oracle(tokens);
      const auto g = quadratic_split_grid_search(tokens);
      std::cout << "honest_utility " << o.honest_utility << '\n'
                << "collusion_utility " << o.collusion_utility << '\n'
                << "gain_ratio " << o.gain_ratio << '\n'
                << "grid_best_split " << g.best_split << '\n'
                << "grid_best_utility " << g.best_utility << '\n';
      return 0;
    }
    if (mean_phantom->parsed()) {
      std::vector<double> allocs = allocs_text.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(n, 1)), 1.0)
                                                       : parse_list(allocs_text);
      const int count = static_cast<int>(allocs.size());
      const double eps = epsilon > 0.0 ? epsilon : 1e-12;
      const double before = mean_phantom_empirical(allocs, 0, eps);
      const double after = mean_phantom_empirical(allocs, k, eps);
      std::cout << "ratio " << mean_phantom_ratio(count, k) << '\n'
                << "empirical_mean_before " << before << '\n'
                << "empirical_mean_after " << after << '\n'
                << "empirical_ratio " << after / before << '\n';
      return 0;
    }
    if (median_phantom->parsed()) {
      std::vector<double> allocs = parse_list(allocs_text);
      const PhantomOracleInput input(allocs, k);
      const double eps = epsilon > 0.0 ? epsilon : input.allocations().front() * 1e-9;
      const auto bound = median_phantom_bound(input);
      std::cout << "bound " << bound.bound_value << '\n'
                << "bound_index " << bound.bound_index << '\n'
                << "median_index " << bound.median_index << '\n'
                << "saturated " << (bound.saturated ? "true" : "false") << '\n'
                << "empirical " << median_phantom_empirical(input.allocations(), k, eps) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  if (serve->parsed()) {
    SimulationService service(concurrency, serve_workers);
    HttpServer server(service);
    const int bound = server.bind(host, port);
    if (bound < 0) {
      std::cerr << "error: cannot bind " << host << ':' << port << '\n';
      return kExitIo;
    }
    std::cout << "listening on http://" << host << ':' << bound << std::endl;
    return server.listen() ? 0 : kExitIo;
  }
  return 0;
}
