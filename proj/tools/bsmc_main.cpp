#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bsmc/augment.hpp"
#include "bsmc/censor.hpp"
#include "bsmc/config.hpp"
#include "bsmc/gth.hpp"
#include "bsmc/matrix_io.hpp"
#include "bsmc/mg1.hpp"
#include "bsmc/models.hpp"
#include "bsmc/oracle.hpp"
#include "bsmc/rg_factorization.hpp"

namespace {

using namespace bsmc;

BlockMatrix damp(const BlockMatrix& p) {
  BlockMatrix out(p.row_phase_counts());
  for (int i = 0; i < p.num_levels(); ++i) {
    for (const BlockMatrix::Entry& e : p.row(i)) out.set_block(i, e.col, 0.5 * e.value);
    out.block_ref(i, i) += 0.5 * Eigen::MatrixXd::Identity(p.row_phases(i), p.row_phases(i));
  }
  return out;
}

int run_solve(const std::string& path, const std::string& method, double tol, long max_iter,
              const std::string& dump_prefix) {
  BlockMatrix m;
  try {
    m = io::read_block_matrix_file(path);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  try {
    StationaryVector pi;
    if (method == "gth") {
      pi = gth::solve(std::move(m));
    } else if (method == "rg") {
      const rgfact::RGFactors factors = rgfact::factorize(std::move(m));
      if (!dump_prefix.empty()) {
        io::write_block_matrix_file(dump_prefix + ".R.mat", factors.r_upper, "R measure");
        io::write_block_matrix_file(dump_prefix + ".G.mat", factors.g_lower, "G measure");
        BlockMatrix phi(factors.phase_counts());
        for (int k = 0; k < factors.num_levels(); ++k) phi.set_block(k, k, factors.phi[static_cast<size_t>(k)]);
        io::write_block_matrix_file(dump_prefix + ".Phi.mat", phi, "censored pivot blocks");
      }
      pi = rgfact::solve_by_factors(factors);
    } else {
      pi = oracle::power_iteration(damp(m), tol, max_iter);
    }
    io::print_stationary(std::cout, pi);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return 1;
  }
}

int run_table1(const std::string& config_path, std::vector<int> levels, int depth, int n_ref,
               const std::string& out_path, bool self_check) {
  try {
    const io::Config config = io::Config::read_file(config_path);
    const models::MxM1WvParams params = models::params_from_config(config);
    const mg1::MG1Spec spec = models::build_uniformized_spec(params);

    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.empty() || levels.front() < 1 || levels.back() >= n_ref) {
      throw std::invalid_argument("truncation levels must lie in [1, N_ref)");
    }

    std::cerr << "reference solve at N_ref = " << n_ref << "...\n";
    const oracle::ReferenceResult ref = oracle::reference_stationary(spec, n_ref, self_check);
    if (self_check) {
      std::cerr << "reference self-consistency (prefix l1 vs N_ref/2): "
                << io::format_double(ref.self_consistency_l1) << "\n";
    }
    const mg1::GColumnSeries g = mg1::g_columns(spec, depth);

    std::vector<augment::Table1Row> rows;
    for (int n : levels) {
      BlockMatrix lbca = augment::natural_lbca(spec, n);
      augment::RacmResult ra = augment::racm(spec, n, g);
      if (!is_irreducible(lbca) || !is_irreducible(ra.matrix)) {
        throw std::runtime_error("augmented matrix at N = " + std::to_string(n) + " is reducible");
      }
      augment::Table1Row row;
      row.truncation_level = n;
      row.lbca_error = augment::l1_truncation_error(gth::solve(std::move(lbca)), ref.pi);
      row.racm_error = augment::l1_truncation_error(gth::solve(std::move(ra.matrix)), ref.pi);
      row.improvement = row.lbca_error - row.racm_error;
      row.relative_rate_percent = row.lbca_error > 0 ? 100.0 * row.improvement / row.lbca_error : 0.0;
      rows.push_back(row);
      std::cerr << "N = " << n << ": LBCA " << io::format_double(row.lbca_error) << ", RA-CM "
                << io::format_double(row.racm_error) << "\n";
    }

    if (out_path == "-") {
      augment::write_table1_csv(std::cout, rows);
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      augment::write_table1_csv(out, rows);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "table1 failed: " << e.what() << "\n";
    return 1;
  }
}

int run_censor_depth(const std::string& config_path, int n, double eps, int ceiling) {
  try {
    const io::Config config = io::Config::read_file(config_path);
    const mg1::MG1Spec spec = models::build_uniformized_spec(models::params_from_config(config));
    try {
      const mg1::StopDepthReport report = mg1::stop_depth(spec, n, eps, ceiling);
      std::cout << "depth " << report.depth << "\n";
      std::cout << "bound " << io::format_double(report.bound) << "\n";
      std::cout << "captured_min " << io::format_double(report.min_captured) << "\n";
      std::cout << "captured_max " << io::format_double(report.max_captured) << "\n";
      return 0;
    } catch (const mg1::StopDepthCeilingError& e) {
      std::cerr << "censor-depth: " << e.what() << "\n";
      std::cerr << "best_bound " << io::format_double(e.best_bound) << "\n";
      return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "censor-depth failed: " << e.what() << "\n";
    return 1;
  }
}

int run_censor(const std::string& config_path, int n, std::optional<int> buffer, int guard,
               const std::string& out_path) {
  try {
    const io::Config config = io::Config::read_file(config_path);
    const mg1::MG1Spec spec = models::build_uniformized_spec(models::params_from_config(config));
    const oracle::DenseCensorResult result = oracle::dense_censor_oracle(spec, n, buffer, guard);
    std::cerr << "far-boundary fold mass: " << io::format_double(result.far_boundary_fold_mass)
              << "\n";
    if (out_path == "-") {
      io::write_block_matrix(std::cout, result.matrix, "dense censored matrix");
    } else {
      io::write_block_matrix_file(out_path, result.matrix, "dense censored matrix");
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "censor failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary distributions of block-structured Markov chains"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "solve a finite chain from a matrix file");
  std::string matrix_path;
  std::string method = "gth";
  double tol = 1e-13;
  long max_iter = 1000000;
  std::string dump_prefix;
  solve->add_option("matrix", matrix_path, "block matrix file")->required();
  solve->add_option("--method", method, "gth, rg or power")
      ->check(CLI::IsMember({"gth", "rg", "power"}));
  solve->add_option("--tol", tol, "power-iteration l1 tolerance");
  solve->add_option("--max-iter", max_iter, "power-iteration sweep cap");
  solve->add_option("--dump-factors", dump_prefix, "write RG factors to <prefix>.{R,Phi,G}.mat");

  auto* table1 = app.add_subcommand("table1", "LBCA vs RA-CM truncation-error comparison");
  std::string table_config;
  std::vector<int> levels{10, 15, 20, 25, 30, 35, 40, 50, 100, 200};
  int depth = 100;
  int n_ref = 3000;
  std::string out_path = "-";
  bool no_self_check = false;
  table1->add_option("config", table_config, "model config file")->required();
  table1->add_option("--N-list", levels, "truncation levels")->delimiter(',');
  table1->add_option("--M", depth, "censored-column truncation depth");
  table1->add_option("--N-ref", n_ref, "reference truncation level");
  table1->add_option("--out", out_path, "output CSV path ('-' for stdout)");
  table1->add_flag("--no-self-check", no_self_check, "skip the N_ref/2 reference self-check");

  auto* censor_depth = app.add_subcommand("censor-depth", "stopping depth for a target error bound");
  std::string depth_config;
  int depth_n = 10;
  double eps = 1e-6;
  int ceiling = 100000;
  censor_depth->add_option("config", depth_config, "model config file")->required();
  censor_depth->add_option("--N", depth_n, "censoring level");
  censor_depth->add_option("--eps", eps, "target bound");
  censor_depth->add_option("--ceiling", ceiling, "depth ceiling");

  auto* censor_cmd = app.add_subcommand("censor", "dense censored-matrix oracle dump");
  std::string censor_config;
  int censor_n = 10;
  int censor_buffer = -1;
  int censor_guard = 4000;
  std::string censor_out = "-";
  censor_cmd->add_option("config", censor_config, "model config file")->required();
  censor_cmd->add_option("--N", censor_n, "censoring level");
  censor_cmd->add_option("--buffer", censor_buffer, "truncation buffer above N (default N + 200)");
  censor_cmd->add_option("--guard", censor_guard, "complement-state memory guard");
  censor_cmd->add_option("--out", censor_out, "output matrix path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return run_solve(matrix_path, method, tol, max_iter, dump_prefix);
  if (table1->parsed()) return run_table1(table_config, levels, depth, n_ref, out_path, !no_self_check);
  if (censor_depth->parsed()) return run_censor_depth(depth_config, depth_n, eps, ceiling);
  if (censor_cmd->parsed()) {
    return run_censor(censor_config, censor_n,
                      censor_buffer > 0 ? std::optional<int>(censor_buffer) : std::nullopt,
                      censor_guard, censor_out);
  }
  return 1;
}
