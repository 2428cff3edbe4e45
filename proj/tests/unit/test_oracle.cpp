#include <doctest.h>

#include <random>

#include "bsmc/augment.hpp"
#include "bsmc/censor.hpp"
#include "bsmc/gth.hpp"
#include "bsmc/models.hpp"
#include "bsmc/oracle.hpp"
#include "support/fixtures.hpp"

using namespace bsmc;

namespace {

BlockMatrix scalar_chain(const Eigen::MatrixXd& dense) {
  return BlockMatrix::from_dense(dense, std::vector<int>(static_cast<size_t>(dense.rows()), 1),
                                 std::vector<int>(static_cast<size_t>(dense.cols()), 1));
}

}  // namespace

TEST_CASE("power iteration on small chains") {
  Eigen::MatrixXd two(2, 2);
  two << 0.9, 0.1, 0.3, 0.7;
  const StationaryVector pi = oracle::power_iteration(scalar_chain(two));
  CHECK(pi.level(0)(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(pi.level(1)(0) == doctest::Approx(0.25).epsilon(1e-12));

  Eigen::MatrixXd sym(3, 3);
  sym << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  const StationaryVector uniform = oracle::power_iteration(scalar_chain(sym));
  for (int i = 0; i < 3; ++i) CHECK(uniform.level(i)(0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("power iteration error paths") {
  Eigen::MatrixXd slow(2, 2);
  slow << 0.999, 0.001, 0.0005, 0.9995;
  CHECK_THROWS_AS(oracle::power_iteration(scalar_chain(slow), 1e-13, 3), std::runtime_error);

  int polls = 0;
  auto cancel = [&polls]() { return ++polls > 2; };
  CHECK_THROWS_AS(oracle::power_iteration(scalar_chain(slow), 1e-13, 1000000, cancel),
                  std::runtime_error);
  CHECK(polls == 3);
}

TEST_CASE("power iteration agrees with GTH on a vacation-model truncation") {
  models::MxM1WvParams params;
  params.pmf_cutoff = 300;
  const mg1::MG1Spec spec = models::build_uniformized_spec(params);
  const BlockMatrix p = augment::natural_lbca(spec, 50);
  const StationaryVector by_power = oracle::power_iteration(p, 1e-14);
  const StationaryVector by_gth = gth::solve(p);
  CHECK(by_power.linf_distance(by_gth) <= 1e-10);
}

TEST_CASE("dense censor oracle") {
  const mg1::MG1Spec spec = bsmc::testing::qbd_fixture(0);
  const oracle::DenseCensorResult result = oracle::dense_censor_oracle(spec, 3, 150);
  CHECK(result.matrix.num_levels() == 4);
  CHECK(result.matrix.max_row_sum_deviation() <= 1e-12);
  CHECK(result.far_boundary_fold_mass > 0.0);

  CHECK_THROWS_AS(oracle::dense_censor_oracle(spec, 3, 5000, 4000), std::invalid_argument);

  // Composition on the buffer chain: censoring in one step equals censoring
  // through an intermediate prefix.
  const BlockMatrix buffer_chain = augment::natural_lbca(spec, 40);
  CHECK(censor::censor_composition_check(buffer_chain, 12, 3) <= 1e-12);

  // Scalar upper-Hessenberg: the oracle is exactly the LBCA corner.
  const mg1::MG1Spec scalar = bsmc::testing::scalar_hessenberg_spec();
  const BlockMatrix censored = oracle::dense_censor_oracle(scalar, 4, 200).matrix;
  CHECK((censored.to_dense() - augment::natural_lbca(scalar, 4).to_dense()).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("reference stationary distribution") {
  const mg1::MG1Spec spec = bsmc::testing::qbd_fixture(0);
  const oracle::ReferenceResult ref = oracle::reference_stationary(spec, 80);
  CHECK(ref.pi.total() == doctest::Approx(1.0).epsilon(1e-13));
  // All the stationary mass sits far below the truncation: the half-depth
  // reference agrees to rounding.
  CHECK(ref.self_consistency_l1 >= 0.0);
  CHECK(ref.self_consistency_l1 <= 1e-10);

  const oracle::ReferenceResult quick = oracle::reference_stationary(spec, 80, false);
  CHECK(quick.self_consistency_l1 == -1.0);
  CHECK(quick.pi.linf_distance(ref.pi) == 0.0);
}

TEST_CASE("power iteration and GTH agree across a random corpus") {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 20; ++rep) {
    const BlockMatrix p = bsmc::testing::random_dense_chain(rng, 6, 3);
    CHECK(oracle::power_iteration(p).linf_distance(gth::solve(p)) <= 1e-10);
  }
}
