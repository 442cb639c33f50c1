#include "dvgan/metrics.hpp"

#include "dvgan/generator.hpp"
#include "dvgan/rng.hpp"
#include "dvgan/rotation.hpp"
#include "dvgan/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace dvgan;

TEST_CASE("inception score of uniform posteriors is zero") {
  const Mat posteriors = Mat::Constant(8, 15, 1.0 / 15.0);
  const InceptionStats stats = inception_from_posteriors(posteriors);
  CHECK(std::abs(stats.score) < 1e-9);
}

TEST_CASE("one-hot posteriors covering K=15 actions reach ln 15") {
  Mat posteriors = Mat::Zero(15, 15);
  for (Eigen::Index i = 0; i < 15; ++i) posteriors(i, i) = 1.0;
  const InceptionStats stats = inception_from_posteriors(posteriors);
  CHECK(std::abs(stats.score - std::log(15.0)) < 1e-9);
}

TEST_CASE("two-clip (0.9,0.1)/(0.1,0.9) case evaluates to about 0.368") {
  Mat posteriors(2, 2);
  posteriors << 0.9, 0.1, 0.1, 0.9;
  const InceptionStats stats = inception_from_posteriors(posteriors);
  const double expected = std::log(2.0) - (-0.9 * std::log(0.9) - 0.1 * std::log(0.1));
  CHECK(std::abs(stats.score - 0.368) < 1e-3);
  CHECK(stats.score == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("inception score is invariant to per-clip score shifts") {
  Rng rng(1);
  Mat scores(6, 5);
  for (Eigen::Index r = 0; r < 6; ++r)
    for (Eigen::Index c = 0; c < 5; ++c) scores(r, c) = rng.normal();
  const double base = inception_from_scores(scores).score;
  Mat shifted = scores;
  for (Eigen::Index r = 0; r < 6; ++r) shifted.row(r).array() += 10.0 * rng.normal();
  CHECK(inception_from_scores(shifted).score == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("inception score stays within [0, ln K]") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index k = 2 + rng.uniform_int(0, 8);
    Mat scores(4 + rng.uniform_int(0, 8), k);
    for (Eigen::Index r = 0; r < scores.rows(); ++r)
      for (Eigen::Index c = 0; c < k; ++c) scores(r, c) = 3.0 * rng.normal();
    const InceptionStats stats = inception_from_scores(scores);
    CHECK(stats.score >= -1e-9);
    CHECK(stats.score <= std::log(static_cast<double>(k)) + 1e-9);
  }
}

TEST_CASE("posterior rows must sum to one") {
  Mat bad = Mat::Constant(2, 3, 0.5);
  CHECK_THROWS_AS(inception_from_posteriors(bad), std::invalid_argument);
}

TEST_CASE("recall_at_k") {
  SUBCASE("K = k is always 100%") {
    Mat scores(3, 3);
    scores.setRandom();
    CHECK(recall_at_k(scores, {0, 1, 2}, 3) == 100.0);
  }
  SUBCASE("diagonal-dominant scores give R@1 = 100%") {
    Mat scores = Mat::Identity(3, 3);
    CHECK(recall_at_k(scores, {0, 1, 2}, 1) == 100.0);
  }
  SUBCASE("hand-enumerated example") {
    Mat scores(2, 3);
    scores << 0.1, 0.9, 0.0,
              0.8, 0.1, 0.1;
    CHECK(recall_at_k(scores, {0, 0}, 1) == 50.0);
    CHECK(recall_at_k(scores, {0, 0}, 2) == 100.0);
  }
  SUBCASE("ties break toward the lower candidate index") {
    Mat scores(1, 3);
    scores << 0.5, 0.5, 0.5;
    CHECK(recall_at_k(scores, {0}, 1) == 100.0);  // index 0 wins the tie
    CHECK(recall_at_k(scores, {2}, 1) == 0.0);
    CHECK(recall_at_k(scores, {2}, 3) == 100.0);
  }
  SUBCASE("monotone non-decreasing in k") {
    Rng rng(3);
    Mat scores(8, 6);
    for (Eigen::Index r = 0; r < 8; ++r)
      for (Eigen::Index c = 0; c < 6; ++c) scores(r, c) = rng.normal();
    std::vector<int> truth;
    for (int q = 0; q < 8; ++q) truth.push_back(static_cast<int>(rng.uniform_int(0, 5)));
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double r = recall_at_k(scores, truth, k);
      CHECK(r >= prev);
      prev = r;
    }
  }
  SUBCASE("k beyond K is rejected") {
    Mat scores(1, 2);
    scores << 1.0, 0.0;
    CHECK_THROWS_AS(recall_at_k(scores, {0}, 3), std::invalid_argument);
  }
}

TEST_CASE("zero-velocity baseline") {
  SUBCASE("one seed frame gives a constant clip") {
    Mat seed(1, 3);
    seed << 1.0, 2.0, 3.0;
    const Mat out = zero_velocity_baseline(seed, 5);
    for (Eigen::Index f = 0; f < 5; ++f)
      CHECK((out.row(f) - seed.row(0)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("continuation repeats the last seed frame") {
    Mat seed(3, 2);
    seed << 1, 2, 3, 4, 5, 6;
    const Mat out = zero_velocity_baseline(seed, 6);
    CHECK((out.topRows(3) - seed).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index f = 3; f < 6; ++f)
      CHECK((out.row(f) - seed.row(2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("empty seed is rejected") {
    CHECK_THROWS_AS(zero_velocity_baseline(Mat(0, 3), 5), std::invalid_argument);
  }
}

TEST_CASE("horizon frame arithmetic: 80 ms at 12.5 Hz is frame 1") {
  CHECK(horizon_frame(80.0, 12.5) == 1);
  CHECK(horizon_frame(400.0, 12.5) == 5);
  CHECK(horizon_frame(0.0, 12.5) == 0);
  CHECK(horizon_frame(250.0, 4.0) == 1);
}

namespace {

Mat random_expmap_frames(Eigen::Index n, Eigen::Index m, Rng& rng) {
  Mat frames(n, m);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < m; ++c) frames(r, c) = 0.5 * rng.normal();
  return frames;
}

}  // namespace

TEST_CASE("completion error") {
  const Skeleton skeleton = synthetic_skeleton();
  Rng rng(4);
  const Mat truth = random_expmap_frames(10, 6, rng);

  SUBCASE("perfect prediction scores zero at every horizon") {
    const auto errors = completion_error(truth, truth, skeleton, 12.5, {0, 80, 160, 320});
    for (double e : errors) CHECK(e == 0.0);
  }
  SUBCASE("zero-velocity baseline error matches an independent oracle") {
    const Mat seed = truth.topRows(3);
    const Mat baseline = zero_velocity_baseline(seed, 10);
    // Align both clips at the last seed frame (frame 2).
    const Mat pred_tail = baseline.bottomRows(8);
    const Mat truth_tail = truth.bottomRows(8);
    const std::vector<double> horizons = {80, 160, 320, 400};
    const auto errors = completion_error(pred_tail, truth_tail, skeleton, 12.5, horizons);

    // Oracle: direct euler conversion of the repeated frame vs truth.
    for (size_t h = 0; h < horizons.size(); ++h) {
      const Eigen::Index f = horizon_frame(horizons[h], 12.5);
      double sq = 0.0;
      for (int joint = 0; joint < 2; ++joint) {
        const Eigen::Index base = 3 * joint;
        const EulerOrder order = EulerOrder::from_string("zxy");
        const Eigen::Vector3d vp(pred_tail(f, base), pred_tail(f, base + 1),
                                 pred_tail(f, base + 2));
        const Eigen::Vector3d vt(truth_tail(f, base), truth_tail(f, base + 1),
                                 truth_tail(f, base + 2));
        const Eigen::Vector3d ep = rotmat_to_euler(expmap_to_rotmat(vp), order);
        const Eigen::Vector3d et = rotmat_to_euler(expmap_to_rotmat(vt), order);
        sq += (ep - et).squaredNorm();
      }
      CHECK(errors[h] == doctest::Approx(std::sqrt(sq)).epsilon(1e-9));
    }
  }
  SUBCASE("error at horizon 0 is zero for any aligned prediction") {
    const Mat seed = truth.topRows(4);
    const Mat baseline = zero_velocity_baseline(seed, 10);
    const auto errors =
        completion_error(baseline.bottomRows(7), truth.bottomRows(7), skeleton, 12.5, {0.0});
    CHECK(errors[0] == 0.0);
  }
  SUBCASE("horizon beyond the clip is rejected") {
    CHECK_THROWS_AS(completion_error(truth, truth, skeleton, 12.5, {10000.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("zero-velocity baseline equals the RNN generator with a zeroed diff decoder") {
  RnnGenerator gen{"G.rnn", 16, 6, 8, true};
  ParameterStore params;
  Rng rng(5);
  gen.register_params(params, rng);
  params.at("G.rnn.diff.W").setZero();
  params.at("G.rnn.diff.b").setZero();

  Mat seed(5, 6);
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index c = 0; c < 6; ++c) seed(r, c) = rng.normal();

  Graph g;
  GraphParams p(g, params);
  const LatentStack z = LatentStack::sample_rnn(16, gen.hidden, rng);
  Mat h_txt(1, 8);
  for (Eigen::Index i = 0; i < 8; ++i) h_txt(0, i) = rng.normal();
  const Mat completed = g.value(gen.forward_completion(g, p, z, g.constant(h_txt), seed));
  const Mat baseline = zero_velocity_baseline(seed, 16);
  CHECK((completed - baseline).cwiseAbs().maxCoeff() < 1e-6);
}
