#include "dvgan/discriminator.hpp"

#include "dvgan/rng.hpp"
#include "support/gradcheck.hpp"
#include "support/stats.hpp"

#include <doctest.h>

using namespace dvgan;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("temporal shift") {
  SUBCASE("zero shift is the identity") {
    Rng rng(1);
    const Mat frames = random_mat(6, 2, rng);
    CHECK((shift_frames(frames, 0) - frames).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("N=4 with s=+2 zero-pads the first two frames") {
    Mat frames(4, 1);
    frames << 1, 2, 3, 4;
    const Mat shifted = shift_frames(frames, 2);
    Mat expected(4, 1);
    expected << 0, 0, 1, 2;
    CHECK((shifted - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("negative shift pulls content earlier") {
    Mat frames(4, 1);
    frames << 1, 2, 3, 4;
    const Mat shifted = shift_frames(frames, -1);
    Mat expected(4, 1);
    expected << 2, 3, 4, 0;
    CHECK((shifted - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("shape preserved, exactly |s| frames zeroed") {
    Rng rng(2);
    Mat frames = random_mat(8, 3, rng).array() + 5.0;  // no accidental zeros
    for (Eigen::Index s = -4; s <= 4; ++s) {
      const Mat shifted = shift_frames(frames, s);
      CHECK(shifted.rows() == 8);
      CHECK(shifted.cols() == 3);
      long zero_rows = 0;
      for (Eigen::Index r = 0; r < 8; ++r)
        if (shifted.row(r).cwiseAbs().maxCoeff() == 0.0) ++zero_rows;
      CHECK(zero_rows == std::abs(s));
    }
  }
  SUBCASE("draws are uniform over N+1 values") {
    Rng rng(3);
    std::vector<long> counts(5, 0);
    for (int i = 0; i < 10000; ++i) ++counts[static_cast<size_t>(draw_shift(4, rng) + 2)];
    CHECK(teststat::uniform_chi2_ok(counts));
  }
  SUBCASE("graph-side shift matches the matrix-side shift") {
    Rng rng(4);
    const Mat frames = random_mat(8, 2, rng);
    for (Eigen::Index s : {-3, -1, 0, 2, 4}) {
      Graph g;
      Var shifted = shift_var(g, g.constant(frames), s);
      CHECK((g.value(shifted) - shift_frames(frames, s)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

namespace {

struct CnnFixture {
  CnnDiscriminator disc{"D.cnn", 16, 6, 8};
  ParameterStore params;
  Rng rng{5};
  CnnFixture() { disc.register_params(params, rng); }
};

}  // namespace

TEST_CASE("CNN discriminator emits log2(N)+1 validation scores") {
  CnnFixture fx;
  CHECK(fx.disc.validators() == 5);
  Graph g;
  GraphParams p(g, fx.params);
  const ValidationReport report =
      fx.disc.report(g, p, random_mat(16, 6, fx.rng), g.constant(random_mat(1, 8, fx.rng)));
  CHECK(report.scores.size() == 5);
  CHECK(report.weights.size() == 5);
  double combined = 0.0;
  for (size_t i = 0; i < report.scores.size(); ++i)
    combined += std::exp(report.weights[i]) * report.scores[i];
  CHECK(report.value == doctest::Approx(combined).epsilon(1e-12));
}

TEST_CASE("CNN discriminator with w=0 sums the scores") {
  CnnFixture fx;
  fx.params.at("D.cnn.w").setZero();
  Graph g;
  GraphParams p(g, fx.params);
  const ValidationReport report =
      fx.disc.report(g, p, random_mat(16, 6, fx.rng), g.constant(random_mat(1, 8, fx.rng)));
  double sum = 0.0;
  for (double s : report.scores) sum += s;
  CHECK(report.value == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("CNN discriminator with zero parameters scores zero") {
  CnnFixture fx;
  for (auto& [name, value] : fx.params.all()) value.setZero();
  Graph g;
  GraphParams p(g, fx.params);
  const ValidationReport report =
      fx.disc.report(g, p, random_mat(16, 6, fx.rng), g.constant(random_mat(1, 8, fx.rng)));
  CHECK(report.value == 0.0);
  for (double s : report.scores) CHECK(s == 0.0);
}

TEST_CASE("CNN discriminator rejects non-power-of-two input") {
  CnnDiscriminator disc{"D.cnn", 12, 3, 4};
  ParameterStore params;
  Rng rng(6);
  CHECK_THROWS_AS(disc.register_params(params, rng), std::invalid_argument);
}

TEST_CASE("level-i validator parameters feed only s_i") {
  CnnFixture fx;
  const Mat clip = random_mat(16, 6, fx.rng);
  const Mat h_txt = random_mat(1, 8, fx.rng);

  auto scores = [&]() {
    Graph g;
    GraphParams p(g, fx.params);
    return fx.disc.report(g, p, clip, g.constant(h_txt)).scores;
  };
  const std::vector<double> before = scores();
  for (int i = 0; i < fx.disc.validators(); ++i) {
    Mat& W = fx.params.at("D.cnn.val" + std::to_string(i) + ".h.W");
    const Mat saved = W;
    W.array() += 0.37;
    const std::vector<double> after = scores();
    for (int j = 0; j < fx.disc.validators(); ++j) {
      if (j == i)
        CHECK(after[static_cast<size_t>(j)] != before[static_cast<size_t>(j)]);
      else
        CHECK(after[static_cast<size_t>(j)] == before[static_cast<size_t>(j)]);
    }
    W = saved;
  }
}

TEST_CASE("CNN discriminator input gradients match finite differences") {
  CnnDiscriminator disc{"D.cnn", 4, 2, 4};
  ParameterStore params;
  Rng rng(7);
  disc.register_params(params, rng);
  Mat clip = random_mat(4, 2, rng);
  const Mat h_txt = random_mat(1, 4, rng);

  Mat analytic;
  {
    Graph g;
    GraphParams p(g, params);
    Var x = g.leaf(clip);
    Var y = disc.forward(g, p, x, g.constant(h_txt));
    analytic = g.value(g.gradients(y, {x})[0]);
  }
  auto value = [&]() {
    Graph g;
    GraphParams p(g, params);
    return g.value(disc.forward(g, p, g.constant(clip), g.constant(h_txt)))(0, 0);
  };
  const auto result = gradcheck::check_input(clip, value, analytic);
  CAPTURE(result.worst_at);
  CHECK(result.ok);
}

TEST_CASE("RNN discriminator") {
  RnnDiscriminator disc{"D.rnn", 3, 4};
  ParameterStore params;
  Rng rng(8);
  disc.register_params(params, rng);

  SUBCASE("constant clip zeroes every diff-encoder input") {
    // With the frame encoder ignored, a constant clip means all adjacent
    // differences vanish; probe by zeroing the diff-encoder bias so its
    // output is exactly the encoded zero vector.
    params.at("D.rnn.denc.b").setZero();
    Graph g;
    GraphParams p(g, params);
    Var clip = g.constant(Mat::Constant(5, 3, 1.25));
    const Eigen::Index n = g.rows(clip);
    Var diffs = g.sub(g.slice_rows(clip, 1, n), g.slice_rows(clip, 0, n - 1));
    Var encoded = linear(g, diffs, p["D.rnn.denc.W"], p["D.rnn.denc.b"]);
    CHECK(g.value(diffs).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.value(encoded).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("frame and diff pathways mean over N and N-1 scores") {
    Graph g;
    GraphParams p(g, params);
    Var s_a, s_d;
    disc.forward(g, p, g.constant(random_mat(5, 3, rng)), g.constant(random_mat(1, 4, rng)),
                 &s_a, &s_d);
    // Means are 1x1; the underlying pathways carry N and N-1 rows.
    CHECK(g.value(s_a).size() == 1);
    CHECK(g.value(s_d).size() == 1);
  }
  SUBCASE("zero parameters score zero") {
    for (auto& [name, value] : params.all()) value.setZero();
    Graph g;
    GraphParams p(g, params);
    const RnnValidationReport report =
        disc.report(g, p, random_mat(5, 3, rng), g.constant(random_mat(1, 4, rng)));
    CHECK(report.value == 0.0);
  }
  SUBCASE("y = w_A s_A + w_D s_D exactly") {
    Graph g;
    GraphParams p(g, params);
    const RnnValidationReport report =
        disc.report(g, p, random_mat(6, 3, rng), g.constant(random_mat(1, 4, rng)));
    CHECK(report.value ==
          doctest::Approx(report.frame_weight * report.frame_score +
                          report.diff_weight * report.diff_score)
              .epsilon(1e-12));
  }
  SUBCASE("too-short clips are rejected") {
    Graph g;
    GraphParams p(g, params);
    CHECK_THROWS_AS(
        disc.forward(g, p, g.constant(Mat::Zero(1, 3)), g.constant(Mat::Zero(1, 4))),
        std::invalid_argument);
  }
  SUBCASE("literal-equation reading validates encoded diffs") {
    RnnDiscriminator literal = disc;
    literal.validate_recurrent = false;
    const Mat clip = random_mat(5, 3, rng);
    const Mat h_txt = random_mat(1, 4, rng);
    Graph g;
    GraphParams p(g, params);
    const RnnValidationReport a = disc.report(g, p, clip, g.constant(h_txt));
    const RnnValidationReport b = literal.report(g, p, clip, g.constant(h_txt));
    CHECK(a.frame_score == b.frame_score);
    CHECK(a.diff_score != b.diff_score);
  }
}
