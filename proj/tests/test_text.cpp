#include "dvgan/text.hpp"

#include "dvgan/rng.hpp"
#include "support/gradcheck.hpp"

#include <doctest.h>

#include <cstdio>

using namespace dvgan;

TEST_CASE("tokenize basics") {
  Vocabulary vocab = Vocabulary::build({"walk on uneven terrain", "walking"});

  SUBCASE("single word lowercased") {
    const ActionDescription d = tokenize("Walking", vocab);
    REQUIRE(d.tokens.size() == 1);
    CHECK(vocab.word(d.tokens[0]) == "walking");
  }
  SUBCASE("four-word action splits into four tokens") {
    const ActionDescription d = tokenize("walk on uneven terrain", vocab);
    CHECK(d.tokens.size() == 4);
    for (int t : d.tokens) CHECK(t != Vocabulary::kUnk);
  }
  SUBCASE("unseen words map to UNK") {
    const ActionDescription d = tokenize("straight walk", vocab);
    REQUIRE(d.tokens.size() == 2);
    CHECK(d.tokens[0] == Vocabulary::kUnk);
    CHECK(vocab.word(d.tokens[1]) == "walk");
  }
  SUBCASE("punctuation is stripped") {
    const ActionDescription d = tokenize("Walk, (on) terrain!", vocab);
    CHECK(d.tokens.size() == 3);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(tokenize("  ... ", vocab), std::invalid_argument);
  }
}

TEST_CASE("vocabulary serializes as index<TAB>word with reserved entries first") {
  Vocabulary vocab = Vocabulary::build({"walk fast"});
  const std::string path = "/tmp/dvgan_vocab_test.tsv";
  vocab.save(path);
  const Vocabulary loaded = Vocabulary::load(path);
  CHECK(loaded == vocab);
  CHECK(loaded.word(0) == "<pad>");
  CHECK(loaded.word(1) == "<unk>");
  CHECK(loaded.index("walk") == vocab.index("walk"));
  std::remove(path.c_str());
}

namespace {

struct EncoderFixture {
  ParameterStore params;
  TextEncoder encoder;
  EncoderFixture(int vocab, Eigen::Index k, std::uint64_t seed) {
    encoder = TextEncoder{"txt", vocab, k};
    Rng rng(seed);
    encoder.register_params(params, rng);
  }
  Mat encode(const std::vector<int>& tokens) {
    Graph g;
    GraphParams p(g, params);
    return g.value(encoder.encode(g, p, tokens));
  }
};

}  // namespace

TEST_CASE("encode_text output dimensions follow the configuration") {
  SUBCASE("k=256 GAN configuration") {
    EncoderFixture fx(10, 256, 1);
    const Mat h = fx.encode({2, 3});
    CHECK(h.rows() == 1);
    CHECK(h.cols() == 256);
    CHECK(h.allFinite());
  }
  SUBCASE("k=1024 ranker configuration") {
    EncoderFixture fx(10, 1024, 2);
    const Mat h = fx.encode({4});
    CHECK(h.cols() == 1024);
    CHECK(h.allFinite());
  }
}

TEST_CASE("identical sentences encode bitwise identically") {
  EncoderFixture fx(12, 16, 3);
  const Mat a = fx.encode({2, 5, 7});
  const Mat b = fx.encode({2, 5, 7});
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("token order matters") {
  EncoderFixture fx(12, 16, 4);
  const Mat ab = fx.encode({2, 3});
  const Mat ba = fx.encode({3, 2});
  CHECK((ab - ba).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("empty token list is rejected") {
  EncoderFixture fx(4, 8, 5);
  CHECK_THROWS_AS(fx.encode({}), std::invalid_argument);
}

TEST_CASE("word-embedding gradients match finite differences") {
  EncoderFixture fx(6, 5, 6);
  const std::vector<int> tokens = {2, 4, 2};

  auto build = [&](Graph& g, GraphParams& p) {
    Var h = fx.encoder.encode(g, p, tokens);
    return g.sum_all(g.mul(h, h));
  };
  std::map<std::string, Mat> analytic;
  {
    Graph g;
    GraphParams p(g, fx.params);
    analytic = p.gradients(build(g, p));
  }
  auto loss = [&]() {
    Graph g;
    GraphParams p(g, fx.params);
    return g.value(build(g, p))(0, 0);
  };
  // The embedding table gradient is the focus; the rest rides along.
  const auto result = gradcheck::check_params(fx.params, loss, analytic);
  CAPTURE(result.worst_at);
  CHECK(result.ok);
}
