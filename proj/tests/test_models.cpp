#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "agan/losses.hpp"
#include "agan/models.hpp"
#include "agan/rng.hpp"

using namespace agan;

namespace {

GeneratorSpec tiny_gen_spec() {
  GeneratorSpec s;
  s.z_dim = 8;
  s.num_classes = 10;
  s.output_shape = {28, 28, 1};
  s.hidden_sizes = {32};
  return s;
}

bool params_equal(std::vector<Parameter<float>*> a,
                  std::vector<Parameter<float>*> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]->value.vec() != b[i]->value.vec()) return false;
  return true;
}

}  // namespace

TEST_CASE("instantiation is deterministic in the seed") {
  Generator a(tiny_gen_spec(), 42), b(tiny_gen_spec(), 42), c(tiny_gen_spec(), 43);
  CHECK(params_equal(a.parameters(), b.parameters()));
  CHECK_FALSE(params_equal(a.parameters(), c.parameters()));
}

TEST_CASE("mlp generator's final dense layer emits H*W*C values") {
  Generator g(tiny_gen_spec(), 1);
  auto rng = make_rng(5);
  Tensor<float> z = sample_noise(3, 8, rng);
  Tensor<float> img = g.generate({1, 2, 3}, z);
  CHECK(img.shape() == std::vector<int>{3, 28, 28, 1});
}

TEST_CASE("generate is pure and bounded to [0,1]") {
  Generator g(tiny_gen_spec(), 7);
  auto rng = make_rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Tensor<float> z = sample_noise(4, 8, rng);
    std::vector<int> c{0, 3, 7, 9};
    Tensor<float> a = g.generate(c, z);
    Tensor<float> b = g.generate(c, z);
    CHECK(a.vec() == b.vec());
    for (float v : a.vec()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
}

TEST_CASE("conv generator also lands in [0,1] with the right shape") {
  GeneratorSpec s = tiny_gen_spec();
  s.architecture = ModelArch::kDcganConv;
  s.base_channels = 8;
  Generator g(s, 3);
  auto rng = make_rng(10);
  Tensor<float> z = sample_noise(2, 8, rng);
  Tensor<float> img = g.generate({0, 5}, z, nullptr, /*training=*/true);
  CHECK(img.shape() == std::vector<int>{2, 28, 28, 1});
  for (float v : img.vec()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("generator target-conditioning contract") {
  GeneratorSpec plain = tiny_gen_spec();
  Generator g(plain, 1);
  auto rng = make_rng(11);
  Tensor<float> z = sample_noise(2, 8, rng);
  std::vector<int> c{1, 2}, t{3, 4};
  CHECK_THROWS_AS(g.generate(c, z, &t), ArgumentError);   // t to non-conditioned
  CHECK_THROWS_AS(g.generate({1, 12}, z), ArgumentError); // label out of range

  GeneratorSpec cond = tiny_gen_spec();
  cond.target_conditioned = true;
  Generator gt(cond, 1);
  CHECK_THROWS_AS(gt.generate(c, z), ArgumentError);      // missing t
  Tensor<float> img = gt.generate(c, z, &t);
  CHECK(img.dim(0) == 2);
}

TEST_CASE("embed conditioning works and owns extra parameters") {
  GeneratorSpec s = tiny_gen_spec();
  s.conditioning = Conditioning::kEmbed;
  s.embed_dim = 6;
  Generator g(s, 2);
  Generator onehot(tiny_gen_spec(), 2);
  CHECK(g.parameters().size() == onehot.parameters().size() + 1);
  auto rng = make_rng(12);
  Tensor<float> z = sample_noise(2, 8, rng);
  Tensor<float> img = g.generate({0, 9}, z);
  CHECK(img.dim(0) == 2);
  for (float v : img.vec()) CHECK((v >= 0.0f && v <= 1.0f));
}

TEST_CASE("classifier logits: row independence and softmax normalization") {
  ClassifierSpec spec;
  spec.input_shape = {28, 28, 1};
  spec.architecture = ModelArch::kMlp;
  spec.hidden_sizes = {32};
  Classifier m(spec, 5);

  Tensor<float> x({3, 28, 28, 1});
  auto rng = make_rng(21);
  fill_uniform<float>(x, rng, 0.0f, 1.0f);
  // duplicate row 0 into row 2
  std::copy_n(x.data(), 784, x.data() + 2 * 784);
  Tensor<float> logits = m.classify(x);
  for (int j = 0; j < 10; ++j)
    CHECK(logits[static_cast<std::size_t>(j)] ==
          logits[2 * 10 + static_cast<std::size_t>(j)]);

  for (int i = 0; i < 3; ++i) {
    double mx = -1e30;
    for (int j = 0; j < 10; ++j)
      mx = std::max(mx, static_cast<double>(logits[i * 10 + j]));
    double sum = 0;
    for (int j = 0; j < 10; ++j) sum += std::exp(logits[i * 10 + j] - mx);
    double total = 0;
    for (int j = 0; j < 10; ++j)
      total += std::exp(logits[i * 10 + j] - mx) / sum;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }

  Tensor<float> wrong({1, 14, 14, 1});
  CHECK_THROWS_AS(m.classify(wrong), ArgumentError);
}

TEST_CASE("discriminator mode contracts") {
  DiscriminatorSpec cgan;
  cgan.mode = DiscriminatorMode::kCgan;
  cgan.input_shape = {28, 28, 1};
  cgan.hidden_sizes = {16};
  Discriminator dc(cgan, 3);

  Tensor<float> x({2, 28, 28, 1});
  std::vector<int> c{1, 2};
  auto out = dc.discriminate(x, &c);
  CHECK(out.realness.shape() == std::vector<int>{2});
  CHECK(out.class_logits.empty());
  CHECK_THROWS_AS(dc.discriminate(x, nullptr), ArgumentError);  // missing c

  DiscriminatorSpec acgan = cgan;
  acgan.mode = DiscriminatorMode::kAcgan;
  Discriminator da(acgan, 3);
  auto out2 = da.discriminate(x);
  CHECK(out2.realness.shape() == std::vector<int>{2});
  CHECK(out2.class_logits.shape() == std::vector<int>{2, 10});
  CHECK_THROWS_AS(da.discriminate(x, &c), ArgumentError);  // extra c

  // purity
  auto again = da.discriminate(x);
  CHECK(out2.realness.vec() == again.realness.vec());
  CHECK(out2.class_logits.vec() == again.class_logits.vec());
}

TEST_CASE("conv discriminator conditions via label planes") {
  DiscriminatorSpec spec;
  spec.mode = DiscriminatorMode::kCgan;
  spec.input_shape = {28, 28, 1};
  spec.architecture = ModelArch::kDcganConv;
  spec.base_channels = 4;
  Discriminator d(spec, 4);
  Tensor<float> x({2, 28, 28, 1});
  auto rng = make_rng(31);
  fill_uniform<float>(x, rng, 0.0f, 1.0f);
  std::vector<int> c{0, 9};
  auto out = d.discriminate(x, &c);
  CHECK(out.realness.dim(0) == 2);
  for (float v : out.realness.vec()) CHECK(std::isfinite(v));
  // different labels flow into the logit
  std::vector<int> c2{9, 0};
  auto out2 = d.discriminate(x, &c2);
  CHECK(out.realness.vec() != out2.realness.vec());
}

TEST_CASE("frozen classifier rejects parameter-grad accumulation") {
  ClassifierSpec spec;
  spec.input_shape = {28, 28, 1};
  spec.architecture = ModelArch::kMlp;
  spec.hidden_sizes = {16};
  Classifier m(spec, 6);
  m.freeze();
  Tensor<float> x({1, 28, 28, 1});
  Tensor<float> logits = m.classify(x);
  Tensor<float> dlogits(logits.shape());
  dlogits[0] = 1.0f;
  CHECK_THROWS_AS(m.backward(dlogits, true), ArgumentError);
  Tensor<float> dx = m.backward(dlogits, false);  // input grads stay legal
  CHECK(dx.shape() == x.shape());
}

TEST_CASE("inconsistent conv spec is rejected") {
  GeneratorSpec s = tiny_gen_spec();
  s.architecture = ModelArch::kDcganConv;
  s.output_shape = {30, 30, 1};  // not divisible by 4
  CHECK_THROWS_AS(Generator(s, 1), ArgumentError);
  GeneratorSpec bad = tiny_gen_spec();
  bad.z_dim = 0;
  CHECK_THROWS_AS(Generator(bad, 1), ArgumentError);
}

TEST_CASE("parameter checksum changes with the weights") {
  Generator a(tiny_gen_spec(), 1);
  const std::uint32_t before = parameter_checksum(a.parameters());
  a.parameters()[0]->value[0] += 0.25f;
  CHECK(parameter_checksum(a.parameters()) != before);
}
