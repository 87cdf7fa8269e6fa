#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "udrl/nn/adam.hpp"
#include "udrl/nn/network.hpp"

using namespace udrl;
using namespace udrl::nn;

namespace {

NetworkSpec small_spec(FastNet f, HeadKind h, std::size_t obs = 3, std::size_t head = 2) {
  NetworkSpec s;
  s.observation_dim = obs;
  s.hidden_sizes = {4, 3};
  s.fast_net = f;
  s.head = h;
  s.head_size = head;
  return s;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

void randomize(Network& net, Rng& rng, double scale = 0.5) {
  for (auto& p : net.parameters())
    p.value += random_matrix(p.value.rows(), p.value.cols(), rng, scale);
}

Batch random_batch(const NetworkSpec& s, Eigen::Index n, Rng& rng) {
  Batch b;
  b.observations = random_matrix(static_cast<Eigen::Index>(s.observation_dim), n, rng);
  b.commands = random_matrix(2, n, rng);
  if (s.head == HeadKind::categorical) {
    for (Eigen::Index i = 0; i < n; ++i) b.target_classes.push_back(static_cast<int>(rng.index(s.head_size)));
  } else {
    b.target_actions.resize(static_cast<Eigen::Index>(s.head_size), n);
    for (Eigen::Index i = 0; i < b.target_actions.size(); ++i)
      b.target_actions.data()[i] = rng.uniform(-0.95, 0.95);
  }
  return b;
}

std::vector<double> col(const Matrix& m, Eigen::Index j) {
  return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

}  // namespace

TEST(InitNetwork, SquareWeightIsOrthogonal) {
  Rng rng(3);
  Matrix w = orthogonal_matrix(4, 4, rng);
  EXPECT_LT((w.transpose() * w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(InitNetwork, WideWeightHasOrthonormalRows) {
  // Oracle: Gram-Schmidt-free check via an independent QR of the transpose;
  // W W^T must be the identity and the rows must span what the QR spans.
  Rng rng(11);
  Matrix w = orthogonal_matrix(3, 5, rng);
  EXPECT_LT((w * w.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-6);
  Eigen::ColPivHouseholderQR<Matrix> qr(w.transpose());
  EXPECT_EQ(qr.rank(), 3);
}

TEST(InitNetwork, AllWeightsOrthogonalBiasesZero) {
  for (FastNet f : {FastNet::gated, FastNet::bilinear}) {
    Network net = Network::init(small_spec(f, HeadKind::categorical), 5);
    for (const auto& p : net.parameters()) {
      const char last = p.name.back();
      if (last == 'p' || last == 'q' || last == 'b') {
        EXPECT_EQ(p.value.cwiseAbs().maxCoeff(), 0.0) << p.name;
        continue;
      }
      const Matrix& w = p.value;
      const Matrix gram = w.rows() <= w.cols() ? Matrix(w * w.transpose()) : Matrix(w.transpose() * w);
      EXPECT_LT((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-6)
          << p.name;
    }
  }
}

TEST(InitNetwork, DeterministicPerSeed) {
  const auto spec = small_spec(FastNet::bilinear, HeadKind::gaussian);
  Network a = Network::init(spec, 42), b = Network::init(spec, 42), c = Network::init(spec, 43);
  bool differs = false;
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    const auto& pa = a.parameters()[i].value;
    const auto& pb = b.parameters()[i].value;
    EXPECT_EQ(0, std::memcmp(pa.data(), pb.data(), sizeof(double) * static_cast<std::size_t>(pa.size())));
    differs = differs || pa != c.parameters()[i].value;
  }
  EXPECT_TRUE(differs);
}

TEST(InitNetwork, ZeroSizedLayerIsConfigError) {
  auto spec = small_spec(FastNet::gated, HeadKind::categorical);
  spec.hidden_sizes = {4, 0};
  EXPECT_THROW(Network::init(spec, 0), ConfigError);
  spec = small_spec(FastNet::gated, HeadKind::categorical);
  spec.observation_dim = 0;
  EXPECT_THROW(Network::init(spec, 0), ConfigError);
}

TEST(ForwardGated, ZeroGatePathwayHalvesActivation) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical), 1);
  net.parameter("fast.U").value.setZero();
  Rng rng(2);
  Vector o = random_matrix(3, 1, rng), c = random_matrix(2, 1, rng);
  auto fp = net.forward(o, c);
  Matrix expected = ((net.parameter("fast.V").value * o).colwise() + net.parameter("fast.q").value.col(0))
                        .cwiseMax(0.0) * 0.5;
  EXPECT_EQ(fp.layer_out[0], expected);
}

TEST(ForwardGated, ZeroObservationPathwayGivesZero) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical), 1);
  net.parameter("fast.V").value.setZero();
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    auto fp = net.forward(random_matrix(3, 1, rng), random_matrix(2, 1, rng, 10.0));
    EXPECT_EQ(fp.layer_out[0].cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ForwardGated, MatchesScalarLoop) {
  Rng rng(7);
  for (Activation act : {Activation::relu, Activation::tanh}) {
    auto spec = small_spec(FastNet::gated, HeadKind::categorical);
    spec.activation = act;
    Network net = Network::init(spec, 9);
    randomize(net, rng);
    Matrix o = random_matrix(3, 4, rng), c = random_matrix(2, 4, rng);
    auto fp = net.forward(o, c);
    for (Eigen::Index s = 0; s < 4; ++s) {
      auto ref = oracle::gated_layer(net.parameter("fast.U").value, net.parameter("fast.p").value,
                                     net.parameter("fast.V").value, net.parameter("fast.q").value,
                                     col(o, s), col(c, s), act);
      for (std::size_t j = 0; j < ref.size(); ++j)
        EXPECT_NEAR(fp.layer_out[0](static_cast<Eigen::Index>(j), s), ref[j], 1e-12);
    }
  }
}

TEST(ForwardGated, ShapeMismatchThrows) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical), 1);
  EXPECT_THROW(net.forward(Matrix::Zero(2, 1), Matrix::Zero(2, 1)), ShapeError);
  EXPECT_THROW(net.forward(Matrix::Zero(3, 1), Matrix::Zero(3, 1)), ShapeError);
  EXPECT_THROW(net.forward(Matrix::Zero(3, 2), Matrix::Zero(2, 1)), ShapeError);
}

TEST(ForwardBilinear, ZeroCommandPathwayIsCommandIndependent) {
  Network net = Network::init(small_spec(FastNet::bilinear, HeadKind::categorical), 1);
  net.parameter("fast.U").value.setZero();
  net.parameter("fast.V").value.setZero();
  Rng rng(4);
  net.parameter("fast.p").value = random_matrix(12, 1, rng);
  net.parameter("fast.q").value = random_matrix(4, 1, rng);
  Vector o = random_matrix(3, 1, rng);
  const auto a = net.forward(o, random_matrix(2, 1, rng)).layer_out[0];
  const auto b = net.forward(o, random_matrix(2, 1, rng, 5.0)).layer_out[0];
  EXPECT_EQ(a, b);
  Eigen::Map<const Eigen::Matrix<double, 4, 3, Eigen::RowMajor>> w(net.parameter("fast.p").value.data());
  Matrix expected = (w * o + net.parameter("fast.q").value).cwiseMax(0.0);
  EXPECT_LT((a - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ForwardBilinear, BasisObservationSelectsColumn) {
  auto spec = small_spec(FastNet::bilinear, HeadKind::categorical);
  spec.activation = Activation::tanh;
  Network net = Network::init(spec, 8);
  Rng rng(5);
  randomize(net, rng);
  net.parameter("fast.V").value.setZero();
  net.parameter("fast.q").value.setZero();
  Vector c = random_matrix(2, 1, rng);
  const Vector wflat = net.parameter("fast.U").value * c + net.parameter("fast.p").value;
  for (Eigen::Index k = 0; k < 3; ++k) {
    Vector e = Vector::Zero(3);
    e(k) = 1.0;
    const auto y = net.forward(e, c).layer_out[0];
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(y(j, 0), std::tanh(wflat(j * 3 + k)), 1e-15);
  }
}

TEST(ForwardBilinear, MatchesScalarLoop) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto spec = small_spec(FastNet::bilinear, HeadKind::gaussian, 2 + rng.index(3));
    spec.activation = trial % 2 ? Activation::tanh : Activation::relu;
    Network net = Network::init(spec, static_cast<std::uint64_t>(trial));
    randomize(net, rng);
    const auto obs = static_cast<Eigen::Index>(spec.observation_dim);
    Matrix o = random_matrix(obs, 3, rng), c = random_matrix(2, 3, rng);
    auto fp = net.forward(o, c);
    for (Eigen::Index s = 0; s < 3; ++s) {
      auto ref = oracle::bilinear_layer(net.parameter("fast.U").value, net.parameter("fast.p").value,
                                        net.parameter("fast.V").value, net.parameter("fast.q").value,
                                        col(o, s), col(c, s), spec.activation);
      for (std::size_t j = 0; j < ref.size(); ++j)
        EXPECT_NEAR(fp.layer_out[0](static_cast<Eigen::Index>(j), s), ref[j], 1e-12);
    }
  }
}

TEST(CategoricalHead, Examples) {
  Vector z(2);
  z << 0, 0;
  EXPECT_EQ(softmax(z), Vector::Constant(2, 0.5));
  for (double c : {-1000.0, 0.0, 3.7, 800.0}) {
    Vector u = Vector::Constant(4, c);
    EXPECT_LT((softmax(u).array() - 0.25).abs().maxCoeff(), 1e-15);
  }
  // Reference values from direct exponentiation: e^k / (e + e^2 + e^3).
  Vector l(3);
  l << 1, 2, 3;
  const Vector p = softmax(l);
  EXPECT_NEAR(p(0), 0.09003, 1e-5);
  EXPECT_NEAR(p(1), 0.24473, 1e-5);
  EXPECT_NEAR(p(2), 0.66524, 1e-5);
}

TEST(CategoricalHead, SumsToOneAndShiftInvariant) {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + rng.index(8));
    Vector z = random_matrix(n, 1, rng, 20.0);
    const Vector p = softmax(z);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_TRUE((p.array() > 0).all() || n == 1 || z.maxCoeff() - z.minCoeff() > 700);
    const Vector q = softmax((z.array() + rng.uniform(-100, 100)).matrix());
    Eigen::Index ap, aq;
    p.maxCoeff(&ap);
    q.maxCoeff(&aq);
    EXPECT_EQ(ap, aq);
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CategoricalHead, NonFiniteLogitThrows) {
  Vector z(2);
  z << 0, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(softmax(z), NumericError);
  z << 0, std::numeric_limits<double>::infinity();
  EXPECT_THROW(softmax(z), NumericError);
}

TEST(GaussianHead, Examples) {
  Vector zero = Vector::Zero(2);
  auto g = gaussian_head(zero, zero);
  EXPECT_EQ(g.mean, zero);
  EXPECT_EQ(g.log_std, Vector::Constant(2, -2.0));
  Vector big = Vector::Constant(1, 1000.0);
  EXPECT_EQ(gaussian_head(zero.head(1), big).log_std(0), 2.0);
  EXPECT_EQ(gaussian_head(zero.head(1), -big).log_std(0), -6.0);
}

TEST(GaussianHead, OutputsInsideOpenIntervals) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Vector m = Vector::Constant(1, rng.uniform(-15, 15)), s = Vector::Constant(1, rng.uniform(-25, 25));
    auto g = gaussian_head(m, s);
    EXPECT_GT(g.mean(0), -1.0);
    EXPECT_LT(g.mean(0), 1.0);
    EXPECT_GT(g.log_std(0), -6.0);
    EXPECT_LT(g.log_std(0), 2.0);
  }
  Vector nan = Vector::Constant(1, std::nan(""));
  EXPECT_THROW(gaussian_head(nan, Vector::Zero(1)), NumericError);
}

TEST(LossBatch, UniformTwoActionIsLn2) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical), 1);
  net.parameter("head.W").value.setZero();
  Rng rng(1);
  Batch b = random_batch(net.spec(), 6, rng);
  EXPECT_NEAR(loss_batch(net, b), std::log(2.0), 1e-15);
}

TEST(LossBatch, ThreeClassDirectLog) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical, 3, 3), 1);
  net.parameter("head.W").value.setZero();
  net.parameter("head.b").value << std::log(0.2), std::log(0.5), std::log(0.3);
  Batch b;
  b.observations = Matrix::Ones(3, 1);
  b.commands = Matrix::Ones(2, 1);
  b.target_classes = {1};
  EXPECT_NEAR(loss_batch(net, b), -std::log(0.5), 1e-12);
  EXPECT_NEAR(-std::log(0.5), 0.693147, 1e-6);
}

TEST(LossBatch, GaussianAtModeWithUnitStd) {
  for (std::size_t d : {1u, 2u, 3u}) {
    Network net = Network::init(small_spec(FastNet::bilinear, HeadKind::gaussian, 3, d), 1);
    net.parameter("head.W").value.setZero();
    // raw log-std giving log_std = 0: sigmoid(x) = 6/8.
    auto& bias = net.parameter("head.b").value;
    for (std::size_t k = 0; k < d; ++k) {
      bias(static_cast<Eigen::Index>(k)) = std::atanh(0.3);
      bias(static_cast<Eigen::Index>(d + k)) = std::log(3.0);
    }
    Batch b;
    b.observations = Matrix::Ones(3, 2);
    b.commands = Matrix::Ones(2, 2);
    b.target_actions = Matrix::Constant(static_cast<Eigen::Index>(d), 2, 0.3);
    EXPECT_NEAR(loss_batch(net, b), static_cast<double>(d) * 0.5 * std::log(2 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(0.5 * std::log(2 * std::numbers::pi), 0.918939, 1e-6);
  }
}

TEST(LossBatch, ContinuousTargetOutsideSupportStillScored) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::gaussian, 3, 1), 1);
  Batch b;
  b.observations = Matrix::Ones(3, 1);
  b.commands = Matrix::Ones(2, 1);
  b.target_actions = Matrix::Constant(1, 1, 50.0);
  const double l = loss_batch(net, b);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_GT(l, 100.0);
}

TEST(Backward, WithoutForwardIsUsageError) {
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical), 1);
  Rng rng(1);
  Batch b = random_batch(net.spec(), 2, rng);
  EXPECT_THROW(net.backward(ForwardPass{}, b), UsageError);
}

TEST(Backward, StationaryAtUniqueMinimum) {
  // Identical inputs with targets split evenly over two classes: equal logits
  // are the unique minimizer of the mean cross-entropy.
  Network net = Network::init(small_spec(FastNet::gated, HeadKind::categorical), 1);
  net.parameter("head.W").value.setZero();
  Batch b;
  b.observations = Matrix::Ones(3, 2);
  b.commands = Matrix::Ones(2, 2);
  b.target_classes = {0, 1};
  auto fp = net.forward(b.observations, b.commands);
  net.backward(fp, b);
  double norm = 0.0;
  for (const auto& p : net.parameters()) norm += p.grad.squaredNorm();
  EXPECT_LT(std::sqrt(norm), 1e-10);
}

TEST(Backward, DuplicatedSampleEqualsSingleSample) {
  Rng rng(13);
  for (HeadKind h : {HeadKind::categorical, HeadKind::gaussian}) {
    Network net = Network::init(small_spec(FastNet::bilinear, h), 3);
    randomize(net, rng);
    Batch one = random_batch(net.spec(), 1, rng);
    Batch two = one;
    two.observations = Matrix(3, 2);
    two.observations << one.observations, one.observations;
    two.commands = Matrix(2, 2);
    two.commands << one.commands, one.commands;
    if (h == HeadKind::categorical) two.target_classes = {one.target_classes[0], one.target_classes[0]};
    else {
      two.target_actions = Matrix(2, 2);
      two.target_actions << one.target_actions, one.target_actions;
    }
    Network a = net;
    a.backward(a.forward(one.observations, one.commands), one);
    Network b = net;
    b.backward(b.forward(two.observations, two.commands), two);
    for (std::size_t i = 0; i < a.parameters().size(); ++i)
      EXPECT_LT((a.parameters()[i].grad - b.parameters()[i].grad).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Backward, MatchesFiniteDifferencesAllCombinations) {
  Rng rng(2024);
  for (FastNet f : {FastNet::gated, FastNet::bilinear})
    for (HeadKind h : {HeadKind::categorical, HeadKind::gaussian})
      for (Activation act : {Activation::relu, Activation::tanh}) {
        auto spec = small_spec(f, h, 3, 2);
        spec.activation = act;
        Network net = Network::init(spec, 1);
        randomize(net, rng, 0.3);
        Batch b = random_batch(spec, 4, rng);
        net.backward(net.forward(b.observations, b.commands), b);
        auto numeric = oracle::finite_difference_gradients(net, b);
        for (std::size_t i = 0; i < numeric.size(); ++i)
          EXPECT_LT(oracle::max_relative_error(net.parameters()[i].grad, numeric[i]), 1e-4)
              << to_string(f) << '/' << to_string(h) << '/' << to_string(act) << ' '
              << net.parameters()[i].name;
      }
}

TEST(AdamStep, FirstStepFromZeroState) {
  std::vector<Parameter> p{{"x", Matrix::Zero(1, 1), Matrix::Ones(1, 1)}};
  auto st = AdamState::for_parameters(p, 1e-3);
  adam_step(p, st);
  EXPECT_NEAR(p[0].value(0, 0), -1e-3 / (1 + 1e-8), 1e-18);
  EXPECT_NEAR(p[0].value(0, 0), -9.99999990e-4, 1e-12);
  EXPECT_EQ(st.step_count, 1u);
}

TEST(AdamStep, ZeroGradientLeavesParameter) {
  std::vector<Parameter> p{{"x", Matrix::Constant(2, 2, 0.7), Matrix::Zero(2, 2)}};
  auto st = AdamState::for_parameters(p, 1e-3);
  adam_step(p, st);
  EXPECT_EQ(p[0].value, Matrix::Constant(2, 2, 0.7));
}

TEST(AdamStep, TwoStepsMatchReferenceRecurrence) {
  std::vector<Parameter> p{{"x", Matrix::Constant(1, 1, 0.25), Matrix::Constant(1, 1, 0.4)}};
  auto st = AdamState::for_parameters(p, 5e-3);
  oracle::ScalarAdam ref{5e-3};
  double theta = 0.25;
  for (int i = 0; i < 2; ++i) {
    adam_step(p, st);
    theta = ref.step(theta, 0.4);
    EXPECT_NEAR(p[0].value(0, 0), theta, 1e-12);
  }
}

TEST(AdamStep, BitwiseReproducible) {
  Rng rng(8);
  std::vector<Parameter> a{{"x", random_matrix(3, 2, rng), random_matrix(3, 2, rng)}};
  auto b = a;
  auto sa = AdamState::for_parameters(a, 1e-2), sb = sa;
  for (int i = 0; i < 5; ++i) {
    adam_step(a, sa);
    adam_step(b, sb);
  }
  EXPECT_EQ(0, std::memcmp(a[0].value.data(), b[0].value.data(), sizeof(double) * 6));
}

TEST(AdamStep, ShapeMismatchThrows) {
  std::vector<Parameter> p{{"x", Matrix::Zero(2, 1), Matrix::Zero(2, 1)}};
  AdamState st;
  EXPECT_THROW(adam_step(p, st), ShapeError);
}
