#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "arcs/datasets.hpp"
#include "arcs/errors.hpp"
#include "arcs/problems.hpp"
#include "doctest.h"

using namespace arcs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "arcs_test_problems";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, std::initializer_list<unsigned char> bytes) {
  std::ofstream out(p, std::ios::binary);
  for (unsigned char b : bytes) out.put(static_cast<char>(b));
}

std::shared_ptr<Dataset> blobs(std::size_t classes, std::uint64_t seed) {
  BlobSpec spec;
  spec.classes = classes;
  spec.dim = 3;
  spec.per_class = 40;
  spec.seed = seed;
  return std::make_shared<Dataset>(synth_blobs(spec));
}

}  // namespace

TEST_CASE("quadratic trivial values") {
  const Quadratic q = Quadratic::diagonal(Vector{1.0, 1.0}, Vector{0.0, 0.0});
  CHECK(q.value(Vector{1.0, 0.0}) == doctest::Approx(0.5));
  CHECK(q.gradient(Vector{1.0, 0.0}) == Vector{1.0, 0.0});
}

TEST_CASE("random dense quadratic has the requested spectrum") {
  const Quadratic q = Quadratic::random_dense(6, 1e3, 1);
  const SymEig e = sym_eig(q.hessian());
  CHECK(e.values.front() == doctest::Approx(1.0));
  CHECK(e.values.back() == doctest::Approx(1e3));
  CHECK(norm2(q.gradient(q.minimizer())) < 1e-9);
}

TEST_CASE("rosenbrock minimum") {
  const Rosenbrock r(2);
  CHECK(r.value(Vector{1.0, 1.0}) == 0.0);
  CHECK(r.gradient(Vector{1.0, 1.0}) == Vector{0.0, 0.0});
  CHECK(r.value(Vector{-1.2, 1.0}) == doctest::Approx(24.2));
  CHECK_THROWS_AS(Rosenbrock(1), std::invalid_argument);
}

TEST_CASE("analytic gradients agree with finite differences") {
  const LogisticRegression lr(blobs(3, 2), 1e-3);
  Vector theta(lr.dim());
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = 0.1 * std::sin(1.0 + i);
  CHECK(gradient_check_error(lr, theta) < 1e-5);
  CHECK(gradient_check_error(Rosenbrock(5), Vector{-1.2, 1.0, 0.3, 0.7, -0.5}) < 1e-5);
}

TEST_CASE("blobs are linearly separable") {
  BlobSpec spec;
  spec.classes = 2;
  spec.dim = 2;
  spec.seed = 7;
  auto ds = std::make_shared<Dataset>(synth_blobs(spec));
  const LogisticRegression lr(ds, 1e-4);
  Vector theta(lr.dim(), 0.0);
  Vector g;
  for (int k = 0; k < 500; ++k) {
    lr.value_and_gradient(theta, g);
    axpy(-1.0, g, theta);
  }
  CHECK(lr.train_accuracy(theta) == 1.0);
}

TEST_CASE("iris network has 2953 parameters") {
  const MlpSpec spec = iris_mlp_spec(0);
  CHECK(spec.widths.front() == 4);
  CHECK(spec.widths.back() == 3);
  CHECK(spec.widths.size() == 4);
  CHECK(spec.parameter_count() == 2953);
}

TEST_CASE("single linear layer with mse is least squares") {
  auto ds = std::make_shared<Dataset>();
  ds->inputs = {{1.0, 2.0}};
  ds->targets = {{0.5}};
  ds->train = {0};
  MlpSpec spec;
  spec.widths = {2, 1};
  spec.loss = Loss::mse;
  spec.output = Activation::identity;
  const Mlp net(spec, ds);
  const Vector theta{0.3, -0.1, 0.2};
  const double r = 0.3 * 1.0 - 0.1 * 2.0 + 0.2 - 0.5;
  CHECK(net.value(theta) == doctest::Approx(r * r));
  const Vector g = net.gradient(theta);
  CHECK(g[0] == doctest::Approx(2.0 * r * 1.0));
  CHECK(g[1] == doctest::Approx(2.0 * r * 2.0));
  CHECK(g[2] == doctest::Approx(2.0 * r));
}

TEST_CASE("softmax cross-entropy gradient at uniform logits") {
  auto ds = std::make_shared<Dataset>();
  ds->inputs = {{0.0, 0.0}};
  ds->labels = {1};
  ds->num_classes = 4;
  ds->train = {0};
  MlpSpec spec;
  spec.widths = {2, 4};
  const Mlp net(spec, ds);
  const Vector theta(net.dim(), 0.0);
  CHECK(net.value(theta) == doctest::Approx(std::log(4.0)));
  const Vector g = net.gradient(theta);
  for (std::size_t c = 0; c < 4; ++c)
    CHECK(g[8 + c] == doctest::Approx(0.25 - (c == 1 ? 1.0 : 0.0)));
}

TEST_CASE("mlp gradients for every hidden activation") {
  auto ds = blobs(3, 4);
  for (auto act : {Activation::identity, Activation::relu, Activation::sigmoid, Activation::tanh}) {
    MlpSpec spec;
    spec.widths = {3, 5, 3};
    spec.hidden = act;
    spec.init_scale = 0.5;
    spec.init_seed = 3;
    const Mlp net(spec, ds);
    CHECK(gradient_check_error(net, net.initial_parameters()) < 1e-5);
  }
}

TEST_CASE("mlp rejects mismatched widths") {
  MlpSpec spec;
  spec.widths = {5, 3};
  CHECK_THROWS_AS(Mlp(spec, blobs(3, 1)), std::invalid_argument);
}

TEST_CASE("iris row parsing and split") {
  const fs::path p = scratch("iris.csv");
  {
    std::ofstream out(p);
    out << "sepal_length,sepal_width,petal_length,petal_width,species\n";
    for (int i = 0; i < 10; ++i) {
      out << "5.1,3.5,1.4,0.2,Iris-setosa\n";
      out << "7.0,3.2,4.7,1.4,Iris-versicolor\n";
    }
  }
  const Dataset ds = load_iris(p, 1);
  CHECK(ds.size() == 20);
  CHECK(ds.inputs[0] == Vector{5.1, 3.5, 1.4, 0.2});
  CHECK(ds.labels[0] == 0);
  CHECK(ds.labels[1] == 1);
  CHECK(ds.num_classes == 2);
  CHECK(ds.test.size() == 4);
  CHECK(ds.train.size() == 16);
}

TEST_CASE("iris parse errors name the line") {
  const fs::path p = scratch("bad_iris.csv");
  {
    std::ofstream out(p);
    out << "5.1,3.5,1.4,0.2,Iris-setosa\n5.1,oops,1.4,0.2,Iris-setosa\n";
  }
  try {
    load_iris(p, 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("idx header and pixels") {
  const fs::path img = scratch("img.idx");
  const fs::path lab = scratch("lab.idx");
  write_bytes(img, {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2,  //
                    0, 255, 51, 0, 255, 255, 255, 255});
  write_bytes(lab, {0, 0, 8, 1, 0, 0, 0, 2, 3, 7});
  const Dataset ds = load_idx(img, lab);
  REQUIRE(ds.size() == 2);
  CHECK(ds.input_dim() == 4);
  CHECK(ds.inputs[0][1] == 1.0);
  CHECK(ds.inputs[0][2] == doctest::Approx(0.2));
  CHECK(ds.labels == std::vector<int>{3, 7});
  CHECK(load_idx(img, lab, 1).size() == 1);
}

TEST_CASE("idx errors name the byte offset") {
  const fs::path img = scratch("bad_img.idx");
  const fs::path lab = scratch("bad_lab.idx");
  write_bytes(img, {0, 0, 8, 4, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0});
  write_bytes(lab, {0, 0, 8, 1, 0, 0, 0, 1, 0});
  try {
    load_idx(img, lab);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte 0") != std::string::npos);
  }
  write_bytes(img, {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0});
  try {
    load_idx(img, lab);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte 16") != std::string::npos);
  }
}

TEST_CASE("stratified split is a disjoint cover") {
  auto ds = blobs(3, 9);
  CHECK_NOTHROW(validate(*ds));
  CHECK(ds->train.size() + ds->test.size() == ds->size());
  CHECK(ds->test.size() == 24);
}

TEST_CASE("standardize uses training statistics") {
  auto ds = blobs(2, 5);
  standardize(*ds);
  double mean = 0.0;
  for (std::size_t i : ds->train) mean += ds->inputs[i][0];
  CHECK(mean / static_cast<double>(ds->train.size()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("downsample averages blocks") {
  Dataset ds;
  ds.inputs = {{1.0, 3.0, 5.0, 7.0}};
  downsample_images(ds, 2, 2);
  CHECK(ds.inputs[0] == Vector{4.0});
}
