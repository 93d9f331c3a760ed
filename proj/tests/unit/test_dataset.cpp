#include <doctest.h>

#include <set>
#include <sstream>

#include "smartbag/data/dataset.hpp"

using namespace smartbag::data;

namespace {

const char* kHeader = "ax,ay,az,yaw,pitch,roll,load_left,load_right,mq2,mq135,temp,humidity,water,label\n";

Dataset numbered(std::size_t n) {
  Dataset d;
  for (std::size_t i = 0; i < n; ++i)
    d.add({Eigen::VectorXd::Constant(kFeatureCount, static_cast<double>(i)), i % 5});
  return d;
}

}  // namespace

TEST_CASE("vocabulary defaults and validation") {
  ClassVocabulary v;
  REQUIRE(v.size() == 5);
  CHECK(v.name(0) == "Idle");
  CHECK(v.name(4) == "Falling");
  CHECK(v.index_of("Walking") == 1u);
  CHECK_FALSE(v.index_of("walking"));
  CHECK_THROWS_AS(ClassVocabulary({"A", "A"}), std::invalid_argument);
  CHECK_THROWS_AS(ClassVocabulary({"A", ""}), std::invalid_argument);
}

TEST_CASE("load_csv reads a two-row file") {
  std::istringstream in(std::string(kHeader) +
                        "0,0,1,0,0,0,200,200,100,80,27,55,0,Idle\n"
                        "0.25,0.1,1.1,30,20,15,400,400,100,80,27.5,55,1,Walking\n");
  auto d = load_csv(in);
  REQUIRE(d.size() == 2);
  CHECK(d[0].label == 0);
  CHECK(d[1].label == 1);
  CHECK(d[1].features[kTemp] == 27.5);
  CHECK(d[1].features[kWater] == 1.0);
}

TEST_CASE("load_csv reports the offending row") {
  SUBCASE("arity") {
    std::istringstream in(std::string(kHeader) + "0,0,1,0,0,0,200,200,100,80,27,55,0,Idle\n" +
                          "0,0,1,0,0,0,200,200,100,80,27,55,Idle\n");
    try {
      load_csv(in);
      FAIL("expected an arity error");
    } catch (const DatasetError& e) {
      CHECK(e.kind() == DatasetError::Kind::Arity);
      CHECK(e.row() == 3);
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SUBCASE("non-numeric") {
    std::istringstream in(std::string(kHeader) + "0,0,1,x,0,0,200,200,100,80,27,55,0,Idle\n");
    try {
      load_csv(in);
      FAIL("expected a numeric error");
    } catch (const DatasetError& e) {
      CHECK(e.kind() == DatasetError::Kind::NonNumeric);
      CHECK(e.row() == 2);
    }
  }
  SUBCASE("unknown label") {
    std::istringstream in(std::string(kHeader) + "0,0,1,0,0,0,200,200,100,80,27,55,0,Jogging\n");
    try {
      load_csv(in);
      FAIL("expected a label error");
    } catch (const DatasetError& e) {
      CHECK(e.kind() == DatasetError::Kind::UnknownLabel);
      CHECK(e.row() == 2);
    }
  }
  SUBCASE("header") {
    std::istringstream in("a,b,c\n");
    CHECK_THROWS_AS(load_csv(in), DatasetError);
  }
}

TEST_CASE("save then load reproduces generated data exactly") {
  auto profiles = default_profiles();
  auto d = generate(profiles, 50, 99);
  std::stringstream buf;
  save_csv(d, buf);
  auto back = load_csv(buf);
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back[i].label == d[i].label);
    CHECK(back[i].features == d[i].features);
  }
}

TEST_CASE("split sizes, determinism and disjointness") {
  SUBCASE("1743 rows at 0.9") {
    auto s = split(numbered(1743), 0.9, 7);
    CHECK(s.train.size() == 1568);
    CHECK(s.test.size() == 175);
  }
  SUBCASE("10 rows at 0.5 partition exactly") {
    auto s = split(numbered(10), 0.5, 3);
    REQUIRE(s.train.size() == 5);
    REQUIRE(s.test.size() == 5);
    std::set<double> ids;
    for (const auto& e : s.train.examples()) ids.insert(e.features[0]);
    for (const auto& e : s.test.examples()) ids.insert(e.features[0]);
    CHECK(ids.size() == 10);
  }
  SUBCASE("same seed, same partition") {
    auto a = split(numbered(100), 0.7, 42);
    auto b = split(numbered(100), 0.7, 42);
    for (std::size_t i = 0; i < a.train.size(); ++i)
      CHECK(a.train[i].features == b.train[i].features);
  }
  SUBCASE("floor rule for many sizes and fractions") {
    for (std::size_t n : {1u, 2u, 7u, 33u, 101u}) {
      for (double f : {0.1, 0.25, 0.5, 0.9, 0.99}) {
        auto s = split(numbered(n), f, n);
        CHECK(s.train.size() == static_cast<std::size_t>(std::floor(f * static_cast<double>(n))));
        CHECK(s.train.size() + s.test.size() == n);
      }
    }
  }
  CHECK_THROWS_AS(split(numbered(10), 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split(numbered(10), 1.0, 1), std::invalid_argument);
}

TEST_CASE("normalizer") {
  SUBCASE("two-point feature maps to -1, +1 and constant feature to 0") {
    Dataset d;
    Eigen::VectorXd a = Eigen::VectorXd::Constant(kFeatureCount, 5.0);
    Eigen::VectorXd b = a;
    a[0] = 0.0;
    b[0] = 2.0;
    d.add({a, 0});
    d.add({b, 1});
    auto n = fit_normalizer(d);
    CHECK(n.stddev[1] == 1.0);
    auto za = n.apply(a);
    auto zb = n.apply(b);
    CHECK(za(0, 0) == doctest::Approx(-1.0));
    CHECK(zb(0, 0) == doctest::Approx(1.0));
    CHECK(za(1, 0) == 0.0);
  }
  SUBCASE("fitted set has zero mean and unit stddev") {
    auto d = generate(default_profiles(), 500, 5);
    auto n = fit_normalizer(d);
    Eigen::MatrixXd z = n.apply(d.feature_matrix());
    for (Eigen::Index f = 0; f < z.rows(); ++f) {
      const double mu = z.row(f).mean();
      const double sd = std::sqrt((z.row(f).array() - mu).square().mean());
      CHECK(std::abs(mu) <= 1e-9);
      CHECK(std::abs(sd - 1.0) <= 1e-9);
    }
  }
  SUBCASE("apply is affine in the fitted statistics") {
    Normalizer n{Eigen::VectorXd::Constant(2, 1.0), Eigen::VectorXd::Constant(2, 2.0)};
    Eigen::Vector2d x(3.0, -1.0);
    auto z = n.apply(x);
    CHECK(z(0, 0) == 1.0);
    CHECK(z(1, 0) == -1.0);
    auto z3 = n.apply(3.0 * x);
    CHECK(z3(0, 0) == (9.0 - 1.0) / 2.0);
  }
  CHECK_THROWS_AS(fit_normalizer(Dataset{}), std::invalid_argument);
}

TEST_CASE("generate") {
  SUBCASE("degenerate profiles return class means") {
    auto profiles = default_profiles();
    for (auto& p : profiles) {
      p.stddev.setZero();
      p.water_probability = 0.0;
      p.mean[kWater] = 0.0;
    }
    auto d = generate(profiles, 5, 11);
    REQUIRE(d.size() == 5);
    for (const auto& e : d.examples()) CHECK(e.features == profiles[e.label].mean);
  }
  SUBCASE("seeded determinism") {
    auto a = generate(default_profiles(), 200, 8);
    auto b = generate(default_profiles(), 200, 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].label == b[i].label);
      CHECK(a[i].features == b[i].features);
    }
  }
  SUBCASE("class counts near uniform for 1743 rows") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
      auto counts = generate(default_profiles(), kDefaultRowCount, seed).class_counts();
      for (auto c : counts) {
        CHECK(static_cast<double>(c) >= 348.6 * 0.85);
        CHECK(static_cast<double>(c) <= 348.6 * 1.15);
      }
    }
  }
  SUBCASE("gas means sit five stddevs under alert thresholds") {
    for (const auto& p : default_profiles()) {
      CHECK(p.mean[kMq2] + 5 * p.stddev[kMq2] <= 300.0);
      CHECK(p.mean[kMq135] + 5 * p.stddev[kMq135] <= 200.0);
    }
  }
  CHECK_THROWS_AS(generate(default_profiles(), 4, 1), std::invalid_argument);
}
