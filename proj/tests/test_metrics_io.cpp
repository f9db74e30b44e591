#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pucell/errors.hpp"
#include "pucell/io.hpp"
#include "pucell/metrics_bench.hpp"

using namespace pucell;

TEST_CASE("rmse") {
  const std::vector<double> v{1.0, -2.0, 3.5};
  CHECK(rmse(v, v) == 0.0);
  const std::vector<double> zeros(4, 0.0), tenths(4, 0.1);
  CHECK(rmse(zeros, tenths) == doctest::Approx(0.1).epsilon(1e-15));
  const std::vector<double> exact{0.0, 0.0}, approx{3.0, 4.0};
  CHECK(rmse(exact, approx) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
  CHECK_THROWS_AS(rmse({}, {}), InvalidArgument);
  CHECK_THROWS_AS(rmse(exact, v), InvalidArgument);
}

TEST_CASE("equispaced") {
  const auto v = equispaced(0.1, 2.0, 20);
  REQUIRE(v.size() == 20);
  CHECK(v.front() == 0.1);
  CHECK(v.back() == 2.0);
  CHECK(v[1] == doctest::Approx(0.2));
  CHECK(equispaced(50, 100, 1) == std::vector<double>{50});
  CHECK_THROWS_AS(equispaced(1, 2, 0), InvalidArgument);
}

TEST_CASE("accuracy experiment report") {
  const BenchReport r = run_accuracy_experiment(DatasetSpec{4225, 1024, 33}, KernelSpec::wendland(1));
  CHECK(r.n == 4225);
  CHECK(r.d == 1024);
  CHECK(r.s == 1089);
  CHECK(r.rmse > 0.0);
  CHECK(r.rmse < 1e-3);
  CHECK(r.fit_time >= 0.0);
  CHECK(r.eval_time >= 0.0);
  CHECK(r.uncovered_count == 0);
  CHECK(r.max_overlap <= 9);
  CHECK(std::isnan(r.speedup()));
}

TEST_CASE("RMSE at the nodes reflects the interpolation conditions") {
  const Dataset data = make_dataset({4225, 1024, 33});
  const PUModel model = PUModel::build(data.nodes, data.values, data.centers, KernelSpec::wendland(1));
  CHECK(rmse(data.values, model.evaluate(data.nodes)) <= 1e-6);
}

TEST_CASE("single-value sweep matches the accuracy experiment") {
  const DatasetSpec spec{1089, 256, 33};
  const std::vector<double> shapes{50.0};
  const auto curve = run_shape_sweep(spec, KernelFamily::Gaussian, shapes);
  REQUIRE(curve.size() == 1);
  CHECK_FALSE(curve[0].failed);
  CHECK(curve[0].rmse == run_accuracy_experiment(spec, KernelSpec::gaussian(50)).rmse);
  CHECK_THROWS_AS(run_shape_sweep(spec, KernelFamily::Gaussian, std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(run_shape_sweep(spec, KernelFamily::Gaussian, std::vector<double>{-1.0}), InvalidArgument);
}

TEST_CASE("Gaussian sweep flags ill-conditioned fits instead of aborting") {
  const auto shapes = equispaced(1, 100, 20);
  const auto curve = run_shape_sweep({4225, 1024, 33}, KernelFamily::Gaussian, shapes);
  REQUIRE(curve.size() == 20);
  std::size_t failed = 0;
  for (const SweepPoint& p : curve) {
    if (p.failed) {
      ++failed;
      CHECK(std::isnan(p.rmse));
      CHECK_FALSE(p.reason.empty());
    } else {
      CHECK(p.rmse > 0.0);
    }
  }
  // Small alpha^2 gives nearly flat kernels; at least the smallest value fails.
  CHECK(failed >= 1);
  CHECK(curve.front().failed);
  CHECK_FALSE(curve.back().failed);

  std::ostringstream csv;
  write_sweep_csv(csv, curve);
  const std::string text = csv.str();
  CHECK(text.rfind("shape,rmse,failed\n", 0) == 0);
  CHECK(text.find("1,nan,1\n") != std::string::npos);
}

TEST_CASE("timing experiment on a small problem") {
  const DatasetSpec spec{4225, 1024, 33};
  const BenchReport a = run_timing_experiment(spec, KernelSpec::wendland(1), 3);
  const BenchReport b = run_timing_experiment(spec, KernelSpec::wendland(1), 1);
  CHECK(a.paths_identical);
  CHECK(a.search_time_cell > 0.0);
  CHECK(a.search_time_brute > 0.0);
  CHECK(a.rmse == b.rmse);
  CHECK_THROWS_AS(run_timing_experiment(spec, KernelSpec::wendland(1), 0), InvalidArgument);

  std::ostringstream csv;
  write_report_csv(csv, std::span<const BenchReport>(&a, 1));
  std::istringstream lines(csv.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header.find("search_time_cell,search_time_brute,speedup") != std::string::npos);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("4225,1024,1089,wendland,1,", 0) == 0);
}

TEST_CASE("cell localization time grows subquadratically") {
  // Build + query of the node grid, best of 5, across the three standard sizes.
  const auto localize = [](std::size_t n, std::size_t d) {
    const Dataset data = make_dataset({n, d, 33});
    const double radius = subdomain_radius(d);
    double best = 1e9;
    std::size_t sink = 0;
    for (int r = 0; r < 5; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const CellGrid grid = CellGrid::build(data.nodes, radius);
      for (const Point2& c : data.centers) {
        grid.for_each_within(c, radius, [&](std::size_t i, const Point2&) { sink += i; });
      }
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    CHECK(sink > 0);
    return best;
  };
  const double t1 = localize(4225, 1024);
  const double t2 = localize(16641, 4096);
  const double t3 = localize(66049, 16384);
  MESSAGE("cell localization: " << t1 << " s, " << t2 << " s, " << t3 << " s");
  // n grows ~4x per step; quadratic growth would be 16x, the bound is 9x.
  CHECK(t2 / t1 < 9.0);
  CHECK(t3 / t2 < 9.0);
}

TEST_CASE("points CSV round-trips exactly") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::random_points(rng, 50);
    std::vector<double> values(pts.size());
    std::normal_distribution<double> normal(0.0, 1e3);
    for (double& v : values) v = normal(rng);
    std::stringstream buffer;
    write_points_csv(buffer, pts, trial % 2 == 0 ? std::span<const double>(values) : std::span<const double>{});
    const PointTable back = read_points_csv(buffer);
    REQUIRE(back.points == pts);
    if (trial % 2 == 0) {
      REQUIRE(back.values.has_value());
      REQUIRE(*back.values == values);
    } else {
      REQUIRE_FALSE(back.values.has_value());
    }
  }
}

TEST_CASE("points CSV errors carry line numbers") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      (void)read_points_csv(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("0.1,0.2\n0.3\n") == 2);
  CHECK(line_of("0.1,0.2\n0.3,abc\n") == 2);
  CHECK(line_of("0.1,0.2\n\n0.3,1.5\n") == 3);
  CHECK(line_of("0.1,0.2,1\n0.3,0.4\n") == 2);
  CHECK(line_of("0.1,0.2,1,4\n") == 1);
  CHECK(line_of("0.1,,0.2\n") == 1);
  CHECK(line_of("0.1 , 0.2 \n\n") == 0);
}

TEST_CASE("model file round-trip preserves evaluations bit for bit") {
  const Dataset data = make_dataset({1089, 256, 33});
  for (const KernelSpec kernel : {KernelSpec::wendland(1), KernelSpec::gaussian(50)}) {
    BuildOptions options;
    options.policy = UncoveredPolicy::Error;
    const PUModel model = PUModel::build(data.nodes, data.values, data.centers, kernel, options);
    std::stringstream buffer;
    write_model(buffer, model);
    const PUModel back = read_model(buffer);
    CHECK(back.kernel() == model.kernel());
    CHECK(back.radius() == model.radius());
    CHECK(back.policy() == UncoveredPolicy::Error);
    CHECK(back.evaluate(data.eval_points) == model.evaluate(data.eval_points));
  }
}

TEST_CASE("malformed model files are rejected") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_model(in);
  };
  CHECK_THROWS_AS(parse("not-a-model 1\n"), ParseError);
  CHECK_THROWS_AS(parse("pucell-model 1\nkernel cubic 1\n"), ParseError);
  CHECK_THROWS_AS(parse("pucell-model 1\nkernel wendland 1\nradius 1\npolicy nearest\nnodes 1\n0.5 0.5\n"),
                  ParseError);
  CHECK_THROWS_AS(parse("pucell-model 1\nkernel wendland 1\nradius 1.4\npolicy nearest\nnodes 1\n0.5 0.5 1\n"
                        "centers 1\n0.5 0.5\nsubdomain 0 1\n3 1.0\n"),
                  ParseError);
  const PUModel ok = parse("pucell-model 1\nkernel wendland 1\nradius 1.4\npolicy nearest\nnodes 1\n0.5 0.5 1\n"
                           "centers 1\n0.5 0.5\nsubdomain 0 1\n0 2.0\n");
  CHECK(ok.evaluate({0.5, 0.5}) == 2.0);
}
