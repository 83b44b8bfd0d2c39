// Copyright 2026 The roa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "roa/report.hpp"
#include "test_helpers.hpp"

using namespace roa;
using nlohmann::json;

namespace {

json cubic_config() {
  return json::parse(R"({
    "system": {"name": "cubic", "dim": 2,
               "f": [[{"e": [1, 0], "c": -1.0}, {"e": [3, 0], "c": 1.0}], [{"e": [0, 1], "c": -1.0}]],
               "domain_box": [[-2, 2], [-2, 2]]},
    "algorithm": "rcomssf", "deg_V": 2, "N_I": 5, "branch_N_I": 5,
    "shift_plan": {"rounds": [{"centers": [[0.5, 0.0]], "N": "identity"}]},
    "oracle": {"mc_samples": 2000, "sim_samples": 40, "vdot_samples": 300, "contour_rays": 36},
    "seed": 3
  })");
}

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("benchmark configs and overrides") {
  const RunConfig c = parse_config(json::parse(R"({"system": "vdp", "algorithm": "a2", "N_I": 12, "seed": 9})"));
  CHECK(c.problem.name == "vdp");
  CHECK(c.algorithm == bench::Algorithm::A2);
  CHECK(c.vs.max_iter == 12);
  CHECK(c.vs.deg_V == 6);
  CHECK(c.seed == 9);
  CHECK(c.branch_vs.v_gap == 0.0);
}

TEST_CASE("config rejections") {
  auto rejects = [](const char* text) { CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError); };
  rejects(R"({"system": "vdp", "deg_v": 4})");
  rejects(R"({"system": "vdp", "deg_V": 5})");
  rejects(R"({"system": "nope"})");
  rejects(R"({"algorithm": "a1"})");
  rejects(R"({"system": "vdp", "algorithm": "a9"})");
  rejects(R"({"system": "vdp", "tolerances": {"eps": 1}})");
  rejects(R"({"system": "vdp", "oracle": {"mc_samples": 10}})");
  rejects(R"({"system": "vdp", "shift_plan": {"rounds": [{"centers": [[1, 1, 1]]}]}})");
  rejects(R"({"system": "vdp", "shift_plan": {"rounds": [{"entries": [{"direction": [1, 0], "sigma": 1.5}]}]}})");
  rejects(R"({"system": {"dim": 1, "f": [[{"e": [1], "c": 1.0}]]}})");   // not Hurwitz
  rejects(R"({"system": {"dim": 1, "f": [[{"e": [0], "c": 1.0}]]}})");   // f(0) != 0
  rejects(R"({"system": {"dim": 2, "f": [[{"e": [1], "c": -1.0}], []]}})");
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("inline systems and round trip") {
  const RunConfig c = parse_config(cubic_config());
  CHECK(c.problem.sys.dim == 2);
  CHECK(c.problem.plan.rounds[0].entries.size() == 1);
  CHECK(quadratic_matrix(c.problem.V0)(0, 0) == doctest::Approx(0.5));
  const RunConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  const Polynomial p = poly_from_json(poly_to_json(c.problem.sys.f[0]), 2);
  CHECK((p - c.problem.sys.f[0]).is_zero());
}

TEST_CASE("pipeline outputs are reproducible and certificates re-validate") {
  const RunConfig c = parse_config(cubic_config());
  const RunResult a = run_pipeline(c);
  REQUIRE(a.exit_code == kExitOk);
  REQUIRE(a.tree.nodes.size() == 2);
  CHECK(a.gates.size() == a.tree.accepted().size());
  for (const SoundnessGate& g : a.gates) CHECK(g.passed());
  CHECK(a.union_area.measure >= a.base_area.measure);
  const RunResult b = run_pipeline(c);
  CHECK(render_report(a) == render_report(b));

  const json certs = certs_to_json(a);
  for (const CertCheck& chk : validate_certs(certs)) {
    CAPTURE(chk.detail);
    CHECK(chk.ok);
  }
  json tampered = certs;
  tampered["certificates"][0]["gram_V"]["Q"][0][0] = -1.0;
  CHECK(!validate_certs(tampered)[0].ok);
  json shifted_V = certs;
  shifted_V["certificates"][0]["V"][0]["c"] = 123.0;
  CHECK(!validate_certs(shifted_V)[0].ok);

  const std::string dir = (std::filesystem::temp_directory_path() / "roa_test_outputs").string();
  std::filesystem::remove_all(dir);
  write_outputs(a, dir);
  CHECK(std::filesystem::exists(dir + "/report.txt"));
  CHECK(std::filesystem::exists(dir + "/certs.json"));
  const std::string csv = slurp(dir + "/contours/omega_e.csv");
  CHECK(csv.rfind("dir_index,x1,x2,set_id\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 36);
  const std::string cmp = compare_reports(render_report(a), render_report(b));
  CHECK(cmp.find("area omega_e") != std::string::npos);
}

TEST_CASE("ray contours flag non-star-shaped sets") {
  // Annulus-like indicator seen from the origin: two crossings per ray.
  auto ring = [](const Eigen::VectorXd& x) { return x.norm() < 1.0 || (x.norm() > 2.0 && x.norm() < 3.0); };
  const auto pts = ray_contour(ring, Eigen::Vector2d::Zero(), 0, 1, 8, 4.0);
  CHECK(pts.size() == 8 * 3);
  for (const ContourPoint& p : pts) {
    const double r = p.x.norm();
    CHECK(std::min({std::abs(r - 1.0), std::abs(r - 2.0), std::abs(r - 3.0)}) < 1e-6);
  }
}

TEST_CASE("true region boundary for the bistable system") {
  const bench::BenchmarkCase b = bench::load("bistable");
  std::istringstream in(true_roa_csv(b, 72, {}));
  std::string line;
  std::getline(in, line);
  CHECK(line == "dir_index,x1,x2,set_id");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string k, xs;
    std::getline(ls, k, ',');
    std::getline(ls, xs, ',');
    CHECK(std::stod(xs) == doctest::Approx(0.5).epsilon(1e-6));
  }
  CHECK(rows > 0);
}
