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

// roa: certified region-of-attraction estimates from the command line.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "roa/report.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config_path, const std::string& out_override, int threads, bool quiet) {
  roa::RunConfig cfg;
  try {
    cfg = roa::load_config(config_path);
  } catch (const roa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return roa::kExitConfig;
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (threads > 0) cfg.threads = threads;
  const roa::RunResult r = roa::run_pipeline(cfg, [&](const std::string& s) {
    if (!quiet) std::cerr << s << "\n";
  });
  roa::write_outputs(r, cfg.output_dir);
  if (r.exit_code != roa::kExitOk) {
    std::cerr << "failed: " << r.failure << "\n";
  } else {
    std::cout << "area omega0 " << r.base_area.measure << " omega_e " << r.union_area.measure << "\n";
  }
  std::cout << "wrote " << cfg.output_dir << "/report.txt\n";
  return r.exit_code;
}

int cmd_validate(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(slurp(path));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return roa::kExitConfig;
  }
  bool all = true;
  std::vector<roa::CertCheck> checks;
  try {
    checks = roa::validate_certs(doc);
  } catch (const std::exception& e) {
    std::cerr << "malformed certificate file: " << e.what() << "\n";
    return roa::kExitConfig;
  }
  for (const roa::CertCheck& c : checks) {
    std::cout << c.label << " " << (c.ok ? "ok" : "FAILED") << " " << c.detail << "\n";
    all = all && c.ok;
  }
  if (checks.empty()) {
    std::cerr << "no certificates in " << path << "\n";
    return roa::kExitSoundness;
  }
  return all ? roa::kExitOk : roa::kExitSoundness;
}

int cmd_true_roa(const std::string& name, int rays, const std::string& out) {
  roa::bench::BenchmarkCase b;
  try {
    b = roa::bench::load(name);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return roa::kExitConfig;
  }
  const std::string csv = roa::true_roa_csv(b, rays, {});
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream(out) << csv;
  }
  return roa::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified inner estimates of regions of attraction"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run the configured algorithm and write report.txt, contours/, certs.json");
  run->add_option("config", config_path, "JSON run configuration")->required();
  run->add_option("-o,--output", out_dir, "output directory (overrides output_dir)");
  run->add_option("-j,--threads", threads, "concurrent shift branches");
  run->add_flag("-q,--quiet", quiet, "no per-iteration log on stderr");

  std::string certs_path;
  auto* validate = app.add_subcommand("validate-certs", "re-check a certs.json without the solver");
  validate->add_option("certs", certs_path)->required();

  std::string bench_name, roa_out;
  int rays = 720;
  auto* truth = app.add_subcommand("true-roa", "boundary of the true region for a benchmark as CSV");
  truth->add_option("benchmark", bench_name)->required();
  truth->add_option("--rays", rays, "ray count for bisection-based boundaries")->check(CLI::PositiveNumber);
  truth->add_option("-o,--output", roa_out, "CSV path (default stdout)");

  std::string report_a, report_b;
  auto* compare = app.add_subcommand("compare", "area and extent table for two reports");
  compare->add_option("report_a", report_a)->required();
  compare->add_option("report_b", report_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : roa::kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, threads, quiet);
    if (*validate) return cmd_validate(certs_path);
    if (*truth) return cmd_true_roa(bench_name, rays, roa_out);
    if (*compare) {
      std::cout << roa::compare_reports(slurp(report_a), slurp(report_b));
      return roa::kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
