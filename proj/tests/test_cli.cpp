#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "test_support.hpp"

using testing_support::scratch_dir;
using testing_support::slurp;
using testing_support::write_synthetic_project;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("\"") + EPICURVE_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("exit codes") {
  const auto dir = scratch_dir("cli_exit_codes");
  const auto config = write_synthetic_project(dir, 16);
  const auto log = dir / "log.txt";
  const std::string cfg = "--config \"" + config.string() + "\"";

  CHECK(run_cli("", log) == 2);
  CHECK(run_cli("features", log) == 2);
  CHECK(run_cli("features --config \"" + (dir / "nope.json").string() + "\"", log) == 2);

  CHECK(run_cli("select " + cfg, log) == 2);
  CHECK(slurp(log).find("run `features` first") != std::string::npos);

  CHECK(run_cli("features " + cfg, log) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "features.csv"));
  CHECK(run_cli("associate " + cfg, log) == 0);

  std::ofstream(dir / "cases.csv", std::ios::app) << "XXa,2022-01-01,-4\n";
  CHECK(run_cli("features " + cfg, log) == 3);
  CHECK(slurp(log).find("negative count") != std::string::npos);
}

TEST_CASE("command-line overrides") {
  const auto dir = scratch_dir("cli_overrides");
  const auto config = write_synthetic_project(dir, 24);
  const auto log = dir / "log.txt";
  const auto out = dir / "elsewhere";
  CHECK(run_cli("all --config \"" + config.string() + "\" --out \"" + out.string() + "\" --seed 5 --top 2 --bottom 1",
                log) == 0);
  CHECK(std::filesystem::exists(out / "manifest.txt"));
  CHECK_FALSE(std::filesystem::exists(dir / "out"));
  // title, blank line, header, underline and three ranked rows
  std::ifstream report(out / "report_region.txt");
  int lines = 0;
  for (std::string l; std::getline(report, l);) ++lines;
  CHECK(lines == 2 + 2 + 3);
}
