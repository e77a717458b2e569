#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dba/cli.hpp"
#include "support/testing.hpp"

using namespace dba;
using namespace dba::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dba");
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Scratch directory removed on destruction.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("dba-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
    return (dir / name).string();
  }
};

std::string line_with(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l.rfind(prefix, 0) == 0) return l;
  return "";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("examples lists the corpus") {
    Result r = cli({"examples"});
    CHECK(r.code == kExitOk);
    for (const auto& e : builtin_corpus()) CHECK(r.out.find(e.name + ":") != std::string::npos);
  }

  TEST_CASE("shipped corpus files match the builtins byte for byte") {
    fs::path dir = fs::path(DBA_SOURCE_DIR) / "corpus";
    int lag = 0;
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.path().extension() != ".lag") continue;
      ++lag;
      const CorpusEntry* e = find_builtin(f.path().stem().string());
      REQUIRE(e != nullptr);
      CHECK(e->lagrangian == slurp(f.path()));
      fs::path side = f.path();
      side.replace_extension(".eom");
      CHECK(fs::exists(side) == e->eom.has_value());
      if (e->eom) CHECK(*e->eom == slurp(side));
    }
    CHECK(lag == static_cast<int>(builtin_corpus().size()));
  }

  TEST_CASE("corpus text follows the documented grammar examples") {
    CHECK(find_builtin("cubic-nls")->lagrangian ==
          "fields phi, theta\nL = -1/2*Dt(theta)*phi^2 + 1/2*phi^4 - 1/2*Dx(phi)^2 - 1/2*Dx(theta)^2*phi^2\n");
    CHECK(find_builtin("kdv")->lagrangian ==
          "fields phi, psi\nL = 1/2*Dt(phi)*Dx(phi) + Dx(phi)^3 + Dx(phi)*Dx(psi) + 1/2*psi^2\n");
  }

  TEST_CASE("analyze formats") {
    Result j = cli({"--format", "json", "analyze", "cubic-nls"});
    REQUIRE(j.code == kExitOk);
    nlohmann::json doc = nlohmann::json::parse(j.out);
    CHECK(doc["multipliers"]["lambda1"]["text"] == "-phi*theta_xx - 2*phi_x*theta_x");
    CHECK(doc["multipliers"]["lambda2"]["text"] == "2*phi^2 - theta_x^2 + phi_xx/phi");

    Result l = cli({"analyze", "kdv", "--format", "latex"});
    CHECK(l.code == kExitOk);
    CHECK(l.out.find("\\tilde{c}_{1} &= -\\phi_{xx} + \\psi") != std::string::npos);

    Result p = cli({"analyze", "fourth-order-nls"});
    CHECK(p.code == kExitOk);
    CHECK(p.out.find("undetermined multipliers:") != std::string::npos);
    CHECK(p.out.find("lambda3") != std::string::npos);
  }

  TEST_CASE("analyze exit codes") {
    Scratch s;
    Result reg = cli({"analyze", s.write("regular.lag", "fields phi\nL = 1/2*Dt(phi)^2\n")});
    CHECK(reg.code == kExitError);
    CHECK(reg.err.find("partially regular Lagrangians unsupported") != std::string::npos);

    std::string bad = s.write("bad.lag", "fields phi\nL = Dt(Dx(phi))\n");
    Result parse_err = cli({"analyze", bad});
    CHECK(parse_err.code == kExitError);
    CHECK(parse_err.err == bad + ":2:8: Dt argument must be a declared field\n");

    Result inc = cli({"analyze", s.write("inc.lag", "fields phi\nL = phi\n")});
    CHECK(inc.code == kExitInconsistent);
    CHECK(inc.err.find("inconsistent dynamics") != std::string::npos);

    Result open = cli({"analyze", "kdv", "--max-iterations", "1"});
    CHECK(open.code == kExitNoClosure);
    CHECK(open.err.find("no closure") != std::string::npos);

    CHECK(cli({"analyze", "no-such-system"}).code == kExitError);
    CHECK(cli({"analyze", "cubic-nls", "--grid", "100"}).code == kExitError);
    CHECK(cli({"analyze", "cubic-nls", "--bogus"}).code == kExitError);
    CHECK(cli({"analyze"}).code == kExitError);
  }

  TEST_CASE("verify echoes the seed") {
    Result r = cli({"verify", "cubic-nls", "--grid", "64"});
    CHECK(r.code == kExitOk);
    CHECK(line_with(r.out, "seed:") == "seed: 42");
    CHECK(line_with(r.out, "PASS") == "PASS");
    Result s = cli({"verify", "fourth-order-nls", "--seed", "7"});
    CHECK(s.code == kExitOk);
    CHECK(line_with(s.out, "seed:") == "seed: 7");
  }

  TEST_CASE("verify rejects a sign-flipped corpus file") {
    Scratch s;
    const CorpusEntry* e = find_builtin("kdv");
    std::string text = e->lagrangian;
    auto pos = text.find("+ Dx(phi)^3");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 1, "-");
    std::string path = s.write("kdv.lag", text);
    s.write("kdv.eom", *e->eom);
    Result r = cli({"verify", path});
    CHECK(r.code == kExitError);
    CHECK(line_with(r.out, "FAIL") == "FAIL");
    std::string err = line_with(r.out, "max relative error:");
    REQUIRE(!err.empty());
    CHECK(std::stod(err.substr(std::string("max relative error:").size())) > 1e-2);
    // The unmodified copy passes.
    s.write("kdv.lag", e->lagrangian);
    CHECK(cli({"verify", path}).code == kExitOk);
  }

  TEST_CASE("DBA_COLOR=0 disables escape sequences") {
    ::setenv("DBA_COLOR", "0", 1);
    Result r = cli({"verify", "cubic-nls", "--grid", "64"});
    ::unsetenv("DBA_COLOR");
    CHECK(r.out.find('\x1b') == std::string::npos);
    // With color forced on the verdict is highlighted.
    RunConfig cfg;
    cfg.command = Command::Verify;
    cfg.input = "cubic-nls";
    cfg.grid_n = 64;
    std::ostringstream out, err;
    CHECK(run(cfg, out, err, true) == kExitOk);
    CHECK(out.str().find("\x1b[32mPASS") != std::string::npos);
  }

  TEST_CASE("evolve output") {
    Result r = cli({"evolve", "cubic-nls", "--t-end", "0.01", "--grid", "128", "--seed", "5"});
    REQUIRE(r.code == kExitOk);
    CHECK(line_with(r.out, "# seed:") == "# seed: 5");
    CHECK(line_with(r.out, "t,") == "t,mass,hamiltonian");
    CHECK(line_with(r.out, "# steps:") == "# steps: 100");
    std::string drift = line_with(r.out, "# max relative hamiltonian drift:");
    REQUIRE(!drift.empty());
    CHECK(std::stod(drift.substr(drift.find(':') + 1)) < 1e-6);
  }

  TEST_CASE("evolve KdV reports the trough") {
    Result r = cli({"evolve", "kdv", "--t-end", "1"});
    REQUIRE(r.code == kExitOk);
    std::string t = line_with(r.out, "# trough at x = ");
    REQUIRE(!t.empty());
    double x = std::stod(t.substr(std::string("# trough at x = ").size()));
    CHECK(std::abs(x - 24.0) < 2 * 40.0 / 256);
  }

  TEST_CASE("evolve aborts on an oversized step") {
    Result r = cli({"evolve", "cubic-nls", "--dt", "1e-1"});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("at step") != std::string::npos);
    Result u = cli({"evolve", "fourth-order-nls"});
    CHECK(u.code == kExitError);
  }
}
