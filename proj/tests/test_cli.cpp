#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "libredense/cli.hpp"

using namespace libredense;

namespace {

  struct Run {
    int            code = 0;
    std::string    out;
    std::string    err;
    nlohmann::json json() const {
      return nlohmann::json::parse(out);
    }
  };

  Run run(std::vector<std::string> const& args) {
    std::ostringstream out;
    std::ostringstream err;
    Run                r;
    r.code = cli_run(args, out, err);
    r.out  = out.str();
    r.err  = err.str();
    return r;
  }

  std::string data(std::string const& name) {
    return std::string(LIBREDENSE_TEST_DATA) + "/" + name;
  }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == exit_usage);
  CHECK(run({"frobnicate"}).code == exit_usage);
  CHECK(run({"check-free"}).code == exit_usage);
  CHECK(run({"check-free", "--symbolic", "--words", "1 x"}).code == exit_usage);
  CHECK(run({"check-free", "--group", "sym:3", "--perms", "(1 2"}).code == exit_usage);
  CHECK(run({"construct", "prod2", "--profile", "/nonexistent"}).code == exit_usage);
  Run const help = run({"--help"});
  CHECK(help.code == exit_ok);
  CHECK(help.out.find("check-free") != std::string::npos);
}

TEST_CASE("check-free") {
  Run const free = run({"check-free", "--symbolic", "--words", "1 2, 2 1", "--bound", "6"});
  CHECK(free.code == exit_ok);
  CHECK(free.json()["free"] == true);
  CHECK(free.json()["verdict"]["free"] == true);

  Run const dep = run({"check-free", "--symbolic", "--words", "1 1, 1 1 1"});
  CHECK(dep.code == exit_not_verified);
  CHECK(dep.json()["graph"]["rank"] == 1);

  Run const s3 = run({"check-free", "--group", "sym:3", "--perms", "(1 2),(1 2 3)", "--bound", "4"});
  CHECK(s3.code == exit_not_verified);
  CHECK(s3.json()["witness"] == "1 1");

  Run const s3_pair = run({"check-free", "--group", "sym:3", "--perms", "(1 2),(1 3)", "--bound", "6"});
  CHECK(s3_pair.code == exit_not_verified);
  CHECK(s3_pair.json()["witness"].is_string());

  Run const naive
      = run({"check-free", "--group", "sym:3", "--perms", "(1 2),(1 2 3)", "--bound", "4", "--naive"});
  CHECK(naive.json()["witness"] == "1 1");
  CHECK(naive.json()["oracle"] == "naive");

  Run const supp = run({"check-free", "--group", "supp:10", "--perms", "(1 2 3),(3 4 5)", "--bound", "2"});
  CHECK(supp.code == exit_ok);
}

TEST_CASE("construct") {
  Run const p1 = run({"construct", "prod1", "--word", "1 2 -1"});
  CHECK(p1.code == exit_ok);
  CHECK(p1.json()["nontrivial"] == true);

  Run const ext = run({"construct", "extend", "--words", "1 2", "--total-rank", "3"});
  CHECK(ext.code == exit_ok);
  CHECK(ext.json()["words"] == nlohmann::json::array({"1 2", "3"}));

  Run const dense = run({"construct", "dense-family", "--profile", data("profile_small.txt"),
                         "--bound", "3", "--box", "0:2 1;1:3 1 2"});
  CHECK(dense.code == exit_ok);
  CHECK(dense.json()["member"] == true);
  CHECK(dense.json()["size"] == 21);
  CHECK(dense.json()["witness"]["coords"]["1"] == "3 1 2");

  Run const bad_box = run({"construct", "dense-family", "--profile", data("profile_small.txt"),
                           "--bound", "3", "--box", "2:1 2 3 4 5 6 7 8"});
  CHECK(bad_box.code == exit_usage);

  Run const fin = run({"construct", "fin-case", "--quotient", data("quotient_s3.txt"),
                       "--targets", "1, 2 1"});
  CHECK(fin.code == exit_ok);
  CHECK(fin.json()["free"] == true);
  CHECK(fin.json()["in_cosets"] == true);

  Run const dens = run({"construct", "free-density", "--quotient", data("quotient_s3.txt"),
                        "--targets", "1 2", "--total-rank", "3"});
  CHECK(dens.code == exit_ok);
  CHECK(dens.json()["words"].size() == 3);

  Run const embed = run({"embed", "f2", "--count", "3"});
  CHECK(embed.code == exit_ok);
  CHECK(embed.json()["words"][0] == "-1 2 1");

  Run const ext3 = run({"embed", "f2", "--count", "2", "--tuple", "1, 2, 3"});
  CHECK(ext3.code == exit_ok);
  CHECK(ext3.json()["words"].size() == 3);
  CHECK(run({"embed", "f2", "--count", "2", "--tuple", "1, 1"}).code == exit_not_verified);
}

TEST_CASE("experiments") {
  Run const a = run({"sample", "dixon", "--config", data("dixon.conf")});
  Run const b = run({"sample", "dixon", "--config", data("dixon.conf")});
  CHECK(a.code == exit_ok);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 9);

  Run const reseeded = run({"sample", "dixon", "--config", data("dixon.conf"), "--seed", "3"});
  CHECK(reseeded.out != a.out);

  auto const dir = std::filesystem::temp_directory_path() / "libredense_cli_test";
  std::filesystem::create_directories(dir);
  std::string const out = (dir / "d.jsonl").string();
  Run const demo = run({"demo", "density", "--group", "free:2:3", "--samples", "4", "--bound", "3",
                        "--output", out});
  CHECK(demo.code == exit_ok);
  CHECK(demo.json()["type"] == "aggregate");
  CHECK(std::filesystem::exists(out));
  std::filesystem::remove_all(dir);

  CHECK(run({"demo", "density", "--group", "sym:4"}).code == exit_usage);
  CHECK(run({"sample", "dixon", "--samples", "3"}).code == exit_usage);
}
