#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "libredense/harness.hpp"
#include "libredense/perm.hpp"

using namespace libredense;

namespace {

  std::string slurp(std::filesystem::path const& p) {
    std::ifstream      in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::vector<nlohmann::json> lines(std::string const& jsonl) {
    std::vector<nlohmann::json> out;
    std::istringstream          in(jsonl);
    for (std::string line; std::getline(in, line);) {
      out.push_back(nlohmann::json::parse(line));
    }
    return out;
  }

}  // namespace

TEST_CASE("group specs") {
  CHECK(GroupSpec::parse("sym:7").degree == 7);
  CHECK(GroupSpec::parse("supp:12").bound == 12);
  GroupSpec const f = GroupSpec::parse("free:3:4");
  CHECK(f.kind == GroupSpec::Kind::free);
  CHECK(f.rank == 3);
  CHECK(f.degree == 4);
  CHECK(GroupSpec::parse("product:a/b.txt").path == "a/b.txt");
  for (std::string s : {"sym:7", "supp:12", "free:3:4", "product:x", "quotient:y"}) {
    CHECK(GroupSpec::parse(s).to_string() == s);
  }
  CHECK_THROWS_AS(GroupSpec::parse("sym:0"), ParseError);
  CHECK_THROWS_AS(GroupSpec::parse("alt:5"), ParseError);
  CHECK_THROWS_AS(GroupSpec::parse("free:2"), ParseError);
  CHECK_THROWS_AS(GroupSpec::parse("product:"), ParseError);
}

TEST_CASE("config files") {
  ExperimentConfig const c = parse_config(
      "# sampling\nkind=dixon-sample\ngroup=sym:9\ntuple_size=3\nword_bound=5\n"
      "samples=40\nseed=77\ntimeout_ms=500\nrecord_timing=yes\n");
  CHECK(c.kind == ExperimentKind::dixon_sample);
  CHECK(c.group.degree == 9);
  CHECK(c.tuple_size == 3);
  CHECK(c.word_bound == 5);
  CHECK(c.sample_count == 40);
  CHECK(c.seed == 77);
  CHECK(c.trial_timeout.count() == 500);
  CHECK(c.record_timing);
  CHECK_THROWS_AS(parse_config("colour=blue\n"), ParseError);
  CHECK_THROWS_AS(parse_config("samples=many\n"), ParseError);
  CHECK_THROWS_AS(parse_config("samples\n"), ParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/config"), IoError);
  ExperimentConfig bad = c;
  bad.sample_count     = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("seed from the environment") {
  ExperimentConfig c;
  c.seed = 1;
  setenv("LIBREDENSE_SEED", "99", 1);
  apply_environment(c);
  CHECK(c.seed == 99);
  setenv("LIBREDENSE_SEED", "nope", 1);
  CHECK_THROWS_AS(apply_environment(c), ParseError);
  unsetenv("LIBREDENSE_SEED");
  apply_environment(c);
  CHECK(c.seed == 99);
}

TEST_CASE("dixon sampling is reproducible") {
  ExperimentConfig c;
  c.group        = GroupSpec::parse("sym:8");
  c.word_bound   = 5;
  c.sample_count = 30;
  c.seed         = 4;
  ReportRecord const a = dixon_sample(c);
  ReportRecord const b = dixon_sample(c);
  CHECK(to_jsonl(a) == to_jsonl(b));
  auto const records = lines(to_jsonl(a));
  REQUIRE(records.size() == 31);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(records[i]["schema"] == "1");
    CHECK(records[i]["type"] == "trial");
    CHECK(records[i]["index"] == i);
    CHECK(records[i]["tuple"].size() == 2);
    CHECK_FALSE(records[i].contains("millis"));
  }
  nlohmann::json const agg = records.back();
  CHECK(agg["type"] == "aggregate");
  CHECK(agg["samples"] == 30);
  CHECK(agg["free_count"] == a.free_count());
  CHECK(agg["fraction"].get<double>() == doctest::Approx(a.free_count() / 30.0));

  ExperimentConfig other = c;
  other.seed             = 5;
  CHECK(to_jsonl(dixon_sample(other)) != to_jsonl(a));

  c.group = GroupSpec::parse("free:2:3");
  CHECK_THROWS_AS(dixon_sample(c), InvalidArgument);
}

TEST_CASE("density demos succeed") {
  ExperimentConfig c;
  c.kind         = ExperimentKind::density_demo;
  c.word_bound   = 4;
  c.sample_count = 10;
  c.seed         = 3;
  for (std::string g : {"supp:8", "free:2:3", "free:3:2"}) {
    c.group              = GroupSpec::parse(g);
    ReportRecord const r = density_demo(c);
    CHECK(r.success_count() == 10);
    CHECK(r.free_count() == 10);
  }
  c.group = GroupSpec::parse("sym:5");
  CHECK_THROWS_AS(density_demo(c), InvalidArgument);
}

TEST_CASE("product density demo") {
  ExperimentConfig c;
  c.kind         = ExperimentKind::density_demo;
  c.group        = GroupSpec::parse(std::string("product:") + LIBREDENSE_TEST_DATA + "/profile_small.txt");
  c.tuple_size   = 3;
  c.word_bound   = 3;
  c.sample_count = 10;
  ReportRecord const r = density_demo(c);
  CHECK(r.success_count() == 10);
  for (TrialRecord const& t : r.trials) {
    CHECK(t.tuple.size() == 3);
    CHECK(t.verdict->free());
  }
  c.exhaustive           = true;
  ReportRecord const all = density_demo(c);
  // boxes on <= 2 of the visible coordinates (2, 3): 1 + 2 + 6 + 12
  CHECK(all.trials.size() == 21);
  CHECK(all.success_count() == 21);
}

TEST_CASE("report files") {
  auto const dir = std::filesystem::temp_directory_path() / "libredense_harness_test";
  std::filesystem::create_directories(dir);
  ExperimentConfig c;
  c.group        = GroupSpec::parse("supp:6");
  c.word_bound   = 4;
  c.sample_count = 5;
  c.output       = (dir / "r.jsonl").string();
  c.csv          = (dir / "r.csv").string();
  ReportRecord const r = dixon_sample(c);
  write_report(r);
  CHECK(slurp(c.output) == to_jsonl(r));
  std::string const csv = slurp(c.csv);
  CHECK(csv.rfind("index,free,success,witness\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  c.output = (dir / "missing" / "r.jsonl").string();
  CHECK_THROWS_AS(write_report(ReportRecord{c, {}}), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("every element of S_2 squares to the identity") {
  ExperimentConfig c;
  c.group        = GroupSpec::parse("sym:2");
  c.tuple_size   = 1;
  c.word_bound   = 2;
  c.sample_count = 50;
  ReportRecord const r = dixon_sample(c);
  CHECK(r.free_count() == 0);
  CHECK(r.fraction() == 0.0);
}

TEST_CASE("free verdicts in a report re-verify from the serialized tuples") {
  ExperimentConfig c;
  c.group        = GroupSpec::parse("sym:7");
  c.word_bound   = 5;
  c.sample_count = 60;
  c.seed         = 12;
  ReportRecord const r        = dixon_sample(c);
  auto const         records  = lines(to_jsonl(r));
  std::size_t        recount  = 0;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    std::vector<FinPerm> tuple;
    for (auto const& s : records[i]["tuple"]) {
      tuple.push_back(parse_fin_perm(s.get<std::string>()));
    }
    bool const free = l_free_check(tuple, 5, FinPermCarrier{7}).free();
    CHECK(free == records[i]["free"].get<bool>());
    recount += free ? 1 : 0;
  }
  CHECK(records.back()["free_count"] == recount);
  CHECK(records.back()["fraction"].get<double>() == doctest::Approx(recount / 60.0));
}

TEST_CASE("free group density over random S_3 quotients") {
  ExperimentConfig c;
  c.kind         = ExperimentKind::density_demo;
  c.group        = GroupSpec::parse("free:2:3");
  c.sample_count = 100;
  c.seed         = 8;
  ReportRecord const r = density_demo(c);
  CHECK(r.success_count() == 100);
}

TEST_CASE("product density on the (2, 3, 4) profile, every small box") {
  ExperimentConfig c;
  c.kind       = ExperimentKind::density_demo;
  c.group      = GroupSpec::parse(std::string("product:") + LIBREDENSE_TEST_DATA + "/profile_234.txt");
  c.word_bound = 4;
  c.exhaustive = true;
  ReportRecord const r = density_demo(c);
  CHECK(r.trials.size() == 237);
  CHECK(r.success_count() == 237);
}
