#include "libredense/cli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "libredense/freetop.hpp"
#include "libredense/harness.hpp"
#include "libredense/oracle.hpp"
#include "libredense/perm.hpp"
#include "libredense/product.hpp"
#include "libredense/stallings.hpp"

namespace libredense {

  namespace {

    using nlohmann::json;

    class UsageError : public Error {
     public:
      using Error::Error;
    };

    json words_json(std::span<Word const> words) {
      json out = json::array();
      for (Word const& w : words) {
        out.push_back(to_string(w));
      }
      return out;
    }

    std::vector<std::string> split_top(std::string const& text, char sep) {
      std::vector<std::string> out;
      std::string              cur;
      for (char c : text) {
        if (c == sep) {
          out.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      out.push_back(cur);
      return out;
    }

    // "0:2 1;2:1 3 2" -> {0: (2 1), 2: (1 3 2)}
    ProductBox parse_product_box(std::string const& text) {
      ProductBox box;
      if (text.find_first_not_of(" \t") == std::string::npos) {
        return box;
      }
      for (std::string const& part : split_top(text, ';')) {
        std::size_t const colon = part.find(':');
        if (colon == std::string::npos) {
          throw ParseError("box entry \"" + part + "\" needs coordinate:images");
        }
        std::size_t coord = 0;
        try {
          coord = std::stoul(part.substr(0, colon));
        } catch (std::exception const&) {
          throw ParseError("bad coordinate in \"" + part + "\"");
        }
        box.emplace(coord, parse_fin_perm(part.substr(colon + 1)));
      }
      return box;
    }

    struct Options {
      // check-free
      bool                     symbolic = false;
      bool                     naive    = false;
      std::string              words;
      std::uint32_t            rank = 0;
      std::string              group;
      std::string              perms;
      std::size_t              bound = 6;
      // construct
      std::string              word;
      std::string              profile;
      std::uint32_t            n = 2;
      std::uint64_t            seed = 0;
      std::string              box;
      std::vector<std::string> overrides;
      std::uint32_t            total_rank = 0;
      std::string              quotient;
      std::string              targets;
      std::size_t              h_bound = 8;
      std::uint32_t            count   = 4;
      // experiments
      std::string              config;
      std::string              output;
      std::string              csv;
      std::size_t              samples    = 100;
      std::uint64_t            timeout_ms = 10'000;
      bool                     exhaustive = false;
      bool                     timing     = false;
    };

    int check_free(Options const& o, CLI::App const& cmd, std::ostream& out) {
      if (o.symbolic) {
        if (cmd.count("--words") == 0) {
          throw UsageError("check-free --symbolic needs --words");
        }
        auto const words = parse_word_list(o.words, o.rank);
        std::uint32_t const rank = words.empty() ? std::max(o.rank, 1U) : words.front().rank();
        SubgroupGraph const g    = build_graph(words, rank);
        bool const          free = is_free_basis(words, rank);
        json result = {{"method", "stallings"},
                       {"words", words_json(words)},
                       {"rank", rank},
                       {"graph", {{"vertices", g.vertex_count()}, {"edges", g.edge_count()},
                                  {"rank", graph_rank(g)}}},
                       {"free", free}};
        if (cmd.count("--bound") != 0 && !words.empty()) {
          result["verdict"] = l_free_check(words, o.bound, WordCarrier{rank});
        }
        out << result.dump() << "\n";
        return free ? exit_ok : exit_not_verified;
      }
      if (cmd.count("--group") == 0 || cmd.count("--perms") == 0) {
        throw UsageError("check-free needs --symbolic --words, or --group with --perms");
      }
      GroupSpec const spec = GroupSpec::parse(o.group);
      auto const      supp = parse_supp_perm_list(o.perms);
      FreenessVerdict verdict;
      if (spec.kind == GroupSpec::Kind::sym) {
        std::vector<FinPerm> tuple;
        for (SuppPerm const& f : supp) {
          tuple.push_back(f.to_fin_perm(spec.degree));
        }
        FinPermCarrier const c{spec.degree};
        verdict = o.naive ? l_free_naive(tuple, o.bound, c) : l_free_check(tuple, o.bound, c);
      } else if (spec.kind == GroupSpec::Kind::supp) {
        verdict = o.naive ? l_free_naive(supp, o.bound, SuppPermCarrier{})
                          : l_free_check(supp, o.bound, SuppPermCarrier{});
      } else {
        throw UsageError("check-free --group takes sym:<m> or supp:<bound>");
      }
      json result = verdict;
      result["group"]  = spec.to_string();
      result["oracle"] = o.naive ? "naive" : "pruned";
      out << result.dump() << "\n";
      return verdict.free() ? exit_ok : exit_not_verified;
    }

    int construct_prod1(Options const& o, std::ostream& out) {
      Word const         w = o.rank == 0 ? parse_word(o.word) : parse_word(o.word, o.rank);
      Prod1Witness const p = prod1_witness(w);
      FinPerm const      v = evaluate_word(w, p.tuple, FinPermCarrier{p.degree});
      json               tuple = json::array();
      for (FinPerm const& f : p.tuple) {
        tuple.push_back(to_string(f));
      }
      out << json{{"word", to_string(w)}, {"degree", p.degree}, {"tuple", tuple},
                  {"value", to_cycle_string(v)}, {"nontrivial", !v.is_identity()}}
                 .dump()
          << "\n";
      return v.is_identity() ? exit_not_verified : exit_ok;
    }

    json family_json(PlantedFamily const& family, std::string const& label) {
      json tuple = json::array();
      for (ProductElement const& e : family.tuple) {
        tuple.push_back(to_json(e, label));
      }
      json plantings = json::array();
      for (Planting const& p : family.plantings) {
        plantings.push_back({{"word", to_string(p.word)}, {"coordinate", p.coordinate}});
      }
      return {{"tuple", tuple}, {"plantings", plantings}};
    }

    int construct_prod2(Options const& o, std::ostream& out) {
      ProfilePtr const    profile = load_profile(o.profile);
      PlantedFamily const family  = prod2_family(profile, o.n, o.bound);
      FreenessVerdict const v     = l_free_check(family.tuple, o.bound, ProductCarrier{profile});
      json                  result = family_json(family, o.profile);
      result["verdict"]            = v;
      out << result.dump() << "\n";
      return v.free() ? exit_ok : exit_not_verified;
    }

    int construct_dense(Options const& o, CLI::App const& cmd, std::ostream& out) {
      ProfilePtr const  profile = load_profile(o.profile);
      DenseFamily const family  = prod_main_family(profile, o.bound, o.seed);
      json              shadow  = json::object();
      json result = {{"size", family.size()},
                     {"subsets", family.subsets().size()},
                     {"visible", profile->visible_count()},
                     {"reserve", profile->reserve_count()},
                     {"bound", o.bound},
                     {"backing_attempt", family.backing_attempt()}};
      int status = exit_ok;
      if (cmd.count("--box") != 0) {
        ProductBox const      box = parse_product_box(o.box);
        ProductElement const& h   = dense_witness(family, box);
        bool const            member = box_member(h, box);
        result["witness"] = to_json(h, o.profile);
        result["member"]  = member;
        status            = member ? exit_ok : exit_not_verified;
      }
      out << result.dump() << "\n";
      return status;
    }

    int construct_perturb(Options const& o, std::ostream& out) {
      ProfilePtr const    profile = load_profile(o.profile);
      PlantedFamily const family  = prod2_family(profile, o.n, o.bound);
      Overrides           overrides;
      for (std::string const& text : o.overrides) {
        auto const parts = split_top(text, ':');
        if (parts.size() != 3) {
          throw ParseError("override \"" + text + "\" must read element:coordinate:images");
        }
        try {
          overrides[{std::stoul(parts[0]), std::stoul(parts[1])}] = parse_fin_perm(parts[2]);
        } catch (std::logic_error const&) {
          throw ParseError("bad override \"" + text + "\"");
        }
      }
      PerturbResult const   r = prod4_perturb(family, overrides, o.bound);
      FreenessVerdict const v = l_free_check(r.tuple, o.bound, ProductCarrier{profile});
      json affected = json::array();
      for (Planting const& p : r.report.affected) {
        affected.push_back({{"word", to_string(p.word)}, {"coordinate", p.coordinate}});
      }
      json tuple = json::array();
      for (ProductElement const& e : r.tuple) {
        tuple.push_back(to_json(e, o.profile));
      }
      out << json{{"tuple", tuple},
                  {"touched", r.report.touched},
                  {"affected", affected},
                  {"guaranteed", r.report.guaranteed},
                  {"verdict", v}}
                 .dump()
          << "\n";
      return v.free() ? exit_ok : exit_not_verified;
    }

    int construct_extend(Options const& o, std::ostream& out) {
      auto const words  = parse_word_list(o.words, o.total_rank);
      auto const result = extend_with_fresh(words, o.total_rank);
      bool const free   = is_free_basis(result, o.total_rank);
      out << json{{"words", words_json(result)}, {"free", free}}.dump() << "\n";
      return free ? exit_ok : exit_not_verified;
    }

    int construct_fin_case(Options const& o, std::ostream& out) {
      FiniteQuotient const       q       = load_quotient(o.quotient);
      auto const                 targets = parse_word_list(o.targets, q.rank());
      std::vector<FinCaseTarget> input;
      for (Word const& g : targets) {
        input.push_back({g, CosetNeighborhood::around(q, g)});
      }
      FinCaseResult const r    = fin_case_perturb(input, o.h_bound);
      bool const          free = is_free_basis(r.f, q.rank());
      bool                in   = true;
      for (std::size_t i = 0; i < input.size(); ++i) {
        in = in && input[i].neighborhood.contains(r.f[i]);
      }
      out << json{{"m", r.m},
                  {"y", to_string(r.pair.y)},
                  {"z", to_string(r.pair.z)},
                  {"h1", words_json(r.h1)},
                  {"h2", words_json(r.h2)},
                  {"f", words_json(r.f)},
                  {"in_cosets", in},
                  {"free", free}}
                 .dump()
          << "\n";
      return free && in ? exit_ok : exit_not_verified;
    }

    int construct_free_density(Options const& o, std::ostream& out) {
      FiniteQuotient const q       = load_quotient(o.quotient);
      auto const           targets = parse_word_list(o.targets, q.rank());
      std::vector<CosetNeighborhood> constraints;
      for (Word const& g : targets) {
        constraints.push_back(CosetNeighborhood::around(q, g));
      }
      std::uint32_t const total = std::max(o.total_rank, q.rank());
      auto const          tuple = density_witness_free_group(q.rank(), constraints, total, o.h_bound);
      bool const          free  = is_free_basis(tuple, total);
      bool                in    = true;
      for (std::size_t i = 0; i < constraints.size(); ++i) {
        in = in && constraints[i].contains(tuple[i]);
      }
      out << json{{"words", words_json(tuple)}, {"in_cosets", in}, {"free", free}}.dump() << "\n";
      return free && in ? exit_ok : exit_not_verified;
    }

    int embed_f2(Options const& o, CLI::App const& cmd, std::ostream& out) {
      std::vector<Word> words;
      if (cmd.count("--tuple") != 0) {
        words = countable_extension(parse_word_list(o.words, o.rank), o.count);
      } else {
        for (std::uint32_t i = 1; i <= o.count; ++i) {
          words.push_back(f2_embed(i));
        }
      }
      bool const free = is_free_basis(words);
      out << json{{"words", words_json(words)}, {"free", free}}.dump() << "\n";
      return free ? exit_ok : exit_not_verified;
    }

    bool given(CLI::App const& cmd, std::string const& name) {
      CLI::Option const* opt = cmd.get_option_no_throw(name);
      return opt != nullptr && opt->count() != 0;
    }

    ExperimentConfig experiment_config(Options const& o, CLI::App const& cmd, ExperimentKind kind) {
      ExperimentConfig config = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
      config.kind             = kind;
      if (given(cmd, "--group")) {
        config.group = GroupSpec::parse(o.group);
      } else if (o.config.empty()) {
        throw UsageError("experiments need --group or --config");
      }
      if (given(cmd, "--n")) {
        config.tuple_size = o.n;
      }
      if (given(cmd, "--bound")) {
        config.word_bound = o.bound;
      }
      if (given(cmd, "--samples")) {
        config.sample_count = o.samples;
      }
      if (given(cmd, "--seed")) {
        config.seed = o.seed;
      }
      if (given(cmd, "--output")) {
        config.output = o.output;
      }
      if (given(cmd, "--csv")) {
        config.csv = o.csv;
      }
      if (given(cmd, "--timeout-ms")) {
        config.trial_timeout = std::chrono::milliseconds(o.timeout_ms);
      }
      if (given(cmd, "--exhaustive")) {
        config.exhaustive = o.exhaustive;
      }
      if (given(cmd, "--timing")) {
        config.record_timing = o.timing;
      }
      apply_environment(config);
      config.validate();
      return config;
    }

    int run_experiment(ReportRecord const& report, std::ostream& out, bool demand_success) {
      write_report(report);
      if (report.config.output.empty()) {
        out << to_jsonl(report);
      } else {
        out << report.aggregate_json().dump() << "\n";
      }
      if (demand_success && report.success_count() != report.trials.size()) {
        return exit_not_verified;
      }
      return exit_ok;
    }

  }  // namespace

  int cli_run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Free subgroups, dense free families and freeness oracles", "libredense"};
    app.require_subcommand(1);
    Options o;

    auto* check = app.add_subcommand("check-free", "decide or bound-check freeness of a tuple");
    check->add_flag("--symbolic", o.symbolic, "tuple of free-group words (exact, by folding)");
    check->add_option("--words", o.words, "comma separated words, e.g. \"1 2, 2 1\"");
    check->add_option("--rank", o.rank, "ambient rank (default: largest generator used)");
    check->add_option("--group", o.group, "sym:<m> or supp:<bound>");
    check->add_option("--perms", o.perms, "comma separated cycle notation, e.g. \"(1 2),(1 3)\"");
    check->add_option("--bound", o.bound, "word length bound L")->check(CLI::PositiveNumber);
    check->add_flag("--naive", o.naive, "use the unpruned enumeration");

    auto* construct = app.add_subcommand("construct", "run one of the constructions");
    construct->require_subcommand(1);
    auto* prod1 = construct->add_subcommand("prod1", "permutations on which a word does not vanish");
    prod1->add_option("--word", o.word, "nontrivial word")->required();
    prod1->add_option("--rank", o.rank, "rank of the word");
    auto* prod2 = construct->add_subcommand("prod2", "planted L-free tuple in a product");
    prod2->add_option("--profile", o.profile, "degree profile file")->required();
    prod2->add_option("--n", o.n, "tuple size")->check(CLI::PositiveNumber);
    prod2->add_option("--bound", o.bound, "word length bound L")->check(CLI::PositiveNumber);
    auto* dense = construct->add_subcommand("dense-family", "dense free family and box queries");
    dense->add_option("--profile", o.profile, "degree profile file")->required();
    dense->add_option("--bound", o.bound, "word length bound L")->check(CLI::PositiveNumber);
    dense->add_option("--seed", o.seed, "seed of the reserve fill");
    dense->add_option("--box", o.box, "box to query, e.g. \"0:2 1;1:1 3 2\"");
    auto* perturb = construct->add_subcommand("perturb", "override coordinates of a planted tuple");
    perturb->add_option("--profile", o.profile, "degree profile file")->required();
    perturb->add_option("--n", o.n, "tuple size")->check(CLI::PositiveNumber);
    perturb->add_option("--bound", o.bound, "word length bound L")->check(CLI::PositiveNumber);
    perturb->add_option("--override", o.overrides, "element:coordinate:one-line images");
    auto* extend = construct->add_subcommand("extend", "append unused generators");
    extend->add_option("--words", o.words, "comma separated words")->required();
    extend->add_option("--total-rank", o.total_rank, "rank to extend to")->required();
    auto* fin_case = construct->add_subcommand("fin-case", "free tuple in the cosets of given words");
    fin_case->add_option("--quotient", o.quotient, "quotient file")->required();
    fin_case->add_option("--targets", o.targets, "comma separated words g_i")->required();
    fin_case->add_option("--h-bound", o.h_bound, "length bound of the h search");
    auto* free_density = construct->add_subcommand("free-density", "dense free tuple in a free group");
    free_density->add_option("--quotient", o.quotient, "quotient file")->required();
    free_density->add_option("--targets", o.targets, "comma separated words fixing the cosets")->required();
    free_density->add_option("--total-rank", o.total_rank, "length of the output tuple");
    free_density->add_option("--h-bound", o.h_bound, "length bound of the h search");

    auto* sample = app.add_subcommand("sample", "random sampling experiments");
    sample->require_subcommand(1);
    auto* dixon = sample->add_subcommand("dixon", "L-free fraction of uniform random tuples");
    auto* demo  = app.add_subcommand("demo", "density demonstrations");
    demo->require_subcommand(1);
    auto* density = demo->add_subcommand("density", "free tuples inside random basic open sets");
    for (CLI::App* cmd : {dixon, density}) {
      cmd->add_option("--config", o.config, "key=value config file");
      cmd->add_option("--group", o.group, "group spec");
      cmd->add_option("--n", o.n, "tuple size")->check(CLI::PositiveNumber);
      cmd->add_option("--bound", o.bound, "word length bound L")->check(CLI::PositiveNumber);
      cmd->add_option("--samples", o.samples, "number of trials")->check(CLI::PositiveNumber);
      cmd->add_option("--seed", o.seed, "seed (LIBREDENSE_SEED overrides)");
      cmd->add_option("--output", o.output, "JSONL report path");
      cmd->add_option("--csv", o.csv, "CSV summary path");
      cmd->add_option("--timeout-ms", o.timeout_ms, "per-trial time budget");
      cmd->add_flag("--timing", o.timing, "record wall-clock time per trial");
    }
    density->add_flag("--exhaustive", o.exhaustive, "product groups: every box with <= 2 coordinates");

    auto* embed = app.add_subcommand("embed", "embeddings of free groups");
    embed->require_subcommand(1);
    auto* f2 = embed->add_subcommand("f2", "h_i = a^-i b a^i, or the extension of a free tuple");
    f2->add_option("--count", o.count, "number of words")->check(CLI::NonNegativeNumber);
    f2->add_option("--tuple", o.words, "free basis to extend through its last two entries");
    f2->add_option("--rank", o.rank, "rank of the tuple");

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (CLI::CallForHelp const& e) {
      out << app.help();
      return exit_ok;
    } catch (CLI::CallForAllHelp const& e) {
      out << app.help("", CLI::AppFormatMode::All);
      return exit_ok;
    } catch (CLI::ParseError const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    }

    try {
      if (check->parsed()) {
        return check_free(o, *check, out);
      }
      if (prod1->parsed()) {
        return construct_prod1(o, out);
      }
      if (prod2->parsed()) {
        return construct_prod2(o, out);
      }
      if (dense->parsed()) {
        return construct_dense(o, *dense, out);
      }
      if (perturb->parsed()) {
        return construct_perturb(o, out);
      }
      if (extend->parsed()) {
        return construct_extend(o, out);
      }
      if (fin_case->parsed()) {
        return construct_fin_case(o, out);
      }
      if (free_density->parsed()) {
        return construct_free_density(o, out);
      }
      if (dixon->parsed()) {
        return run_experiment(dixon_sample(experiment_config(o, *dixon, ExperimentKind::dixon_sample)),
                              out, false);
      }
      if (density->parsed()) {
        return run_experiment(density_demo(experiment_config(o, *density, ExperimentKind::density_demo)),
                              out, true);
      }
      if (f2->parsed()) {
        return embed_f2(o, *f2, out);
      }
    } catch (UsageError const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (ParseError const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (IoError const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (InvalidArgument const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (RankMismatch const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (DegreeMismatch const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (IndexOutOfRange const& e) {
      err << "error: " << e.what() << "\n";
      return exit_usage;
    } catch (Error const& e) {
      err << "error: " << e.what() << "\n";
      return exit_not_verified;
    }
    err << "error: no command\n";
    return exit_usage;
  }

}  // namespace libredense
