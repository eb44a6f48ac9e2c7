#include "libredense/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "libredense/freetop.hpp"
#include "libredense/perm.hpp"
#include "libredense/product.hpp"
#include "libredense/rng.hpp"
#include "libredense/stallings.hpp"

namespace libredense {

  namespace {

    std::string trim(std::string_view s) {
      std::size_t b = 0;
      std::size_t e = s.size();
      while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
      }
      while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
      }
      return std::string(s.substr(b, e - b));
    }

    std::uint64_t parse_unsigned(std::string_view text, std::string const& what) {
      std::uint64_t value = 0;
      auto const [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
        throw ParseError("bad " + what + " \"" + std::string(text) + "\"");
      }
      return value;
    }

    bool parse_bool(std::string const& text, std::string const& what) {
      if (text == "true" || text == "1" || text == "yes") {
        return true;
      }
      if (text == "false" || text == "0" || text == "no") {
        return false;
      }
      throw ParseError("bad " + what + " \"" + text + "\"");
    }

    template <class F>
    TrialRecord run_trial(std::size_t index, ExperimentConfig const& config, F&& body) {
      TrialRecord record;
      record.index     = index;
      auto const start = std::chrono::steady_clock::now();
      try {
        body(record);
      } catch (SearchTimeout const& e) {
        record.success = false;
        record.free    = false;
        record.error   = std::string("timeout: ") + e.what();
      } catch (Error const& e) {
        record.success = false;
        record.free    = false;
        record.error   = e.what();
      }
      if (config.record_timing) {
        record.millis = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      }
      return record;
    }

    Word random_word(std::uint32_t rank, std::size_t max_length, Rng& rng) {
      std::size_t const   length = rng.below(max_length + 1);
      std::vector<Letter> letters;
      while (letters.size() < length) {
        Letter const c = Letter::from_key(static_cast<std::uint32_t>(rng.below(2 * rank)));
        if (letters.empty() || !c.cancels(letters.back())) {
          letters.push_back(c);
        }
      }
      return reduce(letters, rank);
    }

    OpenBox random_open_box(std::uint64_t bound, std::size_t max_constraints, Rng& rng) {
      std::size_t const k = std::min<std::uint64_t>(rng.below(max_constraints + 1), bound);
      std::vector<std::uint64_t> points(bound);
      std::vector<std::uint64_t> images(bound);
      for (std::uint64_t p = 0; p < bound; ++p) {
        points[p] = images[p] = p + 1;
      }
      std::vector<std::pair<std::uint64_t, std::uint64_t>> constraints;
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(points[i], points[i + rng.below(bound - i)]);
        std::swap(images[i], images[i + rng.below(bound - i)]);
        constraints.emplace_back(points[i], images[i]);
      }
      return OpenBox(constraints);
    }

    nlohmann::json box_json(OpenBox const& box) {
      nlohmann::json out = nlohmann::json::array();
      for (auto const& [a, b] : box.constraints()) {
        out.push_back({a, b});
      }
      return out;
    }

    nlohmann::json box_json(ProductBox const& box) {
      nlohmann::json out = nlohmann::json::object();
      for (auto const& [i, f] : box) {
        out[std::to_string(i)] = to_string(f);
      }
      return out;
    }

    // Completed boxes with a prod1 block for every cyclic class word of
    // length <= bound, each on fresh points beyond everything in use.
    std::vector<SuppPerm> plant_free_completion(std::vector<OpenBox> const& boxes,
                                                std::size_t                 bound) {
      auto const            n = static_cast<std::uint32_t>(boxes.size());
      std::vector<SuppPerm> tuple;
      std::uint64_t         offset = 0;
      for (OpenBox const& box : boxes) {
        tuple.push_back(complete_box(box));
        offset = std::max(offset, tuple.back().max_point());
        for (auto const& [a, b] : box.constraints()) {
          offset = std::max({offset, a, b});
        }
      }
      for_each_word(n, bound, EnumerationMode::cyclic_classes, [&](Word const& w) {
        if (w.empty()) {
          return true;
        }
        Prod1Witness const witness = prod1_witness(w);
        for (std::uint32_t k = 0; k < n; ++k) {
          tuple[k] = compose(tuple[k], SuppPerm::from_fin_perm(witness.tuple[k], offset));
        }
        offset += witness.degree;
        return true;
      });
      return tuple;
    }

    std::vector<ProductBox> all_small_boxes(DegreeProfile const& profile) {
      std::vector<ProductBox> out;
      for (auto const& subset : visible_subsets(profile.visible_count())) {
        if (subset.size() > 2) {
          break;
        }
        std::uint64_t const order = subgroup_order(profile, subset);
        for (std::uint64_t j = 1; j <= order; ++j) {
          auto const g = subgroup_element(profile, subset, j);
          ProductBox box;
          for (std::size_t t = 0; t < subset.size(); ++t) {
            box.emplace(subset[t], g[t]);
          }
          out.push_back(std::move(box));
        }
      }
      return out;
    }

    ProductBox random_product_box(DegreeProfile const& profile, Rng& rng) {
      std::size_t const visible = profile.visible_count();
      std::size_t const k       = rng.below(std::min<std::size_t>(2, visible) + 1);
      std::vector<std::size_t> coords(visible);
      for (std::size_t i = 0; i < visible; ++i) {
        coords[i] = i;
      }
      ProductBox box;
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(coords[i], coords[i + rng.below(visible - i)]);
        box.emplace(coords[i], random_fin_perm(profile.degree(coords[i]), rng));
      }
      return box;
    }

    // dense_witness, moving to a refinement of the box when the member is
    // already taken by an earlier entry of the tuple.
    ProductElement const& distinct_witness(DenseFamily const&                  family,
                                           ProductBox const&                   box,
                                           std::set<ProductElement const*>& used) {
      ProductElement const& first = dense_witness(family, box);
      if (used.insert(&first).second) {
        return first;
      }
      DegreeProfile const& profile = *family.profile();
      for (std::size_t c = 0; c < profile.visible_count(); ++c) {
        if (box.count(c) != 0) {
          continue;
        }
        for (std::uint64_t r = 0; r < factorial(profile.degree(c)); ++r) {
          ProductBox refined = box;
          refined.emplace(c, lex_unrank(profile.degree(c), r));
          ProductElement const& e = dense_witness(family, refined);
          if (used.insert(&e).second) {
            return e;
          }
        }
      }
      throw SearchExhausted("every family member in the box is already in the tuple");
    }

  }  // namespace

  std::string to_string(ExperimentKind kind) {
    switch (kind) {
      case ExperimentKind::dixon_sample:
        return "dixon-sample";
      case ExperimentKind::density_demo:
        return "density-demo";
      case ExperimentKind::construct:
        return "construct";
    }
    return "?";
  }

  ExperimentKind parse_experiment_kind(std::string_view text) {
    if (text == "dixon-sample") {
      return ExperimentKind::dixon_sample;
    }
    if (text == "density-demo") {
      return ExperimentKind::density_demo;
    }
    if (text == "construct") {
      return ExperimentKind::construct;
    }
    throw ParseError("unknown experiment kind \"" + std::string(text) + "\"");
  }

  GroupSpec GroupSpec::parse(std::string_view text) {
    std::size_t const colon = text.find(':');
    std::string const head(text.substr(0, colon));
    std::string const rest = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
    GroupSpec         spec;
    if (head == "sym") {
      spec.kind   = Kind::sym;
      spec.degree = static_cast<std::uint32_t>(parse_unsigned(rest, "symmetric degree"));
      if (spec.degree == 0) {
        throw ParseError("symmetric degree must be positive");
      }
    } else if (head == "supp") {
      spec.kind  = Kind::supp;
      spec.bound = parse_unsigned(rest, "support bound");
      if (spec.bound == 0) {
        throw ParseError("support bound must be positive");
      }
    } else if (head == "product" || head == "quotient") {
      spec.kind = head == "product" ? Kind::product : Kind::quotient;
      spec.path = rest;
      if (spec.path.empty()) {
        throw ParseError("group spec \"" + std::string(text) + "\" needs a path");
      }
    } else if (head == "free") {
      spec.kind                = Kind::free;
      std::size_t const second = rest.find(':');
      if (second == std::string::npos) {
        throw ParseError("free group spec reads free:<rank>:<degree>");
      }
      spec.rank   = static_cast<std::uint32_t>(parse_unsigned(rest.substr(0, second), "rank"));
      spec.degree = static_cast<std::uint32_t>(parse_unsigned(rest.substr(second + 1), "degree"));
      if (spec.rank == 0 || spec.degree == 0) {
        throw ParseError("free group rank and quotient degree must be positive");
      }
    } else {
      throw ParseError("unknown group spec \"" + std::string(text) + "\"");
    }
    return spec;
  }

  std::string GroupSpec::to_string() const {
    switch (kind) {
      case Kind::sym:
        return "sym:" + std::to_string(degree);
      case Kind::supp:
        return "supp:" + std::to_string(bound);
      case Kind::product:
        return "product:" + path;
      case Kind::quotient:
        return "quotient:" + path;
      case Kind::free:
        return "free:" + std::to_string(rank) + ":" + std::to_string(degree);
    }
    return "?";
  }

  void ExperimentConfig::validate() const {
    if (tuple_size == 0 || word_bound == 0 || sample_count == 0) {
      throw InvalidArgument("tuple_size, word_bound and samples must be positive");
    }
  }

  nlohmann::json ExperimentConfig::to_json() const {
    return {{"kind", to_string(kind)},
            {"group", group.to_string()},
            {"tuple_size", tuple_size},
            {"word_bound", word_bound},
            {"samples", sample_count},
            {"seed", seed},
            {"timeout_ms", trial_timeout.count()},
            {"exhaustive", exhaustive}};
  }

  ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig   config;
    std::istringstream in{std::string(text)};
    std::string        line;
    std::size_t        line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string const t = trim(line.substr(0, line.find('#')));
      if (t.empty()) {
        continue;
      }
      std::size_t const eq = t.find('=');
      if (eq == std::string::npos) {
        throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
      }
      std::string const key   = trim(t.substr(0, eq));
      std::string const value = trim(t.substr(eq + 1));
      if (key == "kind") {
        config.kind = parse_experiment_kind(value);
      } else if (key == "group") {
        config.group = GroupSpec::parse(value);
      } else if (key == "tuple_size") {
        config.tuple_size = static_cast<std::uint32_t>(parse_unsigned(value, key));
      } else if (key == "word_bound") {
        config.word_bound = parse_unsigned(value, key);
      } else if (key == "samples") {
        config.sample_count = parse_unsigned(value, key);
      } else if (key == "seed") {
        config.seed = parse_unsigned(value, key);
      } else if (key == "output") {
        config.output = value;
      } else if (key == "csv") {
        config.csv = value;
      } else if (key == "timeout_ms") {
        config.trial_timeout = std::chrono::milliseconds(parse_unsigned(value, key));
      } else if (key == "record_timing") {
        config.record_timing = parse_bool(value, key);
      } else if (key == "exhaustive") {
        config.exhaustive = parse_bool(value, key);
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown key \"" + key + "\"");
      }
    }
    return config;
  }

  ExperimentConfig load_config(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw IoError("cannot read config " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
  }

  void apply_environment(ExperimentConfig& config) {
    if (char const* seed = std::getenv("LIBREDENSE_SEED"); seed != nullptr && *seed != '\0') {
      config.seed = parse_unsigned(seed, "LIBREDENSE_SEED");
    }
  }

  nlohmann::json TrialRecord::to_json() const {
    nlohmann::json j = {{"schema", "1"}, {"type", "trial"}, {"index", index}, {"tuple", tuple}};
    if (!box.is_null()) {
      j["box"] = box;
    }
    j["verdict"] = verdict ? nlohmann::json(*verdict) : nlohmann::json(nullptr);
    j["free"]    = free;
    j["success"] = success;
    if (!error.empty()) {
      j["error"] = error;
    }
    if (millis) {
      j["millis"] = *millis;
    }
    return j;
  }

  std::size_t ReportRecord::free_count() const {
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](TrialRecord const& t) { return t.free; }));
  }

  std::size_t ReportRecord::success_count() const {
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](TrialRecord const& t) { return t.success; }));
  }

  double ReportRecord::fraction() const {
    return trials.empty() ? 0.0
                          : static_cast<double>(free_count()) / static_cast<double>(trials.size());
  }

  nlohmann::json ReportRecord::aggregate_json() const {
    return {{"schema", "1"},
            {"type", "aggregate"},
            {"config", config.to_json()},
            {"samples", trials.size()},
            {"free_count", free_count()},
            {"success_count", success_count()},
            {"fraction", fraction()}};
  }

  ReportRecord dixon_sample(ExperimentConfig const& config) {
    config.validate();
    ReportRecord report{config, {}};
    GroupSpec const& g = config.group;
    if (g.kind != GroupSpec::Kind::sym && g.kind != GroupSpec::Kind::supp) {
      throw InvalidArgument("dixon sampling needs a sym:<m> or supp:<bound> group");
    }
    for (std::size_t i = 0; i < config.sample_count; ++i) {
      report.trials.push_back(run_trial(i, config, [&](TrialRecord& rec) {
        Rng                rng    = Rng::derive(config.seed, i);
        SearchLimits const limits = SearchLimits::within(config.trial_timeout);
        FreenessVerdict    verdict;
        if (g.kind == GroupSpec::Kind::sym) {
          std::vector<FinPerm> tuple;
          for (std::uint32_t k = 0; k < config.tuple_size; ++k) {
            tuple.push_back(random_fin_perm(g.degree, rng));
            rec.tuple.push_back(to_string(tuple.back()));
          }
          verdict = l_free_check(tuple, config.word_bound, FinPermCarrier{g.degree}, limits);
        } else {
          std::vector<SuppPerm> tuple;
          for (std::uint32_t k = 0; k < config.tuple_size; ++k) {
            tuple.push_back(complete_box_random(OpenBox(), g.bound, rng));
            rec.tuple.push_back(to_string(tuple.back()));
          }
          verdict = l_free_check(tuple, config.word_bound, SuppPermCarrier{}, limits);
        }
        rec.free    = verdict.free();
        rec.success = true;
        rec.verdict = std::move(verdict);
      }));
    }
    return report;
  }

  ReportRecord density_demo(ExperimentConfig const& config) {
    config.validate();
    ReportRecord     report{config, {}};
    GroupSpec const& g = config.group;
    std::size_t const n = config.tuple_size;
    std::size_t const L = config.word_bound;

    switch (g.kind) {
      case GroupSpec::Kind::sym:
        throw InvalidArgument("density demos run on supp:<bound>, product, quotient or free groups");

      case GroupSpec::Kind::supp: {
        for (std::size_t i = 0; i < config.sample_count; ++i) {
          report.trials.push_back(run_trial(i, config, [&](TrialRecord& rec) {
            Rng                  rng = Rng::derive(config.seed, i);
            std::vector<OpenBox> boxes;
            rec.box = nlohmann::json::array();
            for (std::size_t k = 0; k < n; ++k) {
              boxes.push_back(random_open_box(g.bound, 5, rng));
              rec.box.push_back(box_json(boxes.back()));
            }
            auto const tuple = plant_free_completion(boxes, L);
            bool       member = true;
            for (std::size_t k = 0; k < n; ++k) {
              rec.tuple.push_back(to_string(tuple[k]));
              member = member && box_member(tuple[k], boxes[k]);
            }
            rec.verdict = l_free_check(tuple, L, SuppPermCarrier{},
                                       SearchLimits::within(config.trial_timeout));
            rec.free    = rec.verdict->free();
            rec.success = member && rec.free;
          }));
        }
        return report;
      }

      case GroupSpec::Kind::product: {
        ProfilePtr const     profile = load_profile(g.path);
        DenseFamily const    family  = prod_main_family(profile, L, config.seed);
        ProductCarrier const carrier{profile};
        std::vector<std::vector<ProductBox>> trials;
        if (config.exhaustive) {
          for (ProductBox& box : all_small_boxes(*profile)) {
            trials.push_back({std::move(box)});
          }
        } else {
          for (std::size_t i = 0; i < config.sample_count; ++i) {
            Rng                     rng = Rng::derive(config.seed, i);
            std::vector<ProductBox> boxes;
            for (std::size_t k = 0; k < n; ++k) {
              boxes.push_back(random_product_box(*profile, rng));
            }
            trials.push_back(std::move(boxes));
          }
        }
        for (std::size_t i = 0; i < trials.size(); ++i) {
          report.trials.push_back(run_trial(i, config, [&](TrialRecord& rec) {
            std::set<ProductElement const*> used;
            std::vector<ProductElement>     tuple;
            bool                            member = true;
            rec.box = nlohmann::json::array();
            for (ProductBox const& box : trials[i]) {
              rec.box.push_back(box_json(box));
              tuple.push_back(distinct_witness(family, box, used));
              member = member && box_member(tuple.back(), box);
              rec.tuple.push_back(to_json(tuple.back(), g.path));
            }
            rec.verdict = l_free_check(tuple, L, carrier, SearchLimits::within(config.trial_timeout));
            rec.free    = rec.verdict->free();
            rec.success = member && rec.free;
          }));
        }
        return report;
      }

      case GroupSpec::Kind::quotient:
      case GroupSpec::Kind::free: {
        std::optional<FiniteQuotient> fixed;
        std::uint32_t                 rank = g.rank;
        if (g.kind == GroupSpec::Kind::quotient) {
          fixed = load_quotient(g.path);
          rank  = fixed->rank();
        }
        auto const total_rank = std::max<std::uint32_t>(rank, static_cast<std::uint32_t>(n));
        for (std::size_t i = 0; i < config.sample_count; ++i) {
          report.trials.push_back(run_trial(i, config, [&](TrialRecord& rec) {
            Rng               rng   = Rng::derive(config.seed, i);
            std::size_t const count = rng.below(std::min<std::size_t>({2, rank, n}) + 1);
            std::vector<CosetNeighborhood> constraints;
            rec.box = nlohmann::json::array();
            for (std::size_t k = 0; k < count; ++k) {
              FiniteQuotient q = fixed ? *fixed : [&] {
                std::vector<FinPerm> images;
                for (std::uint32_t r = 0; r < rank; ++r) {
                  images.push_back(random_fin_perm(g.degree, rng));
                }
                return FiniteQuotient(rank, g.degree, std::move(images));
              }();
              Word const around = random_word(rank, 3, rng);
              constraints.push_back(CosetNeighborhood::around(q, around));
              rec.box.push_back({{"quotient", to_text(q)},
                                 {"target", to_string(constraints.back().target())}});
            }
            auto const tuple  = density_witness_free_group(rank, constraints, total_rank);
            bool       member = true;
            for (std::size_t k = 0; k < tuple.size(); ++k) {
              rec.tuple.push_back(to_string(tuple[k]));
              if (k < constraints.size()) {
                member = member && constraints[k].contains(tuple[k]);
              }
            }
            rec.free    = is_free_basis(tuple);
            rec.success = member && rec.free;
          }));
        }
        return report;
      }
    }
    return report;
  }

  std::string to_jsonl(ReportRecord const& report) {
    std::string out;
    std::vector<TrialRecord const*> ordered;
    for (TrialRecord const& t : report.trials) {
      ordered.push_back(&t);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](TrialRecord const* a, TrialRecord const* b) { return a->index < b->index; });
    for (TrialRecord const* t : ordered) {
      out += t->to_json().dump() + "\n";
    }
    out += report.aggregate_json().dump() + "\n";
    return out;
  }

  std::string to_csv(ReportRecord const& report) {
    std::string out = "index,free,success,witness\n";
    for (TrialRecord const& t : report.trials) {
      std::string witness;
      if (t.verdict && t.verdict->witness) {
        witness = to_string(*t.verdict->witness);
      }
      out += std::to_string(t.index) + "," + (t.free ? "true" : "false") + ","
             + (t.success ? "true" : "false") + "," + witness + "\n";
    }
    return out;
  }

  void write_report(ReportRecord const& report) {
    auto write = [](std::string const& path, std::string const& text) {
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        throw IoError("cannot write " + path);
      }
      out << text;
      if (!out) {
        throw IoError("failed writing " + path);
      }
    };
    if (!report.config.output.empty()) {
      write(report.config.output, to_jsonl(report));
    }
    if (!report.config.csv.empty()) {
      write(report.config.csv, to_csv(report));
    }
  }

}  // namespace libredense
