#pragma once

// Experiments over the library: Dixon-style sampling of random tuples and
// density demonstrations that build free tuples inside random basic open
// sets. Results are JSON Lines reports (schema "1"), byte-for-byte
// reproducible for a fixed configuration and seed. Randomness comes from
// Rng (std::mt19937_64); trial i uses the stream Rng::derive(seed, i).

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "libredense/oracle.hpp"

namespace libredense {

  enum class ExperimentKind { dixon_sample, density_demo, construct };

  std::string    to_string(ExperimentKind kind);
  ExperimentKind parse_experiment_kind(std::string_view text);

  // "sym:<m>", "supp:<bound>", "product:<profile path>",
  // "quotient:<quotient path>", "free:<rank>:<degree>".
  struct GroupSpec {
    enum class Kind { sym, supp, product, quotient, free };

    Kind          kind   = Kind::sym;
    std::uint32_t degree = 2;  // sym: m; free: degree of random quotients
    std::uint64_t bound  = 0;  // supp: support bound of random permutations
    std::uint32_t rank   = 2;  // free
    std::string   path;        // product, quotient

    static GroupSpec parse(std::string_view text);
    std::string      to_string() const;
  };

  struct ExperimentConfig {
    ExperimentKind            kind = ExperimentKind::dixon_sample;
    GroupSpec                 group;
    std::uint32_t             tuple_size   = 2;
    std::size_t               word_bound   = 6;
    std::size_t               sample_count = 100;
    std::uint64_t             seed         = 0;
    std::string               output;  // JSONL path, empty for none
    std::string               csv;     // CSV path, empty for none
    std::chrono::milliseconds trial_timeout{10'000};
    bool                      record_timing = false;
    bool                      exhaustive    = false;  // density demo, product groups

    // Throws InvalidArgument unless tuple_size, word_bound and
    // sample_count are positive.
    void validate() const;

    nlohmann::json to_json() const;
  };

  // Flat key=value lines; '#' starts a comment. Keys: kind, group,
  // tuple_size, word_bound, samples, seed, output, csv, timeout_ms,
  // record_timing, exhaustive. Throws ParseError on unknown keys or bad
  // values.
  ExperimentConfig parse_config(std::string_view text);
  ExperimentConfig load_config(std::string const& path);

  // LIBREDENSE_SEED, when set, replaces the configured seed.
  void apply_environment(ExperimentConfig& config);

  struct TrialRecord {
    std::size_t                    index = 0;
    nlohmann::json                 tuple = nlohmann::json::array();
    nlohmann::json                 box;  // null for sampling
    std::optional<FreenessVerdict> verdict;
    bool                           free    = false;
    bool                           success = false;
    std::string                    error;
    std::optional<double>          millis;

    nlohmann::json to_json() const;
  };

  struct ReportRecord {
    ExperimentConfig         config;
    std::vector<TrialRecord> trials;  // ordered by index

    std::size_t free_count() const;
    std::size_t success_count() const;
    double      fraction() const;  // free_count / trials

    nlohmann::json aggregate_json() const;
  };

  ReportRecord dixon_sample(ExperimentConfig const& config);
  ReportRecord density_demo(ExperimentConfig const& config);

  std::string to_jsonl(ReportRecord const& report);
  std::string to_csv(ReportRecord const& report);

  // Writes config.output and config.csv when set. Throws IoError.
  void write_report(ReportRecord const& report);

}  // namespace libredense
