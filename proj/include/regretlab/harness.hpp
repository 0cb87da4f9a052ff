#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "regretlab/blindest.hpp"

namespace regretlab {

// How a_hat is produced at each grid gain.
struct AHatRule {
    enum class Kind { none, fixed_offset, relative_offset, from_estimator };
    Kind kind = Kind::none;
    double delta = 0.0;    // fixed-offset
    double epsilon = 0.0;  // relative-offset
    GainEstimator estimator;
    std::size_t n = 0;     // sample size for from-estimator

    std::string describe() const;
};

struct ExperimentConfig {
    enum class Kind { bounds, tradeoff, fig2, efficiency, regret_sweep };

    int schema = 1;
    std::string id;
    Kind kind = Kind::tradeoff;
    InputDistribution prior = InputDistribution::gaussian(0.0, 1.0);
    double noise_var = 1.0;
    std::vector<double> a_grid;
    std::vector<AHatRule> a_hat_rules;  // one "none" rule when unused
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    QuadratureSpec quadrature;          // harness default: gauss-hermite
    std::string out_csv;
    std::string out_json;
    bool emit_meta = true;

    ExperimentConfig();

    // Throws ConfigError carrying field-level diagnostics.
    void validate() const;
    std::vector<std::string> diagnostics() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static const char* kind_name(Kind k);
};

using CellValue = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

// One output row: ordered named cells, an optional error message, and the
// inputs echoed. NaNs are never emitted; a failed computation leaves its
// cells empty and fills `error`.
struct ResultRow {
    std::vector<std::pair<std::string, CellValue>> cells;
    std::string error;

    void set(const std::string& name, CellValue v) { cells.emplace_back(name, std::move(v)); }
    const CellValue* find(const std::string& name) const;
    bool any_bound_violated() const;  // any boolean *holds* cell that is false
};

// Runs every grid row (in a work pool capped by REGRETLAB_THREADS), emitting
// rows in grid order regardless of scheduling. Per-row failures become the
// row's error field.
std::vector<ResultRow> run(const ExperimentConfig& config);

// 17-significant-digit CSV. The meta comment line is included only when
// `meta` is nonempty; an `error` column appears only if some row failed.
std::string csv_to_string(const std::vector<ResultRow>& rows, const std::string& meta);
void write_csv(const std::vector<ResultRow>& rows, const std::string& path,
               const std::string& meta);

nlohmann::json rows_to_json(const ExperimentConfig& config,
                            const std::vector<ResultRow>& rows);
void write_json(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
                const std::string& path);

// Report serializers shared by the CSV/JSON emitters.
nlohmann::json to_json(const RegretReport& r);
nlohmann::json to_json(const TradeoffReport& t);
nlohmann::json to_json(const EfficiencyReport& e);

// Ordered parallel map: results[i] = fn(i), pool size from REGRETLAB_THREADS
// (hardware concurrency if unset). Deterministic output order.
void parallel_for_ordered(std::size_t count,
                          const std::function<void(std::size_t)>& fn);

// The meta line for a config (timestamped; suppress via emit_meta=false).
std::string meta_line(const ExperimentConfig& config);

} // namespace regretlab
