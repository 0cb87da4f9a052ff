#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "regretlab/harness.hpp"

using namespace regretlab;
using nlohmann::json;

namespace {

json base_config_json() {
    return json{{"schema", 1},
                {"kind", "tradeoff"},
                {"prior", {{"kind", "gaussian"}, {"mean", 0.0}, {"var", 1.0}}},
                {"noise_var", 1.0},
                {"a_grid", {0.5, 1.0, 2.0}},
                {"seed", 7}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("config: json round trip and defaults") {
    const auto c = ExperimentConfig::from_json(base_config_json());
    CHECK(c.kind == ExperimentConfig::Kind::tradeoff);
    CHECK(c.id == "tradeoff");
    CHECK(c.a_grid.size() == 3);
    CHECK(c.seed == 7);
    CHECK(c.quadrature.method == QuadratureSpec::Method::gauss_hermite);

    const auto c2 = ExperimentConfig::from_json(c.to_json());
    CHECK(c2.a_grid == c.a_grid);
    CHECK(c2.kind == c.kind);
}

TEST_CASE("config: grid object form") {
    auto j = base_config_json();
    j["a_grid"] = {{"start", 0.1}, {"stop", 0.5}, {"step", 0.1}};
    const auto c = ExperimentConfig::from_json(j);
    REQUIRE(c.a_grid.size() == 5);
    CHECK(c.a_grid.front() == doctest::Approx(0.1));
    CHECK(c.a_grid.back() == doctest::Approx(0.5));
}

TEST_CASE("config: field-level diagnostics") {
    auto j = base_config_json();
    j["schema"] = 2;
    j["noise_var"] = -1.0;
    j["a_grid"] = {0.0, 1.0};
    j["typo_field"] = true;
    try {
        (void)ExperimentConfig::from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const auto& d = e.diagnostics();
        auto has = [&](const std::string& needle) {
            for (const auto& msg : d)
                if (msg.find(needle) != std::string::npos) return true;
            return false;
        };
        CHECK(has("schema"));
        CHECK(has("noise_var"));
        CHECK(has("a_grid"));
        CHECK(has("typo_field"));
    }
}

TEST_CASE("config: estimator kinds demand from-estimator rules") {
    auto j = base_config_json();
    j["kind"] = "efficiency";
    CHECK_THROWS_AS((void)ExperimentConfig::from_json(j), ConfigError);
    j["a_hat_rule"] = {{"kind", "from-estimator"}, {"estimator", "numerical-mle"},
                       {"n", 100}};
    j["trials"] = 10;
    const auto c = ExperimentConfig::from_json(j);
    CHECK(c.a_hat_rules.size() == 1);
    CHECK(c.a_hat_rules[0].n == 100);
}

TEST_CASE("run: tradeoff rows all hold") {
    const auto c = ExperimentConfig::from_json(base_config_json());
    const auto rows = run(c);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        const auto* holds = r.find("holds");
        REQUIRE(holds != nullptr);
        CHECK(std::get<bool>(*holds));
        const auto* res = r.find("residual");
        REQUIRE(res != nullptr);
        CHECK(std::abs(std::get<double>(*res)) <= 1e-4);
        CHECK(!r.any_bound_violated());
    }
}

TEST_CASE("run: row count is grid size times rule count") {
    auto j = base_config_json();
    j["kind"] = "bounds";
    j["a_grid"] = {0.8, 1.6};
    j["a_hat_rules"] = json::array({{{"kind", "relative-offset"}, {"epsilon", 0.01}},
                                    {{"kind", "fixed-offset"}, {"delta", 0.02}}});
    const auto c = ExperimentConfig::from_json(j);
    const auto rows = run(c);
    CHECK(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(!r.any_bound_violated());
        CHECK(std::get<std::int64_t>(*r.find("pointwise_violations")) == 0);
    }
}

TEST_CASE("run: fig2 grid locates the optimum gain") {
    ExperimentConfig c;
    c.kind = ExperimentConfig::Kind::fig2;
    c.id = "fig2";
    c.noise_var = 0.1;  // SNR = 10 dB with unit signal power
    for (int i = 0; i <= 100; ++i) c.a_grid.push_back(0.05 + 0.005 * i);
    const auto rows = run(c);
    REQUIRE(rows.size() == 101);
    double best_rho = 1e300, best_a = 0.0, best_fy = -1.0, best_fy_a = 0.0;
    for (const auto& r : rows) {
        REQUIRE(r.error.empty());
        const double a = std::get<double>(*r.find("a"));
        const double rho = std::get<double>(*r.find("rho"));
        const double fy = std::get<double>(*r.find("fisher_y"));
        if (rho < best_rho) { best_rho = rho; best_a = a; }
        if (fy > best_fy) { best_fy = fy; best_fy_a = a; }
    }
    CHECK(best_a == doctest::Approx(0.315));
    CHECK(best_fy_a == doctest::Approx(best_a));
    CHECK(best_rho == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("csv: shape, determinism, meta suppression") {
    const auto c = ExperimentConfig::from_json(base_config_json());
    const auto rows = run(c);
    const std::string body = csv_to_string(rows, "");
    const std::string with_meta = csv_to_string(rows, meta_line(c));
    CHECK(with_meta.substr(0, 2) == "# ");
    CHECK(with_meta.find(body) != std::string::npos);
    // header + 3 rows
    int newlines = 0;
    for (char ch : body) newlines += ch == '\n';
    CHECK(newlines == 4);
    CHECK(body.rfind("experiment,kind,prior,noise_var,seed,a,rho,", 0) == 0);

    const auto rows2 = run(c);
    CHECK(csv_to_string(rows2, "") == body);
}

TEST_CASE("csv: error column appears only when a row failed") {
    ResultRow ok;
    ok.set("a", 1.0);
    ok.set("value", 2.5);
    std::vector<ResultRow> rows = {ok};
    CHECK(csv_to_string(rows, "").rfind("a,value\n", 0) == 0);
    ResultRow bad;
    bad.set("a", 2.0);
    bad.error = "deliberate failure";
    rows.push_back(bad);
    const std::string text = csv_to_string(rows, "");
    CHECK(text.rfind("a,value,error\n", 0) == 0);
    CHECK(text.find("deliberate failure") != std::string::npos);
}

TEST_CASE("csv: 17 significant digits round-trip") {
    ResultRow r;
    const double x = 0.1234567890123456789;
    r.set("x", x);
    const std::string text = csv_to_string({r}, "");
    const auto pos = text.find('\n') + 1;
    const double back = std::strtod(text.c_str() + pos, nullptr);
    CHECK(back == x);
}

TEST_CASE("json output mirrors the rows") {
    const auto c = ExperimentConfig::from_json(base_config_json());
    const auto rows = run(c);
    const auto j = rows_to_json(c, rows);
    CHECK(j["schema"] == 1);
    CHECK(j["kind"] == "tradeoff");
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][0].contains("rho"));
}

TEST_CASE("report serializers emit every field") {
    RegretReport r;
    r.a = 1.0;
    r.a_hat = 1.1;
    const auto jr = to_json(r);
    CHECK(jr.contains("regret_abs"));
    CHECK(jr.contains("lemma1_rhs_eq25"));
    TradeoffReport t;
    CHECK(to_json(t).contains("residual"));
    EfficiencyReport e;
    CHECK(to_json(e).contains("efficiency_ratio"));
}

TEST_CASE("run: per-row failure lands in the error column, others survive") {
    ExperimentConfig c;
    c.kind = ExperimentConfig::Kind::tradeoff;
    c.id = "partial";
    // 1e-9 gain: the output Fisher information collapses and the row errors.
    c.a_grid = {1.0, 1e-9};
    const auto rows = run(c);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error.empty());
    CHECK(!rows[1].error.empty());
    const std::string text = csv_to_string(rows, "");
    CHECK(text.find("error") != std::string::npos);
}

TEST_CASE("parallel_for_ordered respects REGRETLAB_THREADS and stays ordered") {
    std::vector<int> out(100, -1);
    setenv("REGRETLAB_THREADS", "3", 1);
    parallel_for_ordered(100, [&](std::size_t i) { out[i] = static_cast<int>(2 * i); });
    unsetenv("REGRETLAB_THREADS");
    for (int i = 0; i < 100; ++i) CHECK(out[i] == 2 * i);
}

TEST_CASE("run: rerun with the same seed is byte-identical, thread count irrelevant") {
    auto j = base_config_json();
    j["kind"] = "regret-sweep";
    j["a_grid"] = {1.0};
    j["trials"] = 6;
    j["a_hat_rule"] = {{"kind", "from-estimator"}, {"estimator", "numerical-mle"},
                       {"n", 300}};
    const auto c = ExperimentConfig::from_json(j);
    setenv("REGRETLAB_THREADS", "1", 1);
    const auto rows1 = run(c);
    setenv("REGRETLAB_THREADS", "4", 1);
    const auto rows2 = run(c);
    unsetenv("REGRETLAB_THREADS");
    CHECK(csv_to_string(rows1, "") == csv_to_string(rows2, ""));
}

TEST_CASE("write_csv and write_json produce files") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "regretlab_test_io";
    fs::create_directories(dir);
    const auto c = ExperimentConfig::from_json(base_config_json());
    const auto rows = run(c);
    const auto csv_path = dir / "t.csv";
    const auto json_path = dir / "t.json";
    write_csv(rows, csv_path.string(), "");
    write_json(c, rows, json_path.string());
    CHECK(slurp(csv_path) == csv_to_string(rows, ""));
    const auto j = json::parse(slurp(json_path));
    CHECK(j["rows"].size() == 3);
    fs::remove_all(dir);
}
