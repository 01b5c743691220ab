#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "dmglue/errors.hpp"
#include "dmglue/report.hpp"
#include "dmglue/rng.hpp"

using namespace dmglue;

namespace {

ConvergenceReport sample_report() {
    ConvergenceReport r;
    r.quantity = "dbar_lp";
    r.points = {{100.0, 0.1}, {316.2277660168379, 1.0 / 3.0},
                {1000.0, 2.1e-17}};
    r.slope = -2.0 / 3.0;
    r.expected_slope = -0.66666666666666663;
    r.tolerance = 0.15;
    r.residual = 3.5e-4;
    r.one_sided = false;
    r.pass = true;
    r.meta.seed = 9223372036854775809ull;
    r.meta.grid = "128x32";
    r.meta.p = 3.0;
    r.meta.delta = 0.1;
    r.meta.version = "1";
    r.meta.note = "all-zero";
    return r;
}

ConvergenceReport random_report(Rng& rng) {
    ConvergenceReport r;
    r.quantity = "xi_w1p";
    const int n = 2 + static_cast<int>(rng.uniform01() * 6);
    for (int i = 0; i < n; ++i)
        r.points.push_back({std::exp(rng.uniform(-40.0, 40.0)),
                            rng.normal() * std::exp(rng.uniform(-300.0, 300.0))});
    r.slope = rng.normal();
    r.expected_slope = rng.normal();
    r.tolerance = rng.uniform01();
    r.residual = rng.uniform01() * 1e-3;
    r.one_sided = rng.uniform01() < 0.5;
    r.pass = rng.uniform01() < 0.5;
    r.meta.seed = rng.next_u64();
    r.meta.grid = "256x32";
    r.meta.p = rng.uniform(2.1, 5.0);
    r.meta.delta = rng.uniform(0.01, 0.2);
    r.meta.note = "";
    return r;
}

}  // namespace

TEST_CASE("report round-trips bit exactly through JSON and CSV") {
    Rng rng(20260814);
    CHECK(parse_report(emit_report(sample_report(), ReportFormat::json),
                       ReportFormat::json) == sample_report());
    CHECK(parse_report(emit_report(sample_report(), ReportFormat::csv),
                       ReportFormat::csv) == sample_report());
    for (int trial = 0; trial < 200; ++trial) {
        const ConvergenceReport r = random_report(rng);
        CHECK((parse_report(emit_report(r, ReportFormat::json),
                            ReportFormat::json) == r));
        CHECK((parse_report(emit_report(r, ReportFormat::csv),
                            ReportFormat::csv) == r));
    }
}

TEST_CASE("report emission is deterministic and full precision") {
    const ConvergenceReport r = sample_report();
    CHECK(emit_report(r, ReportFormat::json) ==
          emit_report(r, ReportFormat::json));
    CHECK(emit_report(r, ReportFormat::csv) ==
          emit_report(r, ReportFormat::csv));
    // 0.1 is not exactly representable; full precision shows the actual value
    const std::string json = emit_report(r, ReportFormat::json);
    CHECK(json.find("0.10000000000000001") != std::string::npos);
    CHECK(json.find("0.33333333333333331") != std::string::npos);
    CHECK(json.find("9223372036854775809") != std::string::npos);
}

TEST_CASE("JSON and CSV renderings carry identical point values") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const ConvergenceReport r = random_report(rng);
        const auto from_json = parse_report(emit_report(r, ReportFormat::json),
                                            ReportFormat::json);
        const auto from_csv = parse_report(emit_report(r, ReportFormat::csv),
                                           ReportFormat::csv);
        CHECK((from_json.points == from_csv.points));
        CHECK((from_json == from_csv));
    }
}

TEST_CASE("empty report is rejected") {
    ConvergenceReport r = sample_report();
    r.points.clear();
    CHECK_THROWS_AS(emit_report(r, ReportFormat::json), ReportError);
    CHECK_THROWS_AS(emit_report(r, ReportFormat::csv), ReportError);
}

TEST_CASE("malformed report text is rejected") {
    CHECK_THROWS_AS(parse_report("not json at all", ReportFormat::json),
                    ReportError);
    CHECK_THROWS_AS(parse_report("{\"quantity\": \"x\"}", ReportFormat::json),
                    ReportError);
    CHECK_THROWS_AS(parse_report("{\"quantity\": \"x\", \"points\": []}",
                                 ReportFormat::json),
                    ReportError);
    CHECK_THROWS_AS(parse_report("param,value\n1,2\n", ReportFormat::csv),
                    ReportError);
    CHECK_THROWS_AS(
        parse_report("quantity,param,value\na,1,2\nb,2,3\nsummary,slope=0\n",
                     ReportFormat::csv),
        ReportError);
    CHECK_THROWS_AS(parse_report("quantity,param,value\na,1,2\n",
                                 ReportFormat::csv),
                    ReportError);
    // free text that would corrupt the CSV framing is refused up front
    ConvergenceReport r = sample_report();
    r.meta.note = "spills,into,cells";
    CHECK_THROWS_AS(emit_report(r, ReportFormat::csv), ReportError);
    CHECK_NOTHROW(emit_report(r, ReportFormat::json));
}

TEST_CASE("report files round-trip and bad paths raise IoError") {
    const auto dir = std::filesystem::temp_directory_path() / "dmglue_report_t";
    std::filesystem::remove_all(dir);
    const ConvergenceReport r = sample_report();
    const std::string json_path = (dir / "nested" / "r.json").string();
    const std::string csv_path = (dir / "r.csv").string();
    write_report(r, json_path, ReportFormat::json);
    write_report(r, csv_path, ReportFormat::csv);
    CHECK((read_report(json_path, ReportFormat::json) == r));
    CHECK((read_report(csv_path, ReportFormat::csv) == r));
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(write_report(r, "/proc/version/nope/r.json",
                                 ReportFormat::json),
                    IoError);
    CHECK_THROWS_AS(read_report((dir / "gone.json").string(),
                                ReportFormat::json),
                    IoError);
}
