#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trilink/cli.hpp"

using namespace trilink;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("trilink_test_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
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

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

// first data row whose leading cell matches
std::vector<std::string> csv_row(const std::string& text, const std::string& key) {
    for (const auto& line : lines_of(text)) {
        auto cells = split(line);
        if (!cells.empty() && cells[0] == key) return cells;
    }
    FAIL("row not found: " << key);
    return {};
}

} // namespace

TEST_CASE("doppler profile CSV: culmination and timing columns") {
    cli::DopplerOptions opt;
    opt.duration_s = 600.0;
    opt.step_s = 100.0;
    const std::string csv = cli::doppler_csv(opt);
    const auto ls = lines_of(csv);
    CHECK(ls[0] == "t_s,elevation_deg,slant_range_km,doppler_hz,doppler_rate_hz_s,ta_ms,ta_rate_us_s");

    const auto zenith = csv_row(csv, "0.000");
    CHECK(zenith[1] == "90.000");
    CHECK(zenith[2] == "500.000");
    CHECK(std::abs(std::stod(zenith[3])) < 0.5);  // Doppler null at culmination
    CHECK(zenith[5] == "3.3356");
    CHECK(zenith[6] == "0.00");
    CHECK(csv_row(csv, "# out_of_window_rows")[1] == "0");
}

TEST_CASE("doppler profile CSV: step equal to duration yields the two endpoints") {
    cli::DopplerOptions opt;
    opt.duration_s = 600.0;
    opt.step_s = 600.0;
    const auto ls = lines_of(cli::doppler_csv(opt));
    int data_rows = 0;
    for (const auto& l : ls)
        if (!l.empty() && l[0] != '#' && l[0] != 't') ++data_rows;
    CHECK(data_rows == 2);
}

TEST_CASE("doppler profile CSV: velocity override and window accounting") {
    cli::DopplerOptions opt;
    opt.duration_s = 800.0;  // wider than the ~690 s visibility window
    opt.step_s = 10.0;
    opt.v_kms = 7.5;
    const std::string csv = cli::doppler_csv(opt);

    const double bound = std::stod(csv_row(csv, "# eq1_theta0_bound_hz")[1]);
    CHECK(std::abs(bound - 40000.0) / 40000.0 <= 0.01);

    double max_abs = 0.0;
    int data_rows = 0;
    for (const auto& l : lines_of(csv)) {
        if (l.empty() || l[0] == '#' || l[0] == 't') continue;
        ++data_rows;
        max_abs = std::max(max_abs, std::abs(std::stod(split(l)[3])));
    }
    CHECK(max_abs / 1e3 >= 26.0);
    CHECK(max_abs / 1e3 <= 40.0);

    const int omitted = std::stoi(csv_row(csv, "# out_of_window_rows")[1]);
    CHECK(omitted > 0);
    CHECK(data_rows + omitted == 81);  // floor(800/10) + 1 nominal rows
}

TEST_CASE("linkbudget table reproduces the reference preset") {
    const std::string path = tmp_path("lb.csv");
    cli::LinkbudgetOptions opt;
    opt.out = path;
    CHECK(cli::cmd_linkbudget(opt) == cli::kExitOk);
    const std::string csv = slurp(path);
    CHECK(csv_row(csv, "received_power_dbw") ==
          std::vector<std::string>{"received_power_dbw", "-135.5", "-138.5", "-3.0"});
    CHECK(csv_row(csv, "downlink_cnr_db") ==
          std::vector<std::string>{"downlink_cnr_db", "20.8", "17.8", "-3.0"});
    CHECK(csv_row(csv, "uplink_cnr_db") ==
          std::vector<std::string>{"uplink_cnr_db", "11.2", "14.2", "3.0"});
    CHECK(csv_row(csv, "uplink_margin_db") ==
          std::vector<std::string>{"uplink_margin_db", "7.2", "10.2", "3.0"});
    std::remove(path.c_str());
}

TEST_CASE("linkbudget --fspl-computed swaps in the formula value with a note") {
    const std::string path = tmp_path("lb_fspl.csv");
    cli::LinkbudgetOptions opt;
    opt.out = path;
    opt.fspl_computed = true;
    CHECK(cli::cmd_linkbudget(opt) == cli::kExitOk);
    const std::string csv = slurp(path);
    CHECK(csv_row(csv, "path_loss_db")[1] == "-150.5");
    bool note = false;
    for (const auto& l : lines_of(csv))
        if (l.rfind("# note,", 0) == 0 && l.find("150.5") != std::string::npos) note = true;
    CHECK(note);
    std::remove(path.c_str());
}

TEST_CASE("linkbudget explicit inputs and failure modes") {
    const std::string in_path = tmp_path("lb_inputs.json");
    {
        std::ofstream out(in_path);
        out << R"({"d2c":{"eirp_dbw":50,"path_loss_db":-180,"rx_gain_dbi":0,"noise_dbw":-156,
                  "tx_power_dbm":23,"sat_rx_gain_dbi":48},
                 "ntn":{"eirp_dbw":50,"path_loss_db":-180,"rx_gain_dbi":0,"noise_dbw":-156,
                  "tx_power_dbm":23,"sat_rx_gain_dbi":48}})";
    }
    const std::string out_path = tmp_path("lb_explicit.csv");
    cli::LinkbudgetOptions opt;
    opt.inputs_path = in_path;
    opt.out = out_path;
    CHECK(cli::cmd_linkbudget(opt) == cli::kExitOk);
    const std::string csv = slurp(out_path);
    for (const auto& l : lines_of(csv)) {
        if (l.empty() || l[0] == '#' || l[0] == 'p') continue;
        CHECK(split(l)[3] == "0.0");  // identical systems: all deltas zero
    }

    {
        std::ofstream out(in_path);
        out << R"({"d2c":{"eirp_dbw":50},"ntn":{"eirp_dbw":50}})";  // incomplete
    }
    CHECK(cli::cmd_linkbudget(opt) == cli::kExitValidation);

    cli::LinkbudgetOptions unknown;
    unknown.preset = "table9";
    CHECK(cli::cmd_linkbudget(unknown) == cli::kExitUsage);
    std::remove(in_path.c_str());
    std::remove(out_path.c_str());
}

TEST_CASE("simulate: preset run, determinism, and log output") {
    const std::string r1 = tmp_path("sim1.json");
    const std::string r2 = tmp_path("sim2.json");
    const std::string lg = tmp_path("sim.ndjson");

    cli::SimulateOptions opt;
    opt.preset = "corridor";
    opt.seed = 9;
    opt.out = r1;
    opt.log_path = lg;
    CHECK(cli::cmd_simulate(opt) == cli::kExitOk);
    opt.out = r2;
    CHECK(cli::cmd_simulate(opt) == cli::kExitOk);
    CHECK(slurp(r1) == slurp(r2));

    const auto report = nlohmann::json::parse(slurp(r1));
    CHECK(report.at("seed").get<std::uint64_t>() == 9);

    const auto log_lines = lines_of(slurp(lg));
    REQUIRE(!log_lines.empty());
    const auto header = nlohmann::json::parse(log_lines[0]);
    CHECK(header.at("seed").get<std::uint64_t>() == 9);
    CHECK(header.at("events").get<std::size_t>() == log_lines.size() - 1);

    std::remove(r1.c_str());
    std::remove(r2.c_str());
    std::remove(lg.c_str());
}

TEST_CASE("simulate: maritime preset serves only T3") {
    const std::string path = tmp_path("sim_maritime.json");
    cli::SimulateOptions opt;
    opt.preset = "maritime";
    opt.out = path;
    CHECK(cli::cmd_simulate(opt) == cli::kExitOk);
    const auto report = nlohmann::json::parse(slurp(path));
    CHECK(report.at("tiers").at("T3").at("fraction_of_served").get<double>() == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("simulate: parse and validation failures use distinct exit codes") {
    const std::string bad_json = tmp_path("bad.json");
    {
        std::ofstream out(bad_json);
        out << "{ not json";
    }
    cli::SimulateOptions opt;
    opt.scenario_path = bad_json;
    CHECK(cli::cmd_simulate(opt) == cli::kExitValidation);

    {
        std::ofstream out(bad_json);
        // fractions sum to 0.5; period invalid
        out << R"({"seed":1,"duration_s":10,"route":[{"zone":"URBAN","fraction":0.5,"t1":true,"t2":true,"t3":true}],
                  "workload":[{"class":{"name":"a","kind":"BANDWIDTH","max_latency_ms":100,"min_throughput":5},"period_ms":0}]})";
    }
    CHECK(cli::cmd_simulate(opt) == cli::kExitValidation);

    {
        std::ofstream out(bad_json);
        out << R"({"seed":1,"duration_s":10,"unknown_key":3,"route":[],"workload":[]})";
    }
    CHECK(cli::cmd_simulate(opt) == cli::kExitValidation);
    std::remove(bad_json.c_str());
}

TEST_CASE("bundled scenario files match the built-in presets") {
    for (const std::string name : {"corridor", "urban", "maritime"}) {
        const auto from_file =
            scenario_io::load_scenario(std::string(TRILINK_SOURCE_DIR) + "/scenarios/" + name + ".json");
        const auto a = simcore::run(from_file);
        const auto b = simcore::run(presets::scenario(name));
        CHECK(scenario_io::report_to_json(a.report).dump() ==
              scenario_io::report_to_json(b.report).dump());
    }
}

TEST_CASE("scenario round trip is report-equal") {
    const std::string sc_path = tmp_path("roundtrip.json");
    const auto original = presets::corridor();
    {
        std::ofstream out(sc_path);
        out << scenario_io::scenario_to_json(original).dump(2) << "\n";
    }
    const auto reparsed = scenario_io::load_scenario(sc_path);
    const auto a = simcore::run(original);
    const auto b = simcore::run(reparsed);
    CHECK(scenario_io::report_to_json(a.report).dump() ==
          scenario_io::report_to_json(b.report).dump());
    std::remove(sc_path.c_str());
}

TEST_CASE("compare: ntn payload axis separates T2 latency populations") {
    const std::string path = tmp_path("cmp_payload.csv");
    cli::CompareOptions opt;
    opt.preset = "corridor";
    opt.axis = "ntn-payload";
    opt.out = path;
    CHECK(cli::cmd_compare(opt) == cli::kExitOk);
    const std::string csv = slurp(path);
    const auto row = csv_row(csv, "T2_mean_network_latency_ms");
    const double transparent = std::stod(row[1]);
    const double regenerative = std::stod(row[2]);
    CHECK(std::abs(transparent - 60.0) <= 5.0);
    CHECK(std::abs(regenerative - 25.0) <= 5.0);
    std::remove(path.c_str());
}

TEST_CASE("compare: d2c routing axis separates T3 latency populations") {
    const std::string path = tmp_path("cmp_routing.csv");
    cli::CompareOptions opt;
    opt.preset = "corridor";
    opt.axis = "d2c-routing";
    opt.out = path;
    CHECK(cli::cmd_compare(opt) == cli::kExitOk);
    const std::string csv = slurp(path);
    const auto row = csv_row(csv, "T3_mean_network_latency_ms");
    const double gateway = std::stod(row[1]);
    const double isl = std::stod(row[2]);
    CHECK(gateway >= 150.0);
    CHECK(gateway <= 250.0);
    CHECK(isl >= 50.0);
    CHECK(isl <= 100.0);
    std::remove(path.c_str());
}

TEST_CASE("compare: tri-link delivers strictly more than T1-only") {
    const std::string path = tmp_path("cmp_tri.csv");
    cli::CompareOptions opt;
    opt.preset = "corridor";
    opt.axis = "tri-vs-single";
    opt.out = path;
    CHECK(cli::cmd_compare(opt) == cli::kExitOk);
    const std::string csv = slurp(path);
    const auto row = csv_row(csv, "delivered_fraction");
    CHECK(std::stod(row[1]) > std::stod(row[2]));
    std::remove(path.c_str());

    cli::CompareOptions bad;
    bad.preset = "corridor";
    bad.axis = "sideways";
    CHECK(cli::cmd_compare(bad) == cli::kExitUsage);
}

TEST_CASE("exit-code contract at the argument parser") {
    CHECK(cli::run_cli({}) == cli::kExitUsage);
    CHECK(cli::run_cli({"bogus"}) == cli::kExitUsage);
    CHECK(cli::run_cli({"simulate", "--no-such-flag"}) == cli::kExitUsage);
    CHECK(cli::run_cli({"--help"}) == cli::kExitOk);
    CHECK(cli::run_cli({"simulate"}) == cli::kExitValidation);  // neither scenario nor preset
}
