// Config files, tables, and serialization.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reference_device.hpp"
#include "sqc/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sqc;

fs::path shipped_config() {
    return fs::path(__FILE__).parent_path().parent_path() / "configs" / "paper_sec5.cfg";
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "sqc_test_io";
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string error_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const sqc::error& e) {
        return e.what();
    }
    return "";
}

TEST(Config, ShippedFileMatchesReferenceDevice) {
    const io::RunConfig cfg = io::parse_config(shipped_config().string());
    const CircuitParameters ref = refdev::device();
    const double rel = 1e-12;
    EXPECT_NEAR(cfg.circuit.L_r, ref.L_r, rel * ref.L_r);
    EXPECT_NEAR(cfg.circuit.C_r, ref.C_r, rel * ref.C_r);
    EXPECT_NEAR(cfg.circuit.L_a, ref.L_a, rel * ref.L_a);
    EXPECT_NEAR(cfg.circuit.C_a_total, ref.C_a_total, rel * ref.C_a_total);
    EXPECT_NEAR(cfg.circuit.I0_a, ref.I0_a, rel * ref.I0_a);
    EXPECT_NEAR(cfg.circuit.I0_c, ref.I0_c, rel * ref.I0_c);
    EXPECT_NEAR(cfg.circuit.C_c_total, ref.C_c_total, rel * ref.C_c_total);
    EXPECT_DOUBLE_EQ(cfg.circuit.flux_ext, ref.flux_ext);
    EXPECT_DOUBLE_EQ(cfg.circuit.flux_cpl, ref.flux_cpl);
    EXPECT_EQ(cfg.grid.n_points, 4096);
    EXPECT_EQ(cfg.sweep.axis, SweepAxis::flux_cpl);
    EXPECT_EQ(cfg.sweep.n_points, 33);
    EXPECT_EQ(cfg.output.format, "csv");
}

TEST(Config, RoundTripIsLossless) {
    io::RunConfig cfg = io::parse_config(shipped_config().string());
    // Awkward values must survive serialize -> parse bit for bit.
    cfg.circuit.I0_a = 1.2345678912345e-6;
    cfg.circuit.C_r = 6.547381296e-13;
    cfg.circuit.L_r = 0.84868e-9;
    cfg.sweep.start = -0.98765432123456789;
    cfg.sweep.atom_energy_perturbation = -0.0123456789;
    cfg.output.directory = "some/dir";
    cfg.output.format = "record";

    const std::string text = io::serialize_config(cfg);
    const io::RunConfig back = io::parse_config_text(text, "round-trip");
    EXPECT_TRUE(cfg == back);
    // Serialization of the reparsed config is byte-identical.
    EXPECT_EQ(io::serialize_config(back), text);
}

TEST(Config, UnknownKeysRejectedWithLocation) {
    const std::string text = "[circuit]\nL_r_nH = 1.0\nbogus_key = 2.0\n";
    const std::string msg =
        error_message([&] { io::parse_config_text(text, "cfg"); });
    EXPECT_NE(msg.find("cfg:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bogus_key"), std::string::npos) << msg;

    EXPECT_THROW(io::parse_config_text("[nonsense]\n", "cfg"), config_error);
    EXPECT_THROW(io::parse_config_text("[sweep]\nn_points = 9\nn_points = 9\n", "cfg"),
                 config_error);
}

TEST(Config, SyntaxErrorsCarryLineInfo) {
    const std::string msg = error_message(
        [] { io::parse_config_text("[circuit]\nthis is not a pair\n", "cfg"); });
    EXPECT_NE(msg.find("cfg:2"), std::string::npos) << msg;

    EXPECT_THROW(io::parse_config_text("[circuit\n", "cfg"), config_error);
    EXPECT_THROW(io::parse_config_text("key_before_section = 1\n", "cfg"), config_error);
    EXPECT_THROW(io::parse_config_text("[circuit]\nL_r_nH = abc\n", "cfg"), config_error);
    EXPECT_THROW(io::parse_config_text("[grid]\nn_points = 4096.5\n", "cfg"),
                 config_error);
    EXPECT_THROW(io::parse_config_text("[sweep]\nfreeze_zpf = yes\n", "cfg"),
                 config_error);
    EXPECT_THROW(io::parse_config_text("[sweep]\naxis = sideways\n", "cfg"),
                 config_error);
    EXPECT_THROW(io::parse_config_text("[circuit]\nL_r_nH =\n", "cfg"), config_error);
}

TEST(Config, EmptyFileListsRequiredKeys) {
    const std::string msg =
        error_message([] { io::parse_config_text("", "empty.cfg"); });
    EXPECT_NE(msg.find("missing required"), std::string::npos) << msg;
    EXPECT_NE(msg.find("L_r_nH"), std::string::npos) << msg;
    EXPECT_NE(msg.find("I0_a_uA"), std::string::npos) << msg;
    EXPECT_NE(msg.find("flux_cpl"), std::string::npos) << msg;
}

TEST(Config, SemanticValidation) {
    io::RunConfig good = io::parse_config(shipped_config().string());

    auto reject = [&](void (*mutate)(io::RunConfig&)) {
        io::RunConfig bad = good;
        mutate(bad);
        EXPECT_THROW(io::parse_config_text(io::serialize_config(bad), "bad"),
                     config_error);
    };
    reject([](io::RunConfig& c) { c.circuit.L_r = -1e-9; });
    reject([](io::RunConfig& c) { c.grid.n_points = 256; });
    reject([](io::RunConfig& c) { c.sweep.stop = c.sweep.start; });
    reject([](io::RunConfig& c) { c.sweep.n_points = 1; });
    reject([](io::RunConfig& c) { c.sweep.numeric_every = -2; });
    reject([](io::RunConfig& c) { c.sweep.atom_energy_perturbation = 0.05; });
    reject([](io::RunConfig& c) { c.sweep.recovery_stop = c.sweep.recovery_start; });
    reject([](io::RunConfig& c) { c.output.format = "xml"; });
}

TEST(Config, HalfQuantumCouplerBiasRuns) {
    io::RunConfig cfg = io::parse_config(shipped_config().string());
    cfg.circuit.flux_cpl = 0.5;
    const RateSet rs = compute_rate_set(cfg.circuit);
    EXPECT_LT(std::abs(rs.bare.g1i), 1e-9);  // pure-capacitive regime
    EXPECT_GT(rs.bare.g1c, 10.0);
}

TEST(Config, HashIsStableAndSensitive) {
    const io::RunConfig cfg = io::parse_config(shipped_config().string());
    io::RunConfig other = cfg;
    EXPECT_EQ(io::config_hash(cfg), io::config_hash(other));
    EXPECT_EQ(io::config_hash(cfg).size(), 16u);
    other.circuit.flux_cpl = 0.1;
    EXPECT_NE(io::config_hash(cfg), io::config_hash(other));
}

TEST(Tables, SchemaRejectsUnitlessColumns) {
    io::Table t;
    t.columns = {"flux_Phi0", "g2_tilde"};
    t.rows.push_back({"0", "27.6"});
    EXPECT_THROW(io::validate_schema(t), invalid_parameters_error);
    t.columns[1] = "g2_tilde_MHz";
    EXPECT_NO_THROW(io::validate_schema(t));
    t.rows.push_back({"only-one-cell"});
    EXPECT_THROW(io::validate_schema(t), invalid_parameters_error);
    io::Table empty;
    EXPECT_THROW(io::validate_schema(empty), invalid_parameters_error);
}

TEST(Tables, CsvLayoutAndDeterminism) {
    io::Table t;
    t.columns = {"flux_Phi0", "g2_tilde_MHz", "note_label"};
    t.rows.push_back({io::cell(0.125), io::cell(27.648), "ok"});
    t.rows.push_back({io::cell(-0.5), "", "failed here"});

    const fs::path path = scratch_dir() / "layout.csv";
    const std::vector<std::string> prov = {"tool: squidcoupler 0.1.0", "command: test"};
    io::write_csv(path, t, prov);
    const std::string first = read_file(path);
    io::write_csv(path, t, prov);
    EXPECT_EQ(read_file(path), first);  // byte-identical rewrite

    std::istringstream in(first);
    std::string line;
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "# tool: squidcoupler 0.1.0");
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "# command: test");
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "flux_Phi0,g2_tilde_MHz,note_label");
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "0.125,27.648,ok");
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "-0.5,,failed here");
    EXPECT_FALSE(std::getline(in, line));
}

TEST(Tables, RecordMirrorsTheTable) {
    io::Table t;
    t.columns = {"x_1", "y_MHz"};
    t.rows.push_back({"1", "2.5"});
    const auto j = io::table_record(t, {"tool: squidcoupler 0.1.0"});
    EXPECT_EQ(j["columns"].size(), 2u);
    EXPECT_EQ(j["columns"][1], "y_MHz");
    EXPECT_EQ(j["rows"][0][1], "2.5");
    EXPECT_EQ(j["provenance"][0], "tool: squidcoupler 0.1.0");
    EXPECT_EQ(j.dump(2), io::table_record(t, {"tool: squidcoupler 0.1.0"}).dump(2));
}

TEST(Tables, ProvenanceEchoesDefaultsAndFlags) {
    const io::RunConfig cfg = io::parse_config(shipped_config().string());
    const auto lines = io::provenance_lines(cfg, "rates", {"freeze_zpf: true"});
    ASSERT_GE(lines.size(), 4u);
    EXPECT_EQ(lines[0], std::string("tool: ") + io::tool_name + " " + io::tool_version);
    EXPECT_EQ(lines[1], "command: rates");
    EXPECT_EQ(lines[2], "config_hash: " + io::config_hash(cfg));
    EXPECT_EQ(lines[3], "freeze_zpf: true");

    auto contains = [&](const std::string& needle) {
        for (const auto& l : lines)
            if (l.find(needle) != std::string::npos) return true;
        return false;
    };
    EXPECT_TRUE(contains("config: circuit.L_r_nH = "));
    EXPECT_TRUE(contains("config: sweep.numeric_every = 8"));  // defaults echoed
    EXPECT_TRUE(contains("config: output.format = csv"));
    // No wall-clock anywhere: identical runs must be byte-identical.
    EXPECT_FALSE(contains("time"));
    EXPECT_FALSE(contains("date"));
}

TEST(Tables, RatesTableCarriesThePipelineValues) {
    const RateSet rs = compute_rate_set(refdev::device());
    const io::Table t = io::rates_table(rs);
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 1u);

    auto col = [&](const std::string& name) {
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            if (t.columns[c] == name) return t.rows[0][c];
        ADD_FAILURE() << "missing column " << name;
        return std::string();
    };
    EXPECT_NEAR(std::stod(col("g2_tilde_MHz")), rs.renorm.g2_tilde, 1e-6);
    EXPECT_NEAR(std::stod(col("g2_tilde_MHz")), 27.648, 0.01);
    EXPECT_NEAR(std::stod(col("omega_a_tilde_GHz")), rs.freqs.omega_a_tilde, 1e-6);
    EXPECT_EQ(col("freeze_zpf_flag"), "0");
}

TEST(Tables, SweepTableMarksErrorRowsWithoutValues) {
    SweepSpec spec;
    spec.axis = SweepAxis::flux_ext;
    spec.start = 0.82;  // beyond the bias where the shallow well survives
    spec.stop = 0.86;
    spec.n_points = 3;
    spec.base = refdev::device();
    const io::Table t = io::sweep_table(run_sweep(spec));
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.columns.front(), "flux_ext_Phi0");
    EXPECT_EQ(t.columns.back(), "error_label");
    for (const auto& row : t.rows) {
        EXPECT_FALSE(row.front().empty());             // flux always present
        EXPECT_TRUE(row[1].empty()) << row[1];         // no fabricated rates
        EXPECT_FALSE(row.back().empty());              // error text present
    }
}

TEST(Tables, ResonanceTableFlagsTheWindow) {
    SweepSpec spec;
    spec.axis = SweepAxis::flux_cpl;
    spec.start = -0.2;
    spec.stop = 0.2;
    spec.n_points = 17;
    spec.base = refdev::device();
    const SweepResult result = run_sweep(spec);  // analytic fallback, no eigen-solves
    const io::Table t = io::resonance_table(result);
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 17u);
    EXPECT_EQ(t.columns[1], "omega_a_num_GHz");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_TRUE(t.rows[i][1].empty());  // no eigen-solve ran: cell stays empty
        const double flux = result.rows[i].flux;
        const std::string& flag = t.rows[i][4];
        if (flux == 0.0) {
            EXPECT_EQ(flag, "1");
        }
        if (std::abs(flux) >= 0.05) {
            EXPECT_EQ(flag, "0");
        }
    }
}

TEST(Tables, LevelsTablePairsPerturbativeEnergies) {
    const std::vector<MetastableLevel> levels = {
        {0.10, 0.001, false}, {0.70, 0.999, true}, {0.80, 0.02, false},
        {0.95, 0.95, true},
    };
    const std::vector<double> pert = {0.71, 0.97};
    const io::Table t = io::levels_table(levels, pert);
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.rows[0][4], "");                 // not metastable: no ladder entry
    EXPECT_EQ(t.rows[1][4], io::cell(0.71));     // first metastable state
    EXPECT_EQ(t.rows[2][4], "");
    EXPECT_EQ(t.rows[3][4], io::cell(0.97));     // second metastable state
    EXPECT_EQ(t.rows[1][3], "1");
    EXPECT_EQ(t.rows[2][3], "0");

    // Unclassified (single-well) mode: no weights or flags, ladder by index.
    const io::Table u = io::levels_table(levels, pert, false);
    EXPECT_EQ(u.rows[0][2], "");
    EXPECT_EQ(u.rows[0][3], "");
    EXPECT_EQ(u.rows[0][4], io::cell(0.71));
    EXPECT_EQ(u.rows[1][4], io::cell(0.97));
    EXPECT_EQ(u.rows[2][4], "");
}

TEST(Tables, PotentialTableSamplesTheGrid) {
    const PotentialSpec pot{100.0, 50.0, 0.25, std::nullopt};
    const Grid grid{-2.0, 2.0, 1024};
    const io::Table t = io::potential_table(pot, grid, 4);
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 256u);
    EXPECT_EQ(t.rows[0][0], io::cell(-2.0));
    EXPECT_EQ(t.rows[0][1], io::cell(pot.U(-2.0)));
    EXPECT_THROW(io::potential_table(pot, grid, 0), invalid_parameters_error);
}

TEST(Tables, VerifyTableShowsExpectedFailures) {
    const std::vector<alg::VerificationReport> reports = {
        alg::verify_identity("cross-kerr-24"),
        alg::verify_identity("negative-control"),
    };
    const io::Table t = io::verify_table(reports);
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][0], "cross-kerr-24");
    EXPECT_EQ(t.rows[0][1], "pass");
    EXPECT_EQ(t.rows[0][2], "pass");
    EXPECT_EQ(t.rows[0][3], "0");
    EXPECT_EQ(t.rows[1][1], "fail");  // the control is expected to fail
    EXPECT_EQ(t.rows[1][2], "fail");
    EXPECT_NE(t.rows[1][3], "0");
}

TEST(Tables, FeaturesTableUsesLongFormat) {
    FeatureSet f;
    f.zeros.push_back({"g1i_tilde", 0.165209});
    f.extrema.push_back({"g2_tilde", 0.12832, 31.126});
    f.resonance_windows.push_back({-0.01, 0.02});
    const io::Table t = io::features_table(f, "nominal");
    io::validate_schema(t);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0][0], "zero");
    EXPECT_EQ(t.rows[0][1], "g1i_tilde");
    EXPECT_EQ(t.rows[1][0], "extremum");
    EXPECT_EQ(t.rows[1][4], io::cell(31.126));
    EXPECT_EQ(t.rows[2][0], "window");
    EXPECT_EQ(t.rows[2][1], "nominal");
    EXPECT_EQ(t.rows[2][2], io::cell(-0.01));
    EXPECT_EQ(t.rows[2][3], io::cell(0.02));
}

}  // namespace
