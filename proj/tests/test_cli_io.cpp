#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_fields.hpp"
#include "vfe/cli.hpp"

using namespace vfe;
using vfe::testing::kTwoPi;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vfe");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "vfe_test_XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    return {std::istreambuf_iterator<char>(is), {}};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

bool bitwise_equal(const Field3& a, const Field3& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < 3; ++c)
            if (a[i][c] != b[i][c]) return false;
    return true;
}

}  // namespace

TEST(DiagnosticsCsv, SingleZeroRecordIsTwoLines) {
    std::ostringstream os;
    write_diagnostics_csv(os, {DiagnosticsRecord{}});
    EXPECT_EQ(os.str(), "t,unit_norm_drift,norm_vs,norm_vss,norm_vsss,energy_E2,modified_E3\n0,0,0,0,0,0,0\n");
    EXPECT_THROW(write_diagnostics_csv(os, {}), ValidationError);
}

TEST(DiagnosticsCsv, RoundTrip) {
    RunConfig c;
    c.params.alpha = 1.0;
    c.params.delta = 1e-3;
    c.grid = GridSpec::half_line(256, 40.0);
    c.ic.family = "compatible-bump";
    c.t_final = 0.002;
    c.diagnostics_every = 3;
    const RunResult r = run(c);
    std::ostringstream os;
    write_diagnostics_csv(os, r.records);
    EXPECT_EQ(count_lines(os.str()), r.records.size() + 1);
    std::istringstream is(os.str());
    const auto back = read_diagnostics_csv(is);
    ASSERT_EQ(back.size(), r.records.size());
    for (std::size_t k = 0; k < back.size(); ++k) EXPECT_TRUE(back[k] == r.records[k]) << "record " << k;
}

TEST(DiagnosticsCsv, RaggedRowRejected) {
    std::istringstream is("t,unit_norm_drift,norm_vs,norm_vss,norm_vsss,energy_E2,modified_E3\n0,0,0\n");
    EXPECT_THROW(read_diagnostics_csv(is), IoError);
}

TEST(Snapshot, RoundTripIsBitExact) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const GridSpec& g : {GridSpec::half_line(97, 13.7), GridSpec::periodic(64, kTwoPi)})
        for (bool with_x : {false, true}) {
            Snapshot s{g, {}, 0.1 + 0.2, vfe::testing::random_smooth_unit(g, rng), {}};
            s.params.alpha = 0.7;
            s.params.delta = 1.0 / 3.0;
            s.params.stencil_order = 6;
            if (with_x)
                for (std::size_t i = 0; i < g.n(); ++i) s.x.push_back({u(rng), u(rng) * 1e-300, u(rng) * 1e300});
            std::stringstream ss;
            write_snapshot(ss, s);
            const Snapshot b = read_snapshot(ss);
            EXPECT_TRUE(b.grid == g);
            EXPECT_EQ(b.t, s.t);
            EXPECT_EQ(b.params.alpha, 0.7);
            EXPECT_EQ(b.params.delta, 1.0 / 3.0);
            EXPECT_EQ(b.params.stencil_order, 6);
            EXPECT_TRUE(bitwise_equal(b.v, s.v));
            EXPECT_TRUE(bitwise_equal(b.x, s.x));
        }
}

TEST(Snapshot, CorruptInputs) {
    const GridSpec g = GridSpec::half_line(16, 1.0);
    std::stringstream ss;
    write_snapshot(ss, {g, {}, 0.0, constant_field(16, e3), {}});
    const std::string good = ss.str();

    std::istringstream truncated(good.substr(0, good.size() / 2));
    EXPECT_THROW(read_snapshot(truncated), IoError);
    std::string schema = good;
    schema.replace(schema.find("schema_version 1"), 16, "schema_version 9");
    std::istringstream bad_schema(schema);
    EXPECT_THROW(read_snapshot(bad_schema), IoError);
    std::string nan = good;
    nan.replace(nan.rfind(" 1\n"), 2, " nan");
    std::istringstream bad_value(nan);
    EXPECT_THROW(read_snapshot(bad_value), IoError);
    EXPECT_THROW(read_snapshot("/nonexistent/vfe.snap"), IoError);
}

TEST(Config, EchoRoundTrip) {
    const std::string text =
        "[grid]\nn = 300\nlength = 25.5\nboundary = half-line\nstencil_order = 6\n"
        "[params]\nalpha = 0.75\ndelta = 1e-3\n"
        "[run]\nt_final = 0.2\ndiagnostics_every = 4\nright_boundary = extrapolation\ntrack_x = true\n"
        "[ic]\nfamily = helix-cap\nhelix_a = 0.4\n"
        "[output]\ndir = results\n";
    const Config c = parse_config(text, false);
    EXPECT_EQ(c.run.grid.n(), 300u);
    EXPECT_EQ(c.run.params.stencil_order, 6);
    EXPECT_EQ(c.run.params.alpha, 0.75);
    EXPECT_EQ(c.run.right_boundary, RightBoundary::Extrapolation);
    EXPECT_TRUE(c.run.track_x);
    EXPECT_EQ(c.run.ic.helix_a, 0.4);
    EXPECT_EQ(c.output.dir, "results");
    const std::string echo = echo_config(c);
    EXPECT_EQ(echo_config(parse_config(echo, false)), echo);
}

TEST(Config, RejectsInvalidInput) {
    auto message = [](const std::string& text) {
        try {
            parse_config(text, false);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("[grid]\nsize = 10\n").find("grid.size"), std::string::npos);
    EXPECT_NE(message("[solver]\nn = 10\n").find("[solver]"), std::string::npos);
    EXPECT_NE(message("[params]\nalpha = 0\n").find("params.alpha must be a non-zero"), std::string::npos);
    EXPECT_NE(message("[params]\ndelta = -1e-3\n").find("params.delta must be >= 0"), std::string::npos);
    EXPECT_NE(message("[grid]\nn = 15\n").find("grid.n must be >= 16"), std::string::npos);
    EXPECT_NE(message("[grid]\nn = 12.5\n").find("grid.n"), std::string::npos);
    EXPECT_NE(message("[run]\ntrack_x = maybe\n").find("run.track_x"), std::string::npos);
    EXPECT_NE(message("[params]\nalpha = fast\n").find("params.alpha"), std::string::npos);
    EXPECT_THROW(parse_config("/nonexistent/vfe.ini", true), IoError);
}

TEST(InitialConditions, Families) {
    const GridSpec g = GridSpec::half_line(512, 40.0);
    for (double alpha : {-1.0, 1.0}) {
        SimParams p;
        p.alpha = alpha;
        IcSpec ic;
        ic.family = "e3";
        EXPECT_EQ(sup_norm_unit_drift(load_initial_condition(ic, g, p)), 0.0);
        for (const char* fam : {"compatible-bump", "helix-cap", "corner", "onset"}) {
            ic.family = fam;
            const Field3 v = load_initial_condition(ic, g, p);
            EXPECT_LE(sup_norm_unit_drift(v), 1e-15) << fam;
            EXPECT_EQ(max_abs(v.back() - e3), 0.0) << fam;
        }
        ic.family = "compatible-bump";
        const Field3 v = load_initial_condition(ic, g, p);
        EXPECT_TRUE(check_compatibility(v, p, g, 0, 1e-12).passed()) << "alpha=" << alpha;
    }
    IcSpec bad;
    bad.family = "spiral";
    EXPECT_THROW(load_initial_condition(bad, g, SimParams{}), ValidationError);
}

TEST(InitialConditions, FileRoundTrip) {
    TempDir dir;
    const GridSpec g = GridSpec::half_line(128, 20.0);
    Snapshot s{g, {}, 0.0, vfe::testing::bump_field(g), {}};
    write_snapshot(dir / "v.snap", s);
    IcSpec ic;
    ic.family = "file";
    ic.file = dir / "v.snap";
    EXPECT_TRUE(bitwise_equal(load_initial_condition(ic, g, SimParams{}), s.v));
    EXPECT_THROW(load_initial_condition(ic, GridSpec::half_line(129, 20.0), SimParams{}), ValidationError);

    // Far field must be flat for the clamp.
    s.v.back() = normalized(std::vector<Vec3>{Vec3{0.1, 0.0, 1.0}})[0];
    write_snapshot(dir / "tilted.snap", s);
    ic.file = dir / "tilted.snap";
    EXPECT_THROW(load_initial_condition(ic, g, SimParams{}), ValidationError);
    EXPECT_NO_THROW(load_initial_condition(ic, g, SimParams{}, false));

    ic.file = dir / "missing.snap";
    EXPECT_THROW(load_initial_condition(ic, g, SimParams{}), IoError);
}

TEST(Cli, RunConstantDatum) {
    TempDir dir;
    const auto r = cli({"run", "--ic", "e3", "--grid-n", "64", "--length", "8", "--t-final", "0.01", "--out",
                        dir / "out", "--diagnostics-every", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(slurp(dir / "out/diagnostics.csv"));
    const auto recs = read_diagnostics_csv(is);
    ASSERT_GE(recs.size(), 2u);
    for (const auto& rec : recs) {
        DiagnosticsRecord zero = rec;
        zero.t = 0.0;
        for (auto& [k, v] : zero.boundary_residuals) v = 0.0;
        for (auto& [k, v] : zero.identity_residuals) v = 0.0;
        zero.unit_norm_drift = zero.norm_vs = zero.norm_vss = zero.norm_vsss = zero.energy_E2 = zero.modified_E3 = 0.0;
        DiagnosticsRecord got = rec;
        got.t = 0.0;
        EXPECT_TRUE(got == zero);
    }
    const Snapshot snap = read_snapshot(dir / "out/final.snap");
    EXPECT_TRUE(bitwise_equal(snap.v, constant_field(64, e3)));
    EXPECT_NEAR(snap.t, 0.01, 1e-15);
}

TEST(Cli, CheckCompatReportsFailureAndSucceeds) {
    TempDir dir;
    const GridSpec g = GridSpec::half_line(256, 20.0);
    const Field3 v = normalized(vfe::testing::sample(g, [](double s) {
        return e3 + Vec3{0.05 * s * cutoff(s, 2.0), 0.0, 0.0};
    }));
    write_snapshot(dir / "tilted.snap", {g, {}, 0.0, v, {}});
    const auto r = cli({"check-compat", "--alpha", "1", "--grid-n", "256", "--length", "20", "--ic",
                        "file:" + (dir / "tilted.snap"), "--order", "0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("order 0  FAIL"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("not compatible"), std::string::npos) << r.out;

    const auto ok = cli({"check-compat", "--alpha", "1", "--ic", "compatible-bump", "--order", "0"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(ok.out.find("order 0  pass"), std::string::npos) << ok.out;
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    auto expect = [&](std::vector<std::string> args, int code, const std::string& needle) {
        args.push_back("--out");
        args.push_back(dir / "x");
        const auto r = cli(args);
        EXPECT_EQ(r.code, code) << r.out << r.err;
        EXPECT_NE(r.err.find(needle), std::string::npos) << r.err;
    };
    expect({"run", "--alpha", "0"}, 2, "params.alpha must be a non-zero");
    expect({"run", "--delta", "-1"}, 2, "params.delta must be >= 0");
    expect({"run", "--grid-n", "8"}, 2, "grid.n must be >= 16");
    expect({"run", "--ic", "spiral"}, 2, "spiral");
    expect({"run", "--config", "/nonexistent/vfe.ini"}, 2, "cannot open config");
    expect({"run", "--bogus"}, 2, "bogus");
    expect({"frobnicate"}, 2, "subcommand");
    // An unresolved onset datum on a short domain reaches the clamp.
    expect({"run", "--alpha", "1", "--ic", "onset", "--grid-n", "256", "--length", "20", "--t-final", "0.1"}, 3,
           "far-field");
    expect({"run", "--ic", "compatible-bump", "--grid-n", "128", "--dt", "0.5", "--t-final", "5"}, 3,
           "numerical failure");
}

TEST(Cli, ConfigFileAndFlagOverride) {
    TempDir dir;
    {
        std::ofstream os(dir / "cfg.ini");
        os << "[grid]\nn = 64\nlength = 8\n[run]\nt_final = 0.01\n[ic]\nfamily = e3\n[output]\ndiagnostics = d.csv\n";
    }
    const auto r = cli({"run", "--config", dir / "cfg.ini", "--t-final", "0.02", "--out", dir / "o"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "o/d.csv"));
    EXPECT_NEAR(read_snapshot(dir / "o/final.snap").t, 0.02, 1e-15);
}

TEST(Cli, CorrectDatumWritesUnitSnapshot) {
    TempDir dir;
    const auto r = cli({"correct-datum", "--delta", "1e-3", "--grid-n", "256", "--ic", "compatible-bump", "--order",
                        "1", "--out", dir / "c"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Snapshot s = read_snapshot(dir / "c/final.snap");
    EXPECT_EQ(s.v.size(), 256u);
    EXPECT_LE(sup_norm_unit_drift(s.v), 1e-12);
    EXPECT_NE(r.out.find("order 1 residual"), std::string::npos);
}

TEST(Cli, ContinuationTableIsMonotone) {
    const auto r = cli({"continuation", "--grid-n", "256", "--t-final", "0.01", "--ic", "compatible-bump"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "delta_i,delta_i+1,h1_diff");
    std::vector<double> diffs;
    while (std::getline(is, line) && line.rfind("observed_rate", 0) != 0)
        diffs.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    ASSERT_EQ(diffs.size(), 2u);
    EXPECT_LT(diffs[1], diffs[0]);
    EXPECT_EQ(line.rfind("observed_rate", 0), 0u);
}

TEST(Cli, ConvergenceAndHirotaTables) {
    const auto conv = cli({"convergence", "--grid-n", "128", "--t-final", "0.005", "--levels", "2"});
    ASSERT_EQ(conv.code, 0) << conv.err;
    EXPECT_EQ(count_lines(conv.out), 3u);
    const auto hir = cli({"hirota-check", "--t-final", "0.02", "--levels", "2"});
    ASSERT_EQ(hir.code, 0) << hir.err;
    EXPECT_EQ(hir.out.rfind("plane_wave_residual", 0), 0u);
    EXPECT_EQ(count_lines(hir.out), 4u);
}
