#include "oneclock/cli.hpp"

#include "oneclock/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace oneclock;
namespace fs = std::filesystem;

namespace {

struct CoutCapture {
    std::stringstream stream;
    std::streambuf* saved;
    CoutCapture() : saved(std::cout.rdbuf(stream.rdbuf())) {}
    ~CoutCapture() { std::cout.rdbuf(saved); }
    std::string text() const { return stream.str(); }
};

struct CerrCapture {
    std::stringstream stream;
    std::streambuf* saved;
    CerrCapture() : saved(std::cerr.rdbuf(stream.rdbuf())) {}
    ~CerrCapture() { std::cerr.rdbuf(saved); }
};

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "oneclock-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

void write_quick_manifest(const fs::path& path, const std::string& id,
                          const std::string& split) {
    std::ofstream out(path);
    out << "experiment.id = " << id << "\n"
        << "experiment.split = " << split << "\n"
        << "task.kind = quadratic\n"
        << "task.dim = 6\n"
        << "task.data_seed = 4\n"
        << "task.train_samples = 16\n"
        << "task.val_samples = 16\n"
        << "task.batch_size = 4\n"
        << "schedule.lr_max = 0.05\n"
        << "schedule.lr_min = 0.005\n"
        << "schedule.warmup_steps = 10\n"
        << "run.total_steps = 300\n"
        << "run.eval_every = 20\n"
        << "run.seeds = 1,2,3\n";
}

long count_lines(const std::string& text) {
    long lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

} // namespace

TEST_CASE("cli grid prints 13 labeled rows with exact values") {
    CoutCapture capture;
    CHECK(run_cli({"grid"}) == 0);
    const std::string out = capture.text();
    CHECK(count_lines(out) == 14);  // header + 13 rows
    CHECK(out.find("0.944") != std::string::npos);
    CHECK(out.find("0.9437658674809") != std::string::npos);
    CHECK(out.find("\n0  0.000  0\n") != std::string::npos);
}

TEST_CASE("cli select prints the selection and interval") {
    {
        CoutCapture capture;
        CHECK(run_cli({"select", "--t-es", "10000", "--r0", "1000"}) == 0);
        const std::string out = capture.text();
        CHECK(out.find("selected beta = 0.900") != std::string::npos);
        CHECK(out.find("[7199, 12802]") != std::string::npos);
    }
    {
        CoutCapture capture;
        CHECK(run_cli({"select", "--t-es", "6000"}) == 0);
        const std::string out = capture.text();
        CHECK(out.find("selected beta = 0.822") != std::string::npos);
        CHECK(out.find("[4048, 7199]") != std::string::npos);
    }
    {
        CoutCapture capture;
        CHECK(run_cli({"select", "--t-es", "500", "--r0", "1000"}) == 0);
        const std::string out = capture.text();
        CHECK(out.find("selected beta = 0.000") != std::string::npos);
        CHECK(out.find("clamped") != std::string::npos);
    }
    {
        CoutCapture out_capture;
        CerrCapture err_capture;
        CHECK(run_cli({"select", "--t-es", "0"}) != 0);
        CHECK(run_cli({"select"}) != 0);  // missing required flag
        CHECK(run_cli({"nonsense"}) != 0);
    }
}

TEST_CASE("cli sweep writes run logs and a deterministic record") {
    const fs::path dir = scratch_dir("sweep");
    const fs::path manifest = dir / "quick.manifest";
    write_quick_manifest(manifest, "quick", "development");

    {
        CoutCapture capture;
        CHECK(run_cli({"--workspace", (dir / "ws1").string(), "sweep", "--manifest",
                       manifest.string(), "--refine-top-k", "0", "--extra-seeds",
                       "0"}) == 0);
    }
    long runlogs = 0;
    for (const auto& entry : fs::directory_iterator(dir / "ws1" / "quick"))
        if (entry.path().extension() == ".csv") ++runlogs;
    CHECK(runlogs == 13);
    CHECK(fs::exists(dir / "ws1" / "quick.record"));

    {
        CoutCapture capture;
        CHECK(run_cli({"--workspace", (dir / "ws2").string(), "sweep", "--manifest",
                       manifest.string()}) == 0);  // default refine 5 x 2
    }
    runlogs = 0;
    for (const auto& entry : fs::directory_iterator(dir / "ws2" / "quick"))
        if (entry.path().extension() == ".csv") ++runlogs;
    CHECK(runlogs == 23);

    {
        CoutCapture capture;
        CHECK(run_cli({"--workspace", (dir / "ws3").string(), "sweep", "--manifest",
                       manifest.string()}) == 0);
    }
    CHECK(slurp(dir / "ws2" / "quick.record") == slurp(dir / "ws3" / "quick.record"));

    {
        // custom grid override: three betas, three run logs
        CoutCapture capture;
        CHECK(run_cli({"--workspace", (dir / "ws4").string(), "sweep", "--manifest",
                       manifest.string(), "--betas", "0.0,0.9,0.99", "--refine-top-k",
                       "0", "--extra-seeds", "0"}) == 0);
        long runlogs4 = 0;
        for (const auto& entry : fs::directory_iterator(dir / "ws4" / "quick"))
            if (entry.path().extension() == ".csv") ++runlogs4;
        CHECK(runlogs4 == 3);
        const ExperimentRecord record = read_record(dir / "ws4" / "quick.record");
        CHECK(record.entries.size() == 3);
    }

    CoutCapture capture;
    CerrCapture errs;
    CHECK(run_cli({"sweep", "--manifest", (dir / "missing.manifest").string()}) != 0);
}

TEST_CASE("cli pipeline: sweep, analyze, calibrate, perturb, plot-data") {
    const fs::path dir = scratch_dir("pipeline");
    const fs::path dev_manifest = dir / "dev.manifest";
    const fs::path held_manifest = dir / "held.manifest";
    write_quick_manifest(dev_manifest, "dev-exp", "development");
    write_quick_manifest(held_manifest, "held-exp", "held_out");

    {
        CoutCapture capture;
        REQUIRE(run_cli({"--workspace", dir.string(), "sweep", "--manifest",
                         dev_manifest.string()}) == 0);
        REQUIRE(run_cli({"--workspace", dir.string(), "sweep", "--manifest",
                         held_manifest.string()}) == 0);
    }
    const std::string dev_record = (dir / "dev-exp.record").string();
    const std::string held_record = (dir / "held-exp.record").string();

    {
        CoutCapture capture;
        const fs::path csv = dir / "analyze.csv";
        // display-precision flag values snap onto the exact grid value
        CHECK(run_cli({"analyze", "--records", dev_record, held_record, "--r0", "300",
                       "--fixed-beta", "0.94377", "--csv", csv.string()}) == 0);
        CHECK(capture.text().find("refresh r0=300") != std::string::npos);
        CHECK(capture.text().find("fixed beta=0.944") != std::string::npos);
        const std::string text = slurp(csv);
        CHECK(text.find("method,dev_n") == 0);
        CHECK(count_lines(text) == 3);  // header + refresh + fixed rows
    }
    {
        // the selection command reads the horizon off a record
        CoutCapture capture;
        CHECK(run_cli({"select", "--record", dev_record, "--r0", "300"}) == 0);
        CHECK(capture.text().find("taken from record dev-exp") != std::string::npos);
        CHECK(capture.text().find("selected beta = ") != std::string::npos);
    }
    {
        CoutCapture capture;
        const fs::path csv = dir / "calibrate.csv";
        CHECK(run_cli({"calibrate", "--records", dev_record, held_record,
                       "--candidates", "200,300,400", "--csv", csv.string()}) == 0);
        CHECK(capture.text().find("selected r0 =") != std::string::npos);
        CHECK(count_lines(slurp(csv)) == 4);
    }
    {
        CoutCapture capture;
        const fs::path csv = dir / "perturb.csv";
        CHECK(run_cli({"--seed", "5", "perturb", "--records", dev_record, held_record,
                       "--sigmas", "0,0.1", "--draws", "5", "--r0", "300", "--csv",
                       csv.string()}) == 0);
        const std::string text = capture.text();
        CHECK(text.find("sigma=0.1") != std::string::npos);
        CHECK(text.find("splitmix64 keyed by (seed=5") != std::string::npos);
        CHECK(count_lines(slurp(csv)) == 4);  // header + fixed + 2 sigma rows
    }
    {
        CoutCapture capture;
        CHECK(run_cli({"plot-data", "--records", dev_record, held_record}) == 0);
        const std::string text = capture.text();
        CHECK(count_lines(text) == 1 + 2 * 13);
        CHECK(text.find("dev-exp,0.000,0,") != std::string::npos);
        CHECK(text.find("dev-exp,0.900,1,") != std::string::npos);
        CHECK(text.find("held-exp,0.999,") != std::string::npos);
    }
}

TEST_CASE("cli import-curves produces a record usable by select") {
    const fs::path dir = scratch_dir("import");
    const fs::path csv = dir / "external.csv";
    {
        std::ofstream out(csv);
        out << "beta,step,loss\n";
        for (double beta : {0.9, 0.944})
            for (long step = 0; step <= 2000; step += 100) {
                const double loss = step < 1200 ? 3.0 - 0.001 * static_cast<double>(step)
                                                : (beta == 0.9 ? 1.8 : 1.9);
                out << format_full(beta) << ',' << step << ',' << format_full(loss)
                    << "\n";
            }
    }
    CoutCapture capture;
    REQUIRE(run_cli({"--workspace", dir.string(), "import-curves", "--input",
                     csv.string(), "--experiment-id", "external", "--split",
                     "held_out"}) == 0);
    const ExperimentRecord record = read_record(dir / "external.record");
    CHECK(record.entries.size() == 2);
    CHECK(record.split == SplitTag::held_out);
    CHECK(record.t_es == 1000);

    // a record whose curves lack the final-step val entry is rejected
    const fs::path bad = dir / "bad.csv";
    {
        std::ofstream out(bad);
        out << "beta,step,loss\n0.9,0,2.0\n0.9,100,1.5\n0.944,0,2.0\n0.944,200,1.4\n";
    }
    CerrCapture errs;
    CHECK(run_cli({"--workspace", dir.string(), "import-curves", "--input",
                   bad.string(), "--experiment-id", "bad2"}) != 0);
}

TEST_CASE("cli plot-data u values match the display transform") {
    const fs::path dir = scratch_dir("plotdata");
    const fs::path manifest = dir / "m.manifest";
    write_quick_manifest(manifest, "pd", "development");
    CoutCapture capture;
    REQUIRE(run_cli({"--workspace", dir.string(), "sweep", "--manifest",
                     manifest.string(), "--refine-top-k", "0", "--extra-seeds",
                     "0"}) == 0);
    const fs::path csv = dir / "plot.csv";
    REQUIRE(run_cli({"plot-data", "--records", (dir / "pd.record").string(), "--csv",
                     csv.string()}) == 0);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "experiment_id,beta_label,u,mean_best_val_loss,seed_spread");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto first = line.find(',');
        const auto second = line.find(',', first + 1);
        const auto third = line.find(',', second + 1);
        const std::string label = line.substr(first + 1, second - first - 1);
        const double u = std::stod(line.substr(second + 1, third - second - 1));
        if (label == "0.000") CHECK(u == 0.0);
        if (label == "0.900") CHECK(u == doctest::Approx(1.0).epsilon(1e-12));
        if (label == "0.999") CHECK(u == doctest::Approx(3.0).epsilon(1e-12));
    }
    CHECK(rows == 13);
}
