#include <doctest.h>

#include "motorfault/dataset.hpp"
#include "motorfault/neuralnet.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

using namespace motorfault;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(MOTORFAULT_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char chunk[4096];
    std::size_t n;
    while ((n = std::fread(chunk, 1, sizeof chunk, pipe)) > 0)
        result.output.append(chunk, n);
    int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() /
               ("motorfault-cli-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

std::string temp(const std::string& name) { return (temp_dir() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// Tiny deterministic dataset + model used by most subcommand tests.
std::string shared_dataset() {
    static std::string path = [] {
        std::string p = temp("shared.csv");
        auto r = run("gen --counts 3,3,3,3,3,3,3 --noise 0 --seed 9 --out " + p);
        REQUIRE(r.exit_code == 0);
        return p;
    }();
    return path;
}

std::string shared_model() {
    static std::string path = [] {
        std::string p = temp("shared.model");
        auto r = run("train --train " + shared_dataset() + " --model " + p +
                     " --seed 1 --hidden 6 --epochs 400 --target-loss 0.02");
        REQUIRE(r.exit_code == 0);
        return p;
    }();
    return path;
}

}  // namespace

TEST_CASE("table1 prints the reference fixture byte for byte") {
    auto r = run("table1");
    CHECK(r.exit_code == 0);
    CHECK(r.output == slurp(MOTORFAULT_GOLDEN_TABLE1));

    std::string out = temp("table1.csv");
    auto w = run("table1 --out " + out);
    CHECK(w.exit_code == 0);
    CHECK(slurp(out) == slurp(MOTORFAULT_GOLDEN_TABLE1));
}

TEST_CASE("help is exit 0 and bad usage is exit 2") {
    auto help = run("--help");
    CHECK(help.exit_code == 0);
    for (const char* name : {"gen", "train", "eval", "classify", "serve", "replay"})
        CHECK(contains(help.output, name));

    CHECK(run("").exit_code == 2);             // a subcommand is required
    CHECK(run("--bogus").exit_code == 2);      // unknown flag
    CHECK(run("frobnicate").exit_code == 2);   // unknown subcommand
    CHECK(run("train --train x.csv").exit_code == 2);  // missing --model
}

TEST_CASE("gen --counts is deterministic and loadable") {
    std::string a = temp("gen-a.csv");
    std::string b = temp("gen-b.csv");
    auto ra = run("gen --counts 2,3,4,0,1,2,5 --seed 11 --out " + a);
    auto rb = run("gen --counts 2,3,4,0,1,2,5 --seed 11 --out " + b);
    CHECK(ra.exit_code == 0);
    CHECK(rb.exit_code == 0);
    CHECK(contains(ra.output, "wrote 17 samples"));
    CHECK(slurp(a) == slurp(b));

    Dataset data = load_csv(a);
    CHECK(data.size() == 17);

    std::string c = temp("gen-c.csv");
    auto rc = run("gen --counts 2,3,4,0,1,2,5 --seed 12 --out " + c);
    CHECK(rc.exit_code == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("gen mode flags are mutually exclusive and complete") {
    CHECK(run("gen").exit_code == 2);
    CHECK(run("gen --paper-scale --counts 1,1,1,1,1,1,1 --out x.csv --train t --test u")
              .exit_code == 2);
    CHECK(run("gen --counts 1,1,1,1,1,1,1").exit_code == 2);  // missing --out
    CHECK(run("gen --paper-scale --train " + temp("only-train.csv")).exit_code == 2);
    CHECK(run("gen --counts 1,2,3 --out x.csv").exit_code == 2);  // needs 7 counts
    CHECK(run("gen --counts 1,1,1,1,1,1,x --out x.csv").exit_code == 2);
}

TEST_CASE("gen --paper-scale writes both splits") {
    std::string train = temp("ps-train.csv");
    std::string test = temp("ps-test.csv");
    auto r = run("gen --paper-scale --seed 1 --train " + train + " --test " + test);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "wrote 800 train samples"));
    CHECK(contains(r.output, "wrote 66 test samples"));
    CHECK(load_csv(train).size() == 800);
    CHECK(load_csv(test).size() == 66);
}

TEST_CASE("train reports progress and writes model plus history") {
    std::string model = temp("train-out.model");
    std::string history = temp("train-out.history.csv");
    auto r = run("train --train " + shared_dataset() + " --model " + model +
                 " --seed 2 --hidden 6 --epochs 50 --target-loss 1e-9 --history " +
                 history);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "trained on 21 samples in 50 epochs"));
    CHECK(contains(r.output, "model written to " + model));

    Network net = load_model_file(model);
    CHECK(net.config.hidden_layers == std::vector<int>{6});
    CHECK(net.config.seed == 2);

    std::string text = slurp(history);
    CHECK(text.substr(0, 11) == "epoch,loss\n");
    CHECK(contains(text, "\n50,"));
}

TEST_CASE("training twice with the same flags gives identical model bytes") {
    std::string a = temp("repeat-a.model");
    std::string b = temp("repeat-b.model");
    std::string flags = " --seed 5 --hidden 4 --epochs 30 --target-loss 1e-9";
    CHECK(run("train --train " + shared_dataset() + " --model " + a + flags).exit_code == 0);
    CHECK(run("train --train " + shared_dataset() + " --model " + b + flags).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("eval prints the frequency report, accuracy, and r") {
    std::string matrix = temp("eval.matrix.csv");
    std::string points = temp("eval.points.csv");
    auto r = run("eval --test " + shared_dataset() + " --model " + shared_model() +
                 " --matrix " + matrix + " --points " + points);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "Fault"));
    CHECK(contains(r.output, "Frequency of classification"));
    CHECK(contains(r.output, "Total"));
    CHECK(contains(r.output, "\naccuracy "));
    CHECK(contains(r.output, "\nr "));

    // accuracy parses and lands in [0, 1]
    auto pos = r.output.find("\naccuracy ");
    double accuracy = std::stod(r.output.substr(pos + 10));
    CHECK(accuracy >= 0.0);
    CHECK(accuracy <= 1.0);

    std::string matrix_text = slurp(matrix);
    int rows = 0;
    for (char c : matrix_text) rows += c == '\n';
    CHECK(rows == 7);
    CHECK(slurp(points).substr(0, 14) == "target,output\n");
}

TEST_CASE("classify names a class for explicit values") {
    auto r = run("classify --model " + shared_model() +
                 " --values 2.660672,2.623876,2.699036,0.919711,0.921298,0.923076");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "("));
    CHECK(contains(r.output, "activations"));
    CHECK(contains(r.output, "margin "));

    auto from_csv = run("classify --model " + shared_model() + " --csv " +
                        shared_dataset() + " --row 1");
    CHECK(from_csv.exit_code == 0);
    CHECK(contains(from_csv.output, "activations"));
}

TEST_CASE("classify argument errors exit with usage code") {
    CHECK(run("classify --model " + shared_model()).exit_code == 2);
    CHECK(run("classify --model " + shared_model() + " --values 1,2,3").exit_code == 2);
    CHECK(run("classify --model " + shared_model() + " --values 1,2,3,4,5,x").exit_code == 2);
    CHECK(run("classify --model " + shared_model() +
              " --values 1,2,3,4,5,6 --csv " + shared_dataset())
              .exit_code == 2);
    CHECK(run("classify --model " + shared_model() + " --csv " + shared_dataset() +
              " --row 0")
              .exit_code == 2);
}

TEST_CASE("missing files exit 3 and corrupt inputs exit 4") {
    CHECK(run("train --train /nonexistent/never.csv --model " + temp("x.model"))
              .exit_code == 3);
    CHECK(run("eval --test " + shared_dataset() + " --model /nonexistent/never.model")
              .exit_code == 3);

    std::string junk_model = temp("junk.model");
    std::ofstream(junk_model) << "not a model\n";
    CHECK(run("eval --test " + shared_dataset() + " --model " + junk_model).exit_code == 4);

    std::string junk_csv = temp("junk.csv");
    std::ofstream(junk_csv) << kCsvHeader << "\n9,1,2,3,4,5,6\n";
    CHECK(run("train --train " + junk_csv + " --model " + temp("y.model")).exit_code == 4);
}

TEST_CASE("config validation failures exit 2") {
    std::string model = temp("never.model");
    std::string base = "train --train " + shared_dataset() + " --model " + model;
    CHECK(run(base + " --hidden 4,x").exit_code == 2);
    CHECK(run(base + " --hidden 0").exit_code == 2);
    CHECK(run(base + " --lr 0").exit_code == 2);
    CHECK(run(base + " --epochs 0").exit_code == 2);
    CHECK(run("eval --test " + shared_dataset() + " --model " + shared_model() +
              " --rule threshold --threshold 1.5")
              .exit_code == 2);
}

TEST_CASE("serve and replay talk over a live socket") {
    std::string model = shared_model();
    std::string serve_out = temp("serve-out.txt");
    std::string pid_file = temp("serve.pid");
    std::string event_log = temp("serve-events.log");
    int port = 20000 + static_cast<int>(::getpid() % 20000);

    std::string launch = std::string(MOTORFAULT_CLI_PATH) + " serve --model " + model +
                         " --port " + std::to_string(port) + " --log " + event_log +
                         " > " + serve_out + " 2>&1 & echo $! > " + pid_file;
    REQUIRE(std::system(launch.c_str()) == 0);

    // Wait for the listener to come up.
    bool listening = false;
    for (int i = 0; i < 100 && !listening; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        std::ifstream in(serve_out);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        listening = contains(text, "listening on 127.0.0.1:" + std::to_string(port));
    }
    std::string pid = slurp(pid_file);
    while (!pid.empty() && pid.back() == '\n') pid.pop_back();
    REQUIRE(listening);

    auto replay = run("replay " + shared_dataset() + " --port " + std::to_string(port) +
                      " --rate 2000 --quiet");
    CHECK(replay.exit_code == 0);
    CHECK(contains(replay.output, "sent 21 frames, 21 ok, 0 errors"));

    REQUIRE(std::system(("kill -TERM " + pid).c_str()) == 0);
    bool stopped = false;
    for (int i = 0; i < 100 && !stopped; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        std::ifstream in(serve_out);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        stopped = contains(text, "stopped, ");
    }
    CHECK(stopped);
    // Best-effort reap in case the graceful stop above did not finish.
    int rc = std::system(("kill -KILL " + pid + " 2>/dev/null").c_str());
    (void)rc;
}

TEST_CASE("replay against a dead port exits with the protocol code") {
    auto r = run("replay " + shared_dataset() + " --port 1 --rate 100");
    CHECK(r.exit_code == 3);  // connection refused is an I/O failure
}
