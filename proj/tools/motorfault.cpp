// motorfault: train, evaluate, and serve a fault classifier for three-phase
// induction motors.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 parse, 5 divergence, 6 protocol.

#include <CLI11.hpp>

#include "motorfault/dataset.hpp"
#include "motorfault/errors.hpp"
#include "motorfault/evaluation.hpp"
#include "motorfault/faultgen.hpp"
#include "motorfault/neuralnet.hpp"
#include "motorfault/stream.hpp"
#include "motorfault/text.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace mf = motorfault;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitDivergence = 5;
constexpr int kExitProtocol = 6;

std::vector<int> parse_hidden(const std::string& text) {
    std::vector<int> widths;
    for (std::string_view part : mf::split(text, ',')) {
        std::int64_t value;
        if (!mf::try_parse_int(part, value) || value < 1)
            throw mf::UsageError("bad hidden width '" + std::string(part) + "'");
        widths.push_back(static_cast<int>(value));
    }
    if (widths.empty()) throw mf::UsageError("--hidden needs at least one width");
    return widths;
}

std::array<std::int64_t, mf::kNumClasses> parse_counts(const std::string& text) {
    auto parts = mf::split(text, ',');
    if (parts.size() != mf::kNumClasses)
        throw mf::UsageError("--counts needs exactly 7 comma-separated values");
    std::array<std::int64_t, mf::kNumClasses> counts{};
    for (int i = 0; i < mf::kNumClasses; ++i) {
        if (!mf::try_parse_int(parts[i], counts[i]) || counts[i] < 0)
            throw mf::UsageError("bad count '" + std::string(parts[i]) + "'");
    }
    return counts;
}

mf::DecisionRule make_rule(const std::string& mode, double threshold) {
    mf::DecisionRule rule;
    rule.mode = mode == "threshold" ? mf::DecisionMode::Threshold
                                    : mf::DecisionMode::Argmax;
    rule.threshold = threshold;
    mf::validate(rule);
    return rule;
}

mf::PhaseSample parse_values(const std::string& text) {
    auto parts = mf::split(text, ',');
    if (parts.size() != 6)
        throw mf::UsageError("--values needs exactly 6 comma-separated numbers");
    double v[6];
    for (int i = 0; i < 6; ++i)
        if (!mf::try_parse_double(parts[i], v[i]))
            throw mf::UsageError("bad value '" + std::string(parts[i]) + "'");
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

void write_history_csv(const std::string& path, const mf::TrainReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mf::IoError("cannot write '" + path + "'");
    out << "epoch,loss\n";
    for (std::size_t i = 0; i < report.loss_history.size(); ++i)
        out << i + 1 << ',' << mf::format_double(report.loss_history[i]) << '\n';
    if (!out.flush()) throw mf::IoError("write failed for '" + path + "'");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mf::IoError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw mf::IoError("write failed for '" + path + "'");
}

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct GenArgs {
    std::uint64_t seed = 0;
    bool paper_scale = false;
    std::string train_path, test_path, out_path, counts;
    double noise = 0.01;
};

void run_gen(const GenArgs& args) {
    if (args.paper_scale != args.counts.empty())
        throw mf::UsageError("choose exactly one of --paper-scale or --counts");
    if (args.paper_scale) {
        if (args.train_path.empty() || args.test_path.empty())
            throw mf::UsageError("--paper-scale needs --train and --test output paths");
        auto [train, test] = mf::generate_paper_scale(args.seed, args.noise);
        mf::save_csv(args.train_path, train);
        mf::save_csv(args.test_path, test);
        std::cout << "wrote " << train.size() << " train samples to " << args.train_path
                  << '\n'
                  << "wrote " << test.size() << " test samples to " << args.test_path
                  << '\n';
        return;
    }
    if (args.out_path.empty()) throw mf::UsageError("--counts needs --out");
    mf::GeneratorSpec spec;
    spec.signatures = mf::default_signatures(args.noise);
    spec.counts = parse_counts(args.counts);
    spec.seed = args.seed;
    mf::Dataset data = mf::generate(spec);
    mf::save_csv(args.out_path, data);
    std::cout << "wrote " << data.size() << " samples to " << args.out_path << '\n';
}

struct TrainArgs {
    std::string train_path, model_path, history_path, hidden = "10";
    std::uint64_t seed = 0;
    double lr = 0.1, target_loss = 1e-3;
    int epochs = 2000;
    bool no_shuffle = false;
};

void run_train(const TrainArgs& args) {
    mf::Dataset data = mf::load_csv(args.train_path);
    mf::NetworkConfig config;
    config.hidden_layers = parse_hidden(args.hidden);
    config.learning_rate = args.lr;
    config.max_epochs = args.epochs;
    config.target_loss = args.target_loss;
    config.seed = args.seed;
    config.shuffle_each_epoch = !args.no_shuffle;
    auto [net, report] = mf::train(config, data);
    mf::save_model_file(args.model_path, net);
    std::string history = args.history_path.empty() ? args.model_path + ".history.csv"
                                                    : args.history_path;
    write_history_csv(history, report);
    std::cout << "trained on " << data.size() << " samples in " << report.epochs_run
              << " epochs, final loss " << mf::format_double(report.final_loss)
              << (report.stopped_early ? " (reached target)" : "") << '\n'
              << "model written to " << args.model_path << '\n'
              << "loss history written to " << history << '\n';
}

struct EvalArgs {
    std::string test_path, model_path, rule = "argmax";
    std::string matrix_path, points_path, report_path;
    double threshold = 0.5;
};

void run_eval(const EvalArgs& args) {
    mf::Network net = mf::load_model_file(args.model_path);
    mf::Dataset data = mf::load_csv(args.test_path);
    mf::DecisionRule rule = make_rule(args.rule, args.threshold);
    mf::EvalResult result = mf::evaluate(net, data, rule);
    mf::FrequencyReport report = mf::frequency_report(result.matrix);
    mf::RegressionFit fit = mf::regression_fit(net, data);

    std::cout << mf::render_frequency_report(report);
    std::cout << "accuracy " << mf::format_double(result.accuracy) << '\n';
    std::cout << "r " << mf::format_double(fit.r) << '\n';

    if (!args.matrix_path.empty()) {
        std::ostringstream out;
        mf::write_confusion_csv(out, result.matrix);
        write_text_file(args.matrix_path, out.str());
    }
    if (!args.points_path.empty()) {
        std::ostringstream out;
        mf::write_points_csv(out, fit);
        write_text_file(args.points_path, out.str());
    }
    if (!args.report_path.empty())
        write_text_file(args.report_path, mf::render_frequency_report(report));
}

struct ClassifyArgs {
    std::string model_path, values, csv_path, rule = "argmax";
    double threshold = 0.5;
    int row = 1;
};

void run_classify(const ClassifyArgs& args) {
    if (args.values.empty() == args.csv_path.empty())
        throw mf::UsageError("choose exactly one of --values or --csv");
    mf::Network net = mf::load_model_file(args.model_path);
    mf::PhaseSample sample;
    if (!args.values.empty()) {
        sample = parse_values(args.values);
    } else {
        mf::Dataset data = mf::load_csv(args.csv_path);
        if (args.row < 1 || static_cast<std::size_t>(args.row) > data.size())
            throw mf::UsageError("--row out of range, file has " +
                                 std::to_string(data.size()) + " data rows");
        sample = data.samples[static_cast<std::size_t>(args.row) - 1].sample;
    }
    mf::DecisionRule rule = make_rule(args.rule, args.threshold);
    mf::ClassificationResult result = mf::classify(net, sample, rule);
    if (result.predicted)
        std::cout << mf::class_display_name(*result.predicted) << " ("
                  << mf::class_code(*result.predicted) << ")\n";
    else
        std::cout << "Rejected\n";
    std::cout << "activations";
    for (Eigen::Index i = 0; i < result.outputs.size(); ++i)
        std::cout << ' ' << mf::format_double(result.outputs[i]);
    std::cout << '\n' << "margin " << mf::format_double(result.margin) << '\n';
}

struct ServeArgs {
    std::string model_path, host = "127.0.0.1", log_path = "events.log";
    std::string rule = "argmax";
    double threshold = 0.5;
    int port = 7707, debounce = 3, max_connections = 8;
};

void run_serve(const ServeArgs& args) {
    mf::Network net = mf::load_model_file(args.model_path);
    mf::StreamConfig config;
    config.host = args.host;
    config.port = args.port;
    config.debounce_frames = args.debounce;
    config.rule = make_rule(args.rule, args.threshold);
    config.max_connections = args.max_connections;
    config.event_log_path = args.log_path;
    mf::StreamServer server(std::move(net), config, &std::cout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.start();
    std::cout << "listening on " << args.host << ":" << server.port() << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    std::cout << "stopped, " << server.events().size() << " events logged to "
              << args.log_path << std::endl;
}

struct ReplayArgs {
    std::string file, host = "127.0.0.1";
    int port = 7707;
    double rate = 10.0;
    bool quiet = false;
};

int run_replay(const ReplayArgs& args) {
    mf::ReplayStats stats = mf::replay_file(args.file, args.host, args.port, args.rate);
    if (!args.quiet)
        for (const std::string& response : stats.responses) std::cout << response << '\n';
    std::cout << "sent " << stats.frames_sent << " frames, " << stats.ok << " ok, "
              << stats.errors << " errors\n";
    return stats.errors == 0 ? kExitOk : kExitProtocol;
}

void run_table1(const std::string& out_path) {
    if (out_path.empty())
        std::cout << mf::kTable1Csv;
    else
        write_text_file(out_path, std::string(mf::kTable1Csv));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Fault-detection toolkit for three-phase induction motors: synthetic data,\n"
        "a from-scratch sigmoid MLP, evaluation reports, and a streaming classifier.\n"
        "Exit codes: 0 success, 2 usage, 3 I/O, 4 parse, 5 divergence, 6 protocol."};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate labeled synthetic datasets");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_flag("--paper-scale", gen.paper_scale,
                      "800 train / 66 test benchmark layout");
    gen_cmd->add_option("--train", gen.train_path, "Output path for the train CSV");
    gen_cmd->add_option("--test", gen.test_path, "Output path for the test CSV");
    gen_cmd->add_option("--counts", gen.counts, "Per-class counts C1,...,C7");
    gen_cmd->add_option("--out", gen.out_path, "Output path for --counts mode");
    gen_cmd->add_option("--noise", gen.noise, "Relative noise level (default 0.01)");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a classifier on a CSV");
    train_cmd->add_option("--train", train.train_path, "Training CSV")->required();
    train_cmd->add_option("--model", train.model_path, "Output model path")->required();
    train_cmd->add_option("--seed", train.seed, "Init and shuffle seed");
    train_cmd->add_option("--hidden", train.hidden, "Hidden widths, e.g. 10 or 12,8");
    train_cmd->add_option("--lr", train.lr, "Learning rate (default 0.1)");
    train_cmd->add_option("--epochs", train.epochs, "Epoch cap (default 2000)");
    train_cmd->add_option("--target-loss", train.target_loss,
                          "Early-stop mean loss (default 0.001)");
    train_cmd->add_flag("--no-shuffle", train.no_shuffle, "Keep sample order each epoch");
    train_cmd->add_option("--history", train.history_path,
                          "Loss history CSV (default <model>.history.csv)");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a CSV");
    eval_cmd->add_option("--test", eval.test_path, "Evaluation CSV")->required();
    eval_cmd->add_option("--model", eval.model_path, "Model path")->required();
    eval_cmd->add_option("--rule", eval.rule, "Decision rule")
        ->check(CLI::IsMember({"argmax", "threshold"}));
    eval_cmd->add_option("--threshold", eval.threshold, "Threshold for --rule threshold");
    eval_cmd->add_option("--matrix", eval.matrix_path, "Confusion matrix CSV output");
    eval_cmd->add_option("--points", eval.points_path, "Regression points CSV output");
    eval_cmd->add_option("--report", eval.report_path, "Frequency report text output");

    ClassifyArgs classify;
    auto* classify_cmd = app.add_subcommand("classify", "Classify one sample");
    classify_cmd->add_option("--model", classify.model_path, "Model path")->required();
    classify_cmd->add_option("--values", classify.values, "v1,v2,v3,i1,i2,i3");
    classify_cmd->add_option("--csv", classify.csv_path, "Take the sample from a CSV");
    classify_cmd->add_option("--row", classify.row, "1-based data row of --csv");
    classify_cmd->add_option("--rule", classify.rule, "Decision rule")
        ->check(CLI::IsMember({"argmax", "threshold"}));
    classify_cmd->add_option("--threshold", classify.threshold,
                             "Threshold for --rule threshold");

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the streaming classifier");
    serve_cmd->add_option("--model", serve.model_path, "Model path")->required();
    serve_cmd->add_option("--host", serve.host, "Bind address (default 127.0.0.1)");
    serve_cmd->add_option("--port", serve.port, "Port, 0 for ephemeral (default 7707)");
    serve_cmd->add_option("--debounce", serve.debounce,
                          "Consecutive fault frames before an event (default 3)");
    serve_cmd->add_option("--rule", serve.rule, "Decision rule")
        ->check(CLI::IsMember({"argmax", "threshold"}));
    serve_cmd->add_option("--threshold", serve.threshold, "Threshold for --rule threshold");
    serve_cmd->add_option("--log", serve.log_path, "Event log path (default events.log)");
    serve_cmd->add_option("--max-connections", serve.max_connections,
                          "Concurrent client cap (default 8)");

    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a file against a server");
    replay_cmd->add_option("file", replay.file, "Dataset CSV or raw frame log")
        ->required();
    replay_cmd->add_option("--host", replay.host, "Server address (default 127.0.0.1)");
    replay_cmd->add_option("--port", replay.port, "Server port (default 7707)");
    replay_cmd->add_option("--rate", replay.rate, "Frames per second (default 10)");
    replay_cmd->add_flag("--quiet", replay.quiet, "Suppress per-frame responses");

    std::string table1_out;
    auto* table1_cmd =
        app.add_subcommand("table1", "Print the embedded 14-row reference dataset");
    table1_cmd->add_option("--out", table1_out, "Write to a file instead of stdout");

    int replay_status = kExitOk;
    gen_cmd->callback([&] { run_gen(gen); });
    train_cmd->callback([&] { run_train(train); });
    eval_cmd->callback([&] { run_eval(eval); });
    classify_cmd->callback([&] { run_classify(classify); });
    serve_cmd->callback([&] { run_serve(serve); });
    replay_cmd->callback([&] { replay_status = run_replay(replay); });
    table1_cmd->callback([&] { run_table1(table1_out); });

    try {
        app.parse(argc, argv);
        return replay_status;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const mf::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mf::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mf::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const mf::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const mf::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const mf::ProtocolError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitProtocol;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
