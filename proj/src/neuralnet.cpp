#include "motorfault/neuralnet.hpp"

#include "motorfault/errors.hpp"
#include "motorfault/rng.hpp"
#include "motorfault/text.hpp"

#include <cfloat>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace motorfault {

void validate(const NetworkConfig& config) {
    if (config.input_dim < 1) throw UsageError("input_dim must be >= 1");
    if (config.output_dim < 1) throw UsageError("output_dim must be >= 1");
    if (config.hidden_layers.empty())
        throw UsageError("at least one hidden layer is required");
    for (int width : config.hidden_layers)
        if (width < 1) throw UsageError("hidden layer widths must be >= 1");
    if (!(config.learning_rate > 0)) throw UsageError("learning_rate must be > 0");
    if (config.max_epochs < 1) throw UsageError("max_epochs must be >= 1");
    if (!(config.target_loss >= 0)) throw UsageError("target_loss must be >= 0");
}

double sigmoid(double x) {
    // Two-branch form never exponentiates a positive argument, so it cannot
    // overflow; the clamp keeps saturated values strictly inside (0,1).
    double s;
    if (x >= 0) {
        s = 1.0 / (1.0 + std::exp(-x));
    } else {
        double e = std::exp(x);
        s = e / (1.0 + e);
    }
    constexpr double kHighest = 1.0 - 0x1.0p-53;
    if (s < DBL_MIN) s = DBL_MIN;
    if (s > kHighest) s = kHighest;
    return s;
}

namespace {

void check_layer_shapes(const Network& net, Eigen::Index input_size) {
    Eigen::Index width = input_size;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        if (layer.weights.cols() != width)
            throw DimensionError("layer " + std::to_string(l + 1) + ": expected input width " +
                                 std::to_string(layer.weights.cols()) + ", got " +
                                 std::to_string(width));
        if (layer.bias.size() != layer.weights.rows())
            throw DimensionError("layer " + std::to_string(l + 1) + ": bias length " +
                                 std::to_string(layer.bias.size()) + " does not match " +
                                 std::to_string(layer.weights.rows()) + " rows");
        width = layer.weights.rows();
    }
}

Vector activate(const Layer& layer, const Vector& input) {
    Vector z = layer.weights * input + layer.bias;
    return z.unaryExpr([](double x) { return sigmoid(x); });
}

// Gradients from a forward pass already taken; `inputs[l]` feeds layer l and
// `outputs[l]` is its activation.
Gradients gradients_from_pass(const Network& net, const Vector& input,
                              const std::vector<Vector>& activations,
                              const Vector& target) {
    std::size_t layer_count = net.layers.size();
    Gradients grads;
    grads.weights.resize(layer_count);
    grads.biases.resize(layer_count);

    const Vector& out = activations.back();
    double k = static_cast<double>(out.size());
    Vector delta =
        (2.0 / k) * (out - target).cwiseProduct(out).cwiseProduct(Vector::Ones(out.size()) - out);

    for (std::size_t l = layer_count; l-- > 0;) {
        const Vector& layer_input = l == 0 ? input : activations[l - 1];
        grads.weights[l] = delta * layer_input.transpose();
        grads.biases[l] = delta;
        if (l > 0) {
            const Vector& a = activations[l - 1];
            delta = (net.layers[l].weights.transpose() * delta)
                        .cwiseProduct(a)
                        .cwiseProduct(Vector::Ones(a.size()) - a);
        }
    }
    return grads;
}

}  // namespace

std::vector<Vector> forward(const Network& net, const Vector& input) {
    check_layer_shapes(net, input.size());
    std::vector<Vector> activations;
    activations.reserve(net.layers.size());
    const Vector* current = &input;
    for (const Layer& layer : net.layers) {
        activations.push_back(activate(layer, *current));
        current = &activations.back();
    }
    return activations;
}

double loss_mse(const Vector& output, const Vector& target) {
    if (output.size() != target.size())
        throw DimensionError("loss: output length " + std::to_string(output.size()) +
                             " vs target length " + std::to_string(target.size()));
    return (output - target).squaredNorm() / static_cast<double>(output.size());
}

Gradients backprop_gradients(const Network& net, const Vector& input,
                             const Vector& target) {
    if (net.layers.empty()) throw DimensionError("network has no layers");
    std::vector<Vector> activations = forward(net, input);
    if (activations.back().size() != target.size())
        throw DimensionError("target length " + std::to_string(target.size()) +
                             " does not match output width " +
                             std::to_string(activations.back().size()));
    return gradients_from_pass(net, input, activations, target);
}

Network init_weights(const NetworkConfig& config) {
    validate(config);
    Network net;
    net.config = config;
    Rng rng(config.seed);
    std::vector<int> widths;
    widths.push_back(config.input_dim);
    widths.insert(widths.end(), config.hidden_layers.begin(), config.hidden_layers.end());
    widths.push_back(config.output_dim);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        int fan_in = widths[l];
        int fan_out = widths[l + 1];
        double r = std::sqrt(6.0 / (fan_in + fan_out));
        Layer layer;
        layer.weights.resize(fan_out, fan_in);
        for (Eigen::Index row = 0; row < layer.weights.rows(); ++row)
            for (Eigen::Index col = 0; col < layer.weights.cols(); ++col)
                layer.weights(row, col) = rng.uniform(-r, r);
        layer.bias = Vector::Zero(fan_out);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::pair<Network, TrainReport> train(const NetworkConfig& config,
                                      const TrainingSet& data) {
    validate(config);
    if (data.empty()) throw UsageError("cannot train on an empty dataset");
    for (const TrainingSample& sample : data) {
        if (sample.input.size() != config.input_dim)
            throw DimensionError("sample input length " + std::to_string(sample.input.size()) +
                                 " does not match input_dim " +
                                 std::to_string(config.input_dim));
        if (sample.target.size() != config.output_dim)
            throw DimensionError("sample target length " + std::to_string(sample.target.size()) +
                                 " does not match output_dim " +
                                 std::to_string(config.output_dim));
    }

    Network net = init_weights(config);
    TrainReport report;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(config.seed, 1));

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        if (config.shuffle_each_epoch) shuffle_rng.shuffle(order);
        double total = 0.0;
        for (std::size_t i : order) {
            const TrainingSample& sample = data[i];
            std::vector<Vector> activations = forward(net, sample.input);
            total += loss_mse(activations.back(), sample.target);
            Gradients grads = gradients_from_pass(net, sample.input, activations, sample.target);
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                net.layers[l].weights -= config.learning_rate * grads.weights[l];
                net.layers[l].bias -= config.learning_rate * grads.biases[l];
            }
        }
        double mean = total / static_cast<double>(data.size());
        if (!std::isfinite(mean))
            throw DivergenceError("training diverged: non-finite loss at epoch " +
                                      std::to_string(epoch),
                                  epoch);
        report.loss_history.push_back(mean);
        if (mean <= config.target_loss) {
            report.stopped_early = true;
            break;
        }
    }

    report.epochs_run = static_cast<int>(report.loss_history.size());
    report.final_loss = report.loss_history.back();
    return {std::move(net), std::move(report)};
}

TrainingSet to_training_set(const Dataset& data) {
    TrainingSet set;
    set.reserve(data.size());
    for (const LabeledSample& row : data.samples)
        set.push_back({to_input_vector(row.sample), one_hot(row.label)});
    return set;
}

std::pair<Network, TrainReport> train(const NetworkConfig& config, const Dataset& data) {
    return train(config, to_training_set(data));
}

namespace {

constexpr std::string_view kModelMagic = "motorfault-model";
constexpr int kModelVersion = 1;

std::string join_hidden(const std::vector<int>& widths) {
    if (widths.empty()) return "none";
    std::string text;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i) text += ',';
        text += std::to_string(widths[i]);
    }
    return text;
}

// Sequential line reader with 1-based positions for error messages.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    std::string_view next() {
        if (pos_ > text_.size())
            throw ParseError("unexpected end of model text", line_);
        std::size_t nl = text_.find('\n', pos_);
        std::string_view line = text_.substr(
            pos_, nl == std::string_view::npos ? text_.size() - pos_ : nl - pos_);
        pos_ = nl == std::string_view::npos ? text_.size() + 1 : nl + 1;
        ++line_;
        return strip_cr(line);
    }

    bool at_end() {
        while (pos_ <= text_.size()) {
            std::size_t nl = text_.find('\n', pos_);
            std::string_view line = text_.substr(
                pos_, nl == std::string_view::npos ? text_.size() - pos_ : nl - pos_);
            if (!strip_cr(line).empty()) return false;
            pos_ = nl == std::string_view::npos ? text_.size() + 1 : nl + 1;
            ++line_;
        }
        return true;
    }

    std::size_t line() const { return line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

std::string_view expect_field(LineReader& reader, std::string_view key) {
    std::string_view line = reader.next();
    auto fields = split(line, ' ');
    if (fields.size() != 2 || fields[0] != key)
        throw ParseError("expected '" + std::string(key) + " <value>', got '" +
                             std::string(line) + "'",
                         reader.line());
    return fields[1];
}

int parse_positive_int(std::string_view text, std::string_view what, std::size_t line) {
    std::int64_t value;
    if (!try_parse_int(text, value) || value < 1 || value > 1'000'000)
        throw ParseError("bad " + std::string(what) + " '" + std::string(text) + "'", line);
    return static_cast<int>(value);
}

double parse_model_double(std::string_view text, std::size_t line) {
    double value;
    if (!try_parse_double(text, value) || !std::isfinite(value))
        throw ParseError("bad number '" + std::string(text) + "'", line);
    return value;
}

}  // namespace

void save_model(std::ostream& out, const Network& net) {
    const NetworkConfig& c = net.config;
    out << kModelMagic << ' ' << kModelVersion << '\n';
    out << "input_dim " << c.input_dim << '\n';
    out << "output_dim " << c.output_dim << '\n';
    out << "hidden " << join_hidden(c.hidden_layers) << '\n';
    out << "learning_rate " << format_double(c.learning_rate) << '\n';
    out << "max_epochs " << c.max_epochs << '\n';
    out << "target_loss " << format_double(c.target_loss) << '\n';
    out << "seed " << c.seed << '\n';
    out << "shuffle " << (c.shuffle_each_epoch ? 1 : 0) << '\n';
    out << "layers " << net.layers.size() << '\n';
    for (const Layer& layer : net.layers) {
        out << "layer " << layer.weights.rows() << ' ' << layer.weights.cols() << '\n';
        out << "weights";
        for (Eigen::Index row = 0; row < layer.weights.rows(); ++row)
            for (Eigen::Index col = 0; col < layer.weights.cols(); ++col)
                out << ' ' << format_double(layer.weights(row, col));
        out << '\n';
        out << "bias";
        for (Eigen::Index row = 0; row < layer.bias.size(); ++row)
            out << ' ' << format_double(layer.bias[row]);
        out << '\n';
    }
    out << "end\n";
}

std::string save_model(const Network& net) {
    std::ostringstream out;
    save_model(out, net);
    return out.str();
}

Network load_model(std::string_view text) {
    LineReader reader(text);

    std::string_view header = reader.next();
    auto head_fields = split(header, ' ');
    if (head_fields.size() != 2 || head_fields[0] != kModelMagic)
        throw ParseError("not a model file", reader.line());
    std::int64_t version;
    if (!try_parse_int(head_fields[1], version))
        throw ParseError("bad schema version '" + std::string(head_fields[1]) + "'",
                         reader.line());
    if (version != kModelVersion)
        throw ParseError("unsupported schema version " + std::to_string(version),
                         reader.line());

    Network net;
    NetworkConfig& c = net.config;
    c.input_dim = parse_positive_int(expect_field(reader, "input_dim"), "input_dim", reader.line());
    c.output_dim =
        parse_positive_int(expect_field(reader, "output_dim"), "output_dim", reader.line());

    std::string_view hidden = expect_field(reader, "hidden");
    c.hidden_layers.clear();
    if (hidden != "none")
        for (std::string_view part : split(hidden, ','))
            c.hidden_layers.push_back(parse_positive_int(part, "hidden width", reader.line()));

    c.learning_rate = parse_model_double(expect_field(reader, "learning_rate"), reader.line());
    c.max_epochs = parse_positive_int(expect_field(reader, "max_epochs"), "max_epochs", reader.line());
    c.target_loss = parse_model_double(expect_field(reader, "target_loss"), reader.line());
    std::string_view seed_text = expect_field(reader, "seed");
    if (!try_parse_uint(seed_text, c.seed))
        throw ParseError("bad seed '" + std::string(seed_text) + "'", reader.line());
    std::string_view shuffle_text = expect_field(reader, "shuffle");
    if (shuffle_text == "1")
        c.shuffle_each_epoch = true;
    else if (shuffle_text == "0")
        c.shuffle_each_epoch = false;
    else
        throw ParseError("bad shuffle flag '" + std::string(shuffle_text) + "'", reader.line());

    int layer_count =
        parse_positive_int(expect_field(reader, "layers"), "layer count", reader.line());

    std::vector<int> expected_widths;
    expected_widths.push_back(c.input_dim);
    expected_widths.insert(expected_widths.end(), c.hidden_layers.begin(), c.hidden_layers.end());
    expected_widths.push_back(c.output_dim);
    if (static_cast<int>(expected_widths.size()) - 1 != layer_count)
        throw ParseError("layer count " + std::to_string(layer_count) +
                             " does not match hidden widths",
                         reader.line());

    for (int l = 0; l < layer_count; ++l) {
        std::string_view line = reader.next();
        auto fields = split(line, ' ');
        if (fields.size() != 3 || fields[0] != "layer")
            throw ParseError("expected 'layer <rows> <cols>', got '" + std::string(line) + "'",
                             reader.line());
        int rows = parse_positive_int(fields[1], "layer rows", reader.line());
        int cols = parse_positive_int(fields[2], "layer cols", reader.line());
        if (rows != expected_widths[l + 1] || cols != expected_widths[l])
            throw ParseError("layer " + std::to_string(l + 1) + " shape " +
                                 std::to_string(rows) + "x" + std::to_string(cols) +
                                 " does not match config",
                             reader.line());

        Layer layer;
        layer.weights.resize(rows, cols);
        auto weight_fields = split(reader.next(), ' ');
        if (weight_fields.empty() || weight_fields[0] != "weights" ||
            static_cast<int>(weight_fields.size()) != 1 + rows * cols)
            throw ParseError("expected 'weights' with " + std::to_string(rows * cols) +
                                 " values",
                             reader.line());
        for (int row = 0; row < rows; ++row)
            for (int col = 0; col < cols; ++col)
                layer.weights(row, col) =
                    parse_model_double(weight_fields[1 + row * cols + col], reader.line());

        layer.bias.resize(rows);
        auto bias_fields = split(reader.next(), ' ');
        if (bias_fields.empty() || bias_fields[0] != "bias" ||
            static_cast<int>(bias_fields.size()) != 1 + rows)
            throw ParseError("expected 'bias' with " + std::to_string(rows) + " values",
                             reader.line());
        for (int row = 0; row < rows; ++row)
            layer.bias[row] = parse_model_double(bias_fields[1 + row], reader.line());

        net.layers.push_back(std::move(layer));
    }

    if (reader.next() != "end") throw ParseError("missing 'end' line", reader.line());
    if (!reader.at_end()) throw ParseError("trailing content after 'end'", reader.line() + 1);
    return net;
}

Network load_model(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_model(std::string_view(buffer.view()));
}

void save_model_file(const std::string& path, const Network& net) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    save_model(out, net);
    if (!out.flush()) throw IoError("write failed for '" + path + "'");
}

Network load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return load_model(in);
}

}  // namespace motorfault
