#include "caclab/rrbfn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "caclab/config.hpp"
#include "caclab/random.hpp"

namespace caclab {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::LogisticSigmoid: return "logistic-sigmoid";
    case Activation::Gaussian: return "gaussian";
    case Activation::Linear: return "linear";
  }
  throw std::logic_error("unknown activation");
}

Activation activation_from_string(const std::string& s) {
  if (s == "logistic-sigmoid") return Activation::LogisticSigmoid;
  if (s == "gaussian") return Activation::Gaussian;
  if (s == "linear") return Activation::Linear;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::LogisticSigmoid: return sigmoid(z);
    case Activation::Gaussian: return std::exp(-z * z);
    case Activation::Linear: return z;
  }
  throw std::logic_error("unknown activation");
}

void validate(const FeedForwardModel& m) {
  if (m.input_count <= 0 || m.hidden_count <= 0)
    throw std::invalid_argument("feed-forward model needs positive sizes");
  std::size_t n = static_cast<std::size_t>(m.input_count);
  std::size_t q = static_cast<std::size_t>(m.hidden_count);
  if (m.input_weights.size() != q * n || m.hidden_biases.size() != q ||
      m.output_weights.size() != q)
    throw std::invalid_argument("feed-forward weight shapes inconsistent");
}

double feedforward_nar(const FeedForwardModel& m,
                       const std::vector<double>& history) {
  validate(m);
  if (history.size() != static_cast<std::size_t>(m.input_count))
    throw std::invalid_argument("history length does not match input count");
  double y = m.output_bias;
  for (int j = 0; j < m.hidden_count; ++j) {
    double z = m.hidden_biases[j];
    for (int i = 0; i < m.input_count; ++i)
      z += m.input_weights[j * m.input_count + i] * history[i];
    y += m.output_weights[j] * apply_activation(m.hidden_activation, z);
  }
  return y;
}

double rbf_eval(const std::vector<std::vector<double>>& centers,
                const std::vector<double>& widths,
                const std::vector<double>& weights,
                const std::vector<double>& input) {
  if (centers.size() != widths.size() || centers.size() != weights.size())
    throw std::invalid_argument("rbf neuron counts inconsistent");
  double y = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (widths[i] <= 0.0) throw std::invalid_argument("rbf width must be positive");
    if (centers[i].size() != input.size())
      throw std::invalid_argument("rbf center dimension mismatch");
    double dist = 0.0;
    for (std::size_t j = 0; j < input.size(); ++j) {
      double d = input[j] - centers[i][j];
      dist += d * d;
    }
    y += weights[i] * std::exp(-dist / (2.0 * widths[i]));
  }
  return y;
}

RrbfnConfig desk_scale_config() { return RrbfnConfig{16, {8, 8}, 2.0}; }

RrbfnConfig full_scale_config() { return RrbfnConfig{250, {200, 200}, 40.0}; }

void validate(const RrbfnModel& m) {
  if (m.input_size <= 0) throw std::invalid_argument("input size must be positive");
  std::size_t n = static_cast<std::size_t>(m.input_size);
  if (m.recurrent_weights.size() != n || m.input_state.size() != n)
    throw std::invalid_argument("input layer arrays inconsistent");
  for (double r : m.recurrent_weights)
    if (!(r >= -1.0 && r <= 1.0))
      throw std::invalid_argument("recurrent weight outside [-1, 1]");
  if (m.hidden_layers.empty())
    throw std::invalid_argument("model needs at least one hidden layer");
  int fan_in = m.input_size;
  for (const auto& layer : m.hidden_layers) {
    if (layer.size <= 0) throw std::invalid_argument("hidden layer size must be positive");
    if (layer.fan_in != fan_in)
      throw std::invalid_argument("hidden layer fan-in mismatch");
    if (layer.centers.size() !=
        static_cast<std::size_t>(layer.size) * static_cast<std::size_t>(layer.fan_in))
      throw std::invalid_argument("center array shape mismatch");
    if (layer.widths.size() != static_cast<std::size_t>(layer.size))
      throw std::invalid_argument("width array shape mismatch");
    for (double w : layer.widths)
      if (!(w > 0.0)) throw std::invalid_argument("widths must be positive");
    fan_in = layer.size;
  }
  if (m.output_weights.size() != static_cast<std::size_t>(fan_in))
    throw std::invalid_argument("output weight count mismatch");
}

RrbfnModel init_model(const RrbfnConfig& config, std::uint64_t seed) {
  if (config.input_size <= 0)
    throw std::invalid_argument("input size must be positive");
  if (config.hidden_sizes.empty())
    throw std::invalid_argument("at least one hidden layer required");
  for (int s : config.hidden_sizes)
    if (s <= 0) throw std::invalid_argument("hidden layer size must be positive");
  if (config.initial_width <= 0.0)
    throw std::invalid_argument("initial width must be positive");

  RandomStream rng(seed);
  RrbfnModel m;
  m.seed = seed;
  m.input_size = config.input_size;
  m.recurrent_weights.resize(config.input_size);
  for (double& r : m.recurrent_weights)
    r = rng.truncated_normal(0.0, 0.5, -1.0, 1.0);
  m.input_state.assign(config.input_size, 0.0);

  int fan_in = config.input_size;
  for (int size : config.hidden_sizes) {
    RrbfnLayer layer;
    layer.size = size;
    layer.fan_in = fan_in;
    layer.centers.resize(static_cast<std::size_t>(size) * fan_in);
    for (double& c : layer.centers) c = rng.uniform01();
    layer.widths.assign(size, config.initial_width);
    m.hidden_layers.push_back(std::move(layer));
    fan_in = size;
  }
  m.output_weights.resize(fan_in);
  for (double& w : m.output_weights) w = rng.uniform01() - 0.5;
  m.output_bias = 0.0;
  validate(m);
  return m;
}

void reset_state(RrbfnModel& m) {
  m.input_state.assign(m.input_state.size(), 0.0);
}

namespace {

// Forward pass of the stateless hidden stack. Keeps per-layer responses and
// squared distances for the backward pass.
struct Forward {
  std::vector<std::vector<double>> responses;  // h per layer
  std::vector<std::vector<double>> distances;  // d per layer
  double output = 0.0;
};

Forward forward_hidden(const RrbfnModel& m, const std::vector<double>& x) {
  Forward fw;
  const std::vector<double>* in = &x;
  for (const auto& layer : m.hidden_layers) {
    std::vector<double> h(layer.size), d(layer.size);
    for (int i = 0; i < layer.size; ++i) {
      double dist = 0.0;
      const double* c = &layer.centers[static_cast<std::size_t>(i) * layer.fan_in];
      for (int j = 0; j < layer.fan_in; ++j) {
        double diff = (*in)[j] - c[j];
        dist += diff * diff;
      }
      d[i] = dist;
      h[i] = std::exp(-dist / layer.widths[i]);
    }
    fw.distances.push_back(std::move(d));
    fw.responses.push_back(std::move(h));
    in = &fw.responses.back();
  }
  fw.output = m.output_bias;
  const auto& last = fw.responses.back();
  for (std::size_t i = 0; i < last.size(); ++i)
    fw.output += m.output_weights[i] * last[i];
  return fw;
}

// Final input-layer state for each sample after driving its sequence
// through the recurrence from a zero state. Independent of every trainable
// parameter, so it is computed once per training set.
std::vector<std::vector<double>> final_states(const RrbfnModel& m,
                                              const TrainingSet& data) {
  std::vector<std::vector<double>> states;
  states.reserve(data.samples.size());
  for (const auto& sample : data.samples) {
    std::vector<double> x(m.input_size, 0.0);
    for (const auto& u : sample.inputs)
      for (int j = 0; j < m.input_size; ++j)
        x[j] = sigmoid(u[j] + m.recurrent_weights[j] * x[j]);
    states.push_back(std::move(x));
  }
  return states;
}

// Trainable parameters, flattened as: output bias, output weights, then per
// hidden layer its centers (row-major) followed by its widths.
std::size_t param_count(const RrbfnModel& m) {
  std::size_t n = 1 + m.output_weights.size();
  for (const auto& layer : m.hidden_layers)
    n += layer.centers.size() + layer.widths.size();
  return n;
}

double* param_ref(RrbfnModel& m, std::size_t idx) {
  if (idx == 0) return &m.output_bias;
  idx -= 1;
  if (idx < m.output_weights.size()) return &m.output_weights[idx];
  idx -= m.output_weights.size();
  for (auto& layer : m.hidden_layers) {
    if (idx < layer.centers.size()) return &layer.centers[idx];
    idx -= layer.centers.size();
    if (idx < layer.widths.size()) return &layer.widths[idx];
    idx -= layer.widths.size();
  }
  throw std::out_of_range("parameter index");
}

double batch_loss(const RrbfnModel& m,
                  const std::vector<std::vector<double>>& states,
                  const TrainingSet& data) {
  double sum = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    double e = forward_hidden(m, states[s]).output - data.samples[s].target;
    sum += e * e;
  }
  return sum / double(states.size());
}

// Mean squared error and its gradient in the flat parameter layout.
double loss_and_gradient(const RrbfnModel& m,
                         const std::vector<std::vector<double>>& states,
                         const TrainingSet& data, std::vector<double>& grad) {
  grad.assign(param_count(m), 0.0);
  const double mass = double(states.size());
  const std::size_t layer_count = m.hidden_layers.size();

  // Offsets of each layer's center and width blocks in the flat layout.
  std::vector<std::size_t> center_off(layer_count), width_off(layer_count);
  std::size_t off = 1 + m.output_weights.size();
  for (std::size_t l = 0; l < layer_count; ++l) {
    center_off[l] = off;
    off += m.hidden_layers[l].centers.size();
    width_off[l] = off;
    off += m.hidden_layers[l].widths.size();
  }

  double loss = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    Forward fw = forward_hidden(m, states[s]);
    double e = fw.output - data.samples[s].target;
    loss += e * e;
    double scale = 2.0 * e / mass;

    grad[0] += scale;
    const auto& last = fw.responses.back();
    for (std::size_t i = 0; i < last.size(); ++i)
      grad[1 + i] += scale * last[i];

    std::vector<double> delta(last.size());
    for (std::size_t i = 0; i < last.size(); ++i)
      delta[i] = scale * m.output_weights[i];

    for (std::size_t l = layer_count; l-- > 0;) {
      const auto& layer = m.hidden_layers[l];
      const std::vector<double>& in =
          (l == 0) ? states[s] : fw.responses[l - 1];
      std::vector<double> delta_prev;
      if (l > 0) delta_prev.assign(in.size(), 0.0);
      for (int i = 0; i < layer.size; ++i) {
        double h = fw.responses[l][i];
        double d = fw.distances[l][i];
        double w = layer.widths[i];
        double common = delta[i] * h / w;
        grad[width_off[l] + i] += common * d / w;
        const double* c = &layer.centers[static_cast<std::size_t>(i) * layer.fan_in];
        std::size_t row = center_off[l] + static_cast<std::size_t>(i) * layer.fan_in;
        for (int j = 0; j < layer.fan_in; ++j) {
          double diff = in[j] - c[j];
          grad[row + j] += common * 2.0 * diff;
          if (l > 0) delta_prev[j] -= common * 2.0 * diff;
        }
      }
      if (l > 0) delta = std::move(delta_prev);
    }
  }
  return loss / mass;
}

}  // namespace

double rrbfn_step(RrbfnModel& m, const std::vector<double>& input) {
  if (input.size() != static_cast<std::size_t>(m.input_size))
    throw std::invalid_argument("input arity does not match input size");
  for (int j = 0; j < m.input_size; ++j)
    m.input_state[j] =
        sigmoid(input[j] + m.recurrent_weights[j] * m.input_state[j]);
  return forward_hidden(m, m.input_state).output;
}

void validate(const TrainingSet& data, int input_size) {
  if (data.samples.empty()) throw std::invalid_argument("training set empty");
  for (const auto& sample : data.samples) {
    if (sample.inputs.empty())
      throw std::invalid_argument("sample has an empty input sequence");
    for (const auto& u : sample.inputs)
      if (u.size() != static_cast<std::size_t>(input_size))
        throw std::invalid_argument("sample input arity mismatch");
  }
}

TrainReport train_gradient_descent(RrbfnModel& m, const TrainingSet& data,
                                   int epochs, double step_size) {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (step_size <= 0.0) throw std::invalid_argument("step size must be positive");
  validate(m);
  TrainReport report;
  if (epochs == 0) return report;
  validate(data, m.input_size);

  auto states = final_states(m, data);
  std::vector<double> grad;
  auto stepped = [](const RrbfnModel& base, const std::vector<double>& g,
                    double step) {
    RrbfnModel next = base;
    std::size_t idx = 1 + next.output_weights.size();
    next.output_bias -= step * g[0];
    for (std::size_t i = 0; i < next.output_weights.size(); ++i)
      next.output_weights[i] -= step * g[1 + i];
    for (auto& layer : next.hidden_layers) {
      for (double& c : layer.centers) c -= step * g[idx++];
      for (double& w : layer.widths)
        w = std::max(1e-8, w - step * g[idx++]);
    }
    return next;
  };
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double loss = loss_and_gradient(m, states, data, grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged: loss is not finite at epoch " +
                               std::to_string(epoch));
    report.epoch_mse.push_back(loss);
    // Backtracking: halve the step until the update stops increasing the
    // loss, so a generous step_size cannot blow the model up.
    double step = step_size;
    RrbfnModel trial = stepped(m, grad, step);
    for (int halvings = 0; halvings < 30; ++halvings) {
      double trial_loss = batch_loss(trial, states, data);
      if (std::isfinite(trial_loss) && trial_loss <= loss) break;
      step *= 0.5;
      trial = stepped(m, grad, step);
    }
    m = std::move(trial);
  }
  report.final_residuals.reserve(data.samples.size());
  for (std::size_t s = 0; s < states.size(); ++s)
    report.final_residuals.push_back(forward_hidden(m, states[s]).output -
                                     data.samples[s].target);
  return report;
}

double gradient_check(const RrbfnModel& m, const TrainingSet& data, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
  validate(m);
  validate(data, m.input_size);
  auto states = final_states(m, data);
  std::vector<double> grad;
  loss_and_gradient(m, states, data, grad);

  RrbfnModel probe = m;
  double worst = 0.0;
  for (std::size_t idx = 0; idx < grad.size(); ++idx) {
    double* p = param_ref(probe, idx);
    double saved = *p;
    *p = saved + h;
    double up = batch_loss(probe, states, data);
    *p = saved - h;
    double down = batch_loss(probe, states, data);
    *p = saved;
    double numeric = (up - down) / (2.0 * h);
    double err = std::abs(grad[idx] - numeric) /
                 std::max(1e-12, std::abs(grad[idx]) + std::abs(numeric));
    worst = std::max(worst, err);
  }
  return worst;
}

double evaluate_mse(const RrbfnModel& m, const TrainingSet& data) {
  validate(m);
  validate(data, m.input_size);
  return batch_loss(m, final_states(m, data), data);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void write_row(std::ostream& out, const std::vector<double>& values,
               std::size_t start, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out << ' ';
    out << format_double(values[start + i]);
  }
  out << '\n';
}

double read_value(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token))
    throw std::runtime_error(std::string("model file truncated reading ") + what);
  return parse_double(token);
}

void expect_token(std::istream& in, const std::string& expected) {
  std::string token;
  if (!(in >> token) || token != expected)
    throw std::runtime_error("model file: expected '" + expected + "', got '" +
                             token + "'");
}

}  // namespace

void save_model(const RrbfnModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_model(m, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void save_model(const RrbfnModel& m, std::ostream& out) {
  validate(m);
  out << "rrbfn-model 1\n";
  out << "layers " << m.input_size;
  for (const auto& layer : m.hidden_layers) out << ' ' << layer.size;
  out << " 1\n";
  out << "activations logistic-sigmoid";
  for (std::size_t l = 0; l < m.hidden_layers.size(); ++l) out << " gaussian";
  out << " linear\n";
  out << "seed " << m.seed << "\n";
  out << "recurrent_weights " << m.input_size << "\n";
  write_row(out, m.recurrent_weights, 0, m.recurrent_weights.size());
  for (std::size_t l = 0; l < m.hidden_layers.size(); ++l) {
    const auto& layer = m.hidden_layers[l];
    out << "layer " << l << " centers " << layer.size << ' ' << layer.fan_in
        << "\n";
    for (int i = 0; i < layer.size; ++i)
      write_row(out, layer.centers, static_cast<std::size_t>(i) * layer.fan_in,
                layer.fan_in);
    out << "layer " << l << " widths " << layer.size << "\n";
    write_row(out, layer.widths, 0, layer.widths.size());
  }
  out << "output_weights " << m.output_weights.size() << "\n";
  write_row(out, m.output_weights, 0, m.output_weights.size());
  out << "output_bias " << format_double(m.output_bias) << "\n";
}

RrbfnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_model(in);
}

RrbfnModel load_model(std::istream& in) {
  expect_token(in, "rrbfn-model");
  int version = 0;
  if (!(in >> version) || version != 1)
    throw std::runtime_error("unsupported model format version");

  expect_token(in, "layers");
  std::string line;
  std::getline(in, line);
  std::istringstream sizes_in(line);
  std::vector<int> sizes;
  int v;
  while (sizes_in >> v) sizes.push_back(v);
  if (sizes.size() < 3 || sizes.back() != 1)
    throw std::runtime_error("model file: bad layer list");

  expect_token(in, "activations");
  std::getline(in, line);
  std::istringstream act_in(line);
  std::vector<std::string> acts;
  std::string a;
  while (act_in >> a) acts.push_back(a);
  if (acts.size() != sizes.size() || acts.front() != "logistic-sigmoid" ||
      acts.back() != "linear")
    throw std::runtime_error("model file: bad activation list");
  for (std::size_t i = 1; i + 1 < acts.size(); ++i)
    if (acts[i] != "gaussian")
      throw std::runtime_error("model file: bad activation list");

  RrbfnModel m;
  expect_token(in, "seed");
  if (!(in >> m.seed)) throw std::runtime_error("model file: bad seed");

  m.input_size = sizes.front();
  expect_token(in, "recurrent_weights");
  int n;
  if (!(in >> n) || n != m.input_size)
    throw std::runtime_error("model file: recurrent weight count mismatch");
  m.recurrent_weights.resize(n);
  for (double& r : m.recurrent_weights) r = read_value(in, "recurrent weights");
  m.input_state.assign(n, 0.0);

  int fan_in = m.input_size;
  for (std::size_t l = 1; l + 1 < sizes.size(); ++l) {
    RrbfnLayer layer;
    layer.size = sizes[l];
    layer.fan_in = fan_in;
    expect_token(in, "layer");
    std::size_t idx;
    if (!(in >> idx) || idx != l - 1)
      throw std::runtime_error("model file: layer blocks out of order");
    expect_token(in, "centers");
    int rows, cols;
    if (!(in >> rows >> cols) || rows != layer.size || cols != layer.fan_in)
      throw std::runtime_error("model file: center dimensions mismatch");
    layer.centers.resize(static_cast<std::size_t>(rows) * cols);
    for (double& c : layer.centers) c = read_value(in, "centers");
    expect_token(in, "layer");
    if (!(in >> idx) || idx != l - 1)
      throw std::runtime_error("model file: layer blocks out of order");
    expect_token(in, "widths");
    if (!(in >> rows) || rows != layer.size)
      throw std::runtime_error("model file: width count mismatch");
    layer.widths.resize(rows);
    for (double& w : layer.widths) w = read_value(in, "widths");
    fan_in = layer.size;
    m.hidden_layers.push_back(std::move(layer));
  }

  expect_token(in, "output_weights");
  if (!(in >> n) || n != fan_in)
    throw std::runtime_error("model file: output weight count mismatch");
  m.output_weights.resize(n);
  for (double& w : m.output_weights) w = read_value(in, "output weights");
  expect_token(in, "output_bias");
  m.output_bias = read_value(in, "output bias");
  validate(m);
  return m;
}

}  // namespace caclab
