#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace caclab {

enum class Activation { LogisticSigmoid, Gaussian, Linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Applies the scalar transfer function: 1/(1+e^-z), e^(-z^2), or z.
double apply_activation(Activation a, double z);

double sigmoid(double z);

/// Single-hidden-layer predictor over a fixed-length history window:
/// y_hat = w0 + sum_j wj * g(w0j + sum_i wij * y(t-i)).
struct FeedForwardModel {
  int input_count = 0;   // history window length n
  int hidden_count = 0;  // hidden nodes Q
  std::vector<double> input_weights;   // Q x n, row-major
  std::vector<double> hidden_biases;   // Q
  std::vector<double> output_weights;  // Q
  double output_bias = 0.0;
  Activation hidden_activation = Activation::LogisticSigmoid;
};

void validate(const FeedForwardModel& m);
double feedforward_nar(const FeedForwardModel& m,
                       const std::vector<double>& history);

/// Weighted sum of Gaussian responses with the 2*sigma exponent convention:
/// sum_i w_i * exp(-|input - center_i|^2 / (2 * width_i)).
double rbf_eval(const std::vector<std::vector<double>>& centers,
                const std::vector<double>& widths,
                const std::vector<double>& weights,
                const std::vector<double>& input);

/// One Gaussian hidden layer. Responses use the sigma convention:
/// h_i = exp(-sum_j (in_j - center_ij)^2 / width_i).
struct RrbfnLayer {
  int size = 0;
  int fan_in = 0;
  std::vector<double> centers;  // size x fan_in, row-major
  std::vector<double> widths;   // size, all positive
};

struct RrbfnConfig {
  int input_size = 0;
  std::vector<int> hidden_sizes;
  double initial_width = 1.0;
};

/// Test-scale network: 16 sigmoid input neurons, two Gaussian hidden layers
/// of 8, linear output.
RrbfnConfig desk_scale_config();

/// Full-scale network: 250 sigmoid input neurons, two Gaussian hidden
/// layers of 200, linear output.
RrbfnConfig full_scale_config();

/// Recurrent RBF network. Each input neuron feeds back on itself:
/// x_j(t) = sigmoid(u_j(t) + r_j * x_j(t-1)); the hidden stack is
/// stateless; the output is linear with a bias.
struct RrbfnModel {
  int input_size = 0;
  std::vector<double> recurrent_weights;  // r_j, each in [-1, 1], frozen
  std::vector<double> input_state;        // x_j, zeroed by reset_state
  std::vector<RrbfnLayer> hidden_layers;
  std::vector<double> output_weights;     // fan-in = last hidden size
  double output_bias = 0.0;
  std::uint64_t seed = 0;
};

void validate(const RrbfnModel& m);

/// Random model: r_j from a normal(0, 0.5) truncated to [-1, 1], centers
/// uniform over (0, 1), widths = config.initial_width, output weights
/// uniform over [-0.5, 0.5), output bias 0. Deterministic per seed.
RrbfnModel init_model(const RrbfnConfig& config, std::uint64_t seed);

/// Advances the input-state recurrence with `input` and returns the network
/// output. Stateful: repeated identical inputs differ whenever r_j != 0.
double rrbfn_step(RrbfnModel& m, const std::vector<double>& input);

/// Zeroes the input state; weights untouched.
void reset_state(RrbfnModel& m);

/// One training sample: an input sequence driven through the recurrence
/// (state reset at the sequence start) with the target compared against the
/// output at the final step.
struct TrainingSample {
  std::vector<std::vector<double>> inputs;
  double target = 0.0;
};

struct TrainingSet {
  std::vector<TrainingSample> samples;
};

void validate(const TrainingSet& data, int input_size);

struct TrainReport {
  std::vector<double> epoch_mse;        // loss before each epoch's update
  std::vector<double> final_residuals;  // y_hat - target after training
};

/// Full-batch gradient descent on the mean squared error over output
/// weights, output bias, centers, and widths. Recurrent weights stay
/// frozen. Widths are clamped to stay positive. Each epoch backtracks,
/// halving the step until the update does not increase the loss, so a
/// generous step_size stays stable. Throws std::runtime_error when the
/// loss stops being finite.
TrainReport train_gradient_descent(RrbfnModel& m, const TrainingSet& data,
                                   int epochs, double step_size);

/// Max over all trainable parameters of
/// |analytic - numeric| / max(1e-12, |analytic| + |numeric|)
/// with central finite differences of half-step h.
double gradient_check(const RrbfnModel& m, const TrainingSet& data, double h);

/// Mean squared error of the model over the data (no parameter updates).
double evaluate_mse(const RrbfnModel& m, const TrainingSet& data);

/// Versioned plain-text serialization; numeric values round-trip exactly.
/// The transient input state is not persisted (a loaded model starts
/// reset).
void save_model(const RrbfnModel& m, const std::string& path);
void save_model(const RrbfnModel& m, std::ostream& out);
RrbfnModel load_model(const std::string& path);
RrbfnModel load_model(std::istream& in);

}  // namespace caclab
