#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qwadv/dataset.hpp"

namespace qwadv {

enum class Arch { FC, CNN, CQCNN };
enum class Optimizer { Sgd, Adam };

// One training example: flattened n x n adjacency (row-major) plus label.
struct Example {
  Eigen::VectorXd x;
  int y = 0;
};

// Pads every adjacency to input_size and flattens. Throws when a sample is
// larger than input_size.
std::vector<Example> to_examples(const std::vector<LabeledSample>& samples,
                                 int input_size);

struct Shape {
  int c = 1, h = 0, w = 0;
  int size() const { return c * h * w; }
};

struct ParamRef {
  std::string name;
  Eigen::MatrixXd* value;
  Eigen::MatrixXd* grad;
  bool trainable = true;
};

// Batches flow through layers as (batch x features) matrices; a row is a
// (c, h, w) block flattened channel-major. Layers cache what backward needs,
// so one model instance must not be shared across concurrent training runs.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Eigen::MatrixXd forward(const Eigen::MatrixXd& x, bool training) = 0;
  virtual Eigen::MatrixXd backward(const Eigen::MatrixXd& dy) = 0;
  virtual std::vector<ParamRef> params() { return {}; }
  // Re-arms any internal randomness (dropout masks); no-op for most layers.
  virtual void reseed(std::uint64_t) {}
  virtual Shape out_shape() const = 0;
  virtual std::string kind() const = 0;
};

class Model {
 public:
  Arch arch = Arch::FC;
  int n = 0;  // input side length; input features = n * n
  std::uint64_t init_seed = 0;
  std::vector<std::unique_ptr<Layer>> layers;

  int input_dim() const { return n * n; }
  // Class probabilities, one row per sample (softmax over two logits).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, bool training);
  // Backpropagates a gradient given at the logits (pre-softmax) layer.
  void backward(const Eigen::MatrixXd& dlogits);
  std::vector<ParamRef> params();
  void zero_grad();
};

// Table-driven constructors. FC: flatten + dense 10,10,10,2. CNN: (3,3)
// valid convolutions with channel plan {n,10,10,10} applied while the
// spatial size allows a kernel, dropout 0.2, then the dense 10,10,10,2
// stack. CQCNN: six fixed graph-probing filters, a symmetric/antisymmetric
// recombination, two learnable (3,3) convolutions, a 1x1 compression,
// dense 10, dense 2. ReLU everywhere except the output. He-uniform init.
Model build_model(Arch arch, int n, std::uint64_t rng_seed);

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 10;
  int epochs = 50;
  Optimizer optimizer = Optimizer::Sgd;
  std::uint64_t rng_seed = 0;
};

struct TrainingCurves {
  std::vector<double> train_loss, train_acc;
  std::vector<double> test_loss, test_acc;  // filled when an eval set is given
};

// Mini-batch cross-entropy training. Deterministic for a fixed seed: the
// shuffle and dropout streams are both derived from cfg.rng_seed. Throws
// divergence_error when the loss stops being finite.
TrainingCurves train_model(Model& model, const std::vector<Example>& train,
                           const TrainConfig& cfg,
                           const std::vector<Example>* eval_set = nullptr);

// Counts use class 1 as positive; index c of the per-class arrays treats
// class c as positive.
struct EvalReport {
  double accuracy = 0.0;
  double loss = 0.0;
  std::array<double, 2> precision{}, recall{}, f1{};
  long long tp = 0, tn = 0, fp = 0, fn = 0;
};

struct Metrics {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};
Metrics metrics_from_counts(long long tp, long long tn, long long fp, long long fn);

EvalReport evaluate(Model& model, const std::vector<Example>& test);

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels);

// Mean and sample standard deviation over repeated runs.
struct EvalStats {
  EvalReport mean, stddev;
};
EvalStats summarize(const std::vector<EvalReport>& reports);

// Ten-run style averaging: trains `repeats` fresh models with seeds
// base.rng_seed .. base.rng_seed + repeats - 1 and evaluates each on `test`.
struct RepeatResult {
  std::vector<EvalReport> reports;
  std::vector<TrainingCurves> curves;
  EvalStats stats;
};
RepeatResult repeat_train_evaluate(Arch arch, int n,
                                   const std::vector<Example>& train,
                                   const std::vector<Example>& test,
                                   const TrainConfig& base, int repeats,
                                   int jobs = 1);

// Evaluates one trained model on test sets of graphs no larger than its
// input size, padding each set up. Throws when a set exceeds the input size.
std::vector<EvalReport> generalization_sweep(
    Model& model, const std::vector<std::vector<LabeledSample>>& test_sets);

// Central finite differences (step 1e-5) against analytic gradients over a
// random subset of trainable parameters; returns the max relative deviation.
// Run with dropout off (training=false path), as the check requires a
// deterministic loss.
double gradient_check(Model& model, const Example& sample,
                      std::uint64_t rng_seed, int entries_per_tensor = 24);

// Versioned JSON checkpoint (arch, layer specs, flattened weights).
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// CSV of per-epoch test curves. With several runs, columns carry the mean
// and sample standard deviation across runs.
std::string curves_to_csv(const std::vector<TrainingCurves>& runs);

const char* arch_name(Arch a);
Arch arch_from_name(const std::string& name);
const char* optimizer_name(Optimizer o);
Optimizer optimizer_from_name(const std::string& name);

}  // namespace qwadv
