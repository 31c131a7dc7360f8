#include "qwadv/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qwadv/errors.hpp"
#include "qwadv/io.hpp"
#include "qwadv/rng.hpp"

namespace qwadv {

namespace {

using Eigen::MatrixXd;
using nlohmann::json;

MatrixXd uniform_init(int rows, int cols, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-limit, limit);
  MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) w(i, j) = u(rng);
  return w;
}

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) return MatrixXd(0, 0);
  const auto cols = j[0].size();
  MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  return m;
}

class DenseLayer : public Layer {
 public:
  DenseLayer(int in, int out) : in_(in), out_(out) {
    w_ = MatrixXd::Zero(out, in);
    b_ = MatrixXd::Zero(1, out);
    dw_ = MatrixXd::Zero(out, in);
    db_ = MatrixXd::Zero(1, out);
  }

  void init(std::mt19937_64& rng) {
    w_ = uniform_init(out_, in_, std::sqrt(6.0 / in_), rng);
  }

  MatrixXd forward(const MatrixXd& x, bool) override {
    x_ = x;
    return (x * w_.transpose()).rowwise() + b_.row(0);
  }

  MatrixXd backward(const MatrixXd& dy) override {
    dw_ += dy.transpose() * x_;
    db_.row(0) += dy.colwise().sum();
    return dy * w_;
  }

  std::vector<ParamRef> params() override {
    return {{"w", &w_, &dw_, true}, {"b", &b_, &db_, true}};
  }

  Shape out_shape() const override { return {1, 1, out_}; }
  std::string kind() const override { return "dense"; }

  int in_, out_;
  MatrixXd w_, b_, dw_, db_, x_;
};

class ReluLayer : public Layer {
 public:
  explicit ReluLayer(Shape s) : shape_(s) {}

  MatrixXd forward(const MatrixXd& x, bool) override {
    mask_ = (x.array() > 0.0).cast<double>();
    return x.cwiseMax(0.0);
  }

  MatrixXd backward(const MatrixXd& dy) override {
    return dy.cwiseProduct(mask_);
  }

  Shape out_shape() const override { return shape_; }
  std::string kind() const override { return "relu"; }

  Shape shape_;
  MatrixXd mask_;
};

class DropoutLayer : public Layer {
 public:
  DropoutLayer(double rate, Shape s, std::uint64_t seed)
      : rate_(rate), shape_(s), rng_(make_rng(seed)) {}

  MatrixXd forward(const MatrixXd& x, bool training) override {
    if (!training || rate_ <= 0.0) {
      active_ = false;
      return x;
    }
    active_ = true;
    // Inverted scaling: surviving units are boosted so inference needs no
    // rescaling pass.
    const double keep = 1.0 - rate_;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    mask_.resize(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        mask_(i, j) = u(rng_) < keep ? 1.0 / keep : 0.0;
    return x.cwiseProduct(mask_);
  }

  MatrixXd backward(const MatrixXd& dy) override {
    if (!active_) return dy;
    return dy.cwiseProduct(mask_);
  }

  void reseed(std::uint64_t seed) override { rng_ = make_rng(seed); }

  Shape out_shape() const override { return shape_; }
  std::string kind() const override { return "dropout"; }

  double rate_;
  Shape shape_;
  std::mt19937_64 rng_;
  MatrixXd mask_;
  bool active_ = false;
};

// Valid (no padding) stride-1 convolution over channel-major flattened rows,
// implemented as im2col plus one GEMM per sample.
class Conv2dLayer : public Layer {
 public:
  Conv2dLayer(Shape in, int out_c, int kh, int kw)
      : in_(in), out_c_(out_c), kh_(kh), kw_(kw) {
    oh_ = in.h - kh + 1;
    ow_ = in.w - kw + 1;
    if (oh_ < 1 || ow_ < 1)
      throw std::invalid_argument("convolution kernel larger than input");
    k_ = in.c * kh * kw;
    w_ = MatrixXd::Zero(out_c, k_);
    b_ = MatrixXd::Zero(1, out_c);
    dw_ = MatrixXd::Zero(out_c, k_);
    db_ = MatrixXd::Zero(1, out_c);
  }

  void init(std::mt19937_64& rng) {
    w_ = uniform_init(out_c_, k_, std::sqrt(6.0 / k_), rng);
  }

  MatrixXd forward(const MatrixXd& x, bool) override {
    const Eigen::Index batch = x.rows();
    const int p = oh_ * ow_;
    cols_.assign(batch, MatrixXd(k_, p));
    MatrixXd y(batch, out_c_ * p);
    for (Eigen::Index s = 0; s < batch; ++s) {
      MatrixXd& m = cols_[s];
      for (int ic = 0; ic < in_.c; ++ic)
        for (int ki = 0; ki < kh_; ++ki)
          for (int kj = 0; kj < kw_; ++kj) {
            const int row = (ic * kh_ + ki) * kw_ + kj;
            for (int oy = 0; oy < oh_; ++oy)
              for (int ox = 0; ox < ow_; ++ox)
                m(row, oy * ow_ + ox) =
                    x(s, (ic * in_.h + oy + ki) * in_.w + ox + kj);
          }
      MatrixXd ys = w_ * m;
      ys.colwise() += b_.row(0).transpose();
      for (int oc = 0; oc < out_c_; ++oc)
        for (int q = 0; q < p; ++q) y(s, oc * p + q) = ys(oc, q);
    }
    return y;
  }

  MatrixXd backward(const MatrixXd& dy) override {
    const Eigen::Index batch = dy.rows();
    const int p = oh_ * ow_;
    MatrixXd dx = MatrixXd::Zero(batch, in_.size());
    MatrixXd dys(out_c_, p);
    for (Eigen::Index s = 0; s < batch; ++s) {
      for (int oc = 0; oc < out_c_; ++oc)
        for (int q = 0; q < p; ++q) dys(oc, q) = dy(s, oc * p + q);
      dw_ += dys * cols_[s].transpose();
      db_.row(0) += dys.rowwise().sum().transpose();
      MatrixXd dm = w_.transpose() * dys;
      for (int ic = 0; ic < in_.c; ++ic)
        for (int ki = 0; ki < kh_; ++ki)
          for (int kj = 0; kj < kw_; ++kj) {
            const int row = (ic * kh_ + ki) * kw_ + kj;
            for (int oy = 0; oy < oh_; ++oy)
              for (int ox = 0; ox < ow_; ++ox)
                dx(s, (ic * in_.h + oy + ki) * in_.w + ox + kj) +=
                    dm(row, oy * ow_ + ox);
          }
    }
    return dx;
  }

  std::vector<ParamRef> params() override {
    return {{"w", &w_, &dw_, true}, {"b", &b_, &db_, true}};
  }

  Shape out_shape() const override { return {out_c_, oh_, ow_}; }
  std::string kind() const override { return "conv"; }

  Shape in_;
  int out_c_, kh_, kw_, oh_, ow_, k_;
  MatrixXd w_, b_, dw_, db_;
  std::vector<MatrixXd> cols_;
};

// Six frozen linear probes of an n x n adjacency block: broadcasts of the
// start node's row and column, the target node's row and column, a pairwise
// degree map, and the overall edge density. Realized through stored constant
// matrices so the probes surface as (non-learnable) parameters.
class GraphFiltersLayer : public Layer {
 public:
  explicit GraphFiltersLayer(int n) : n_(n) {
    f_start_ = MatrixXd::Zero(n, n);
    f_start_.col(0).setOnes();  // ones * e0^T
    f_target_ = MatrixXd::Zero(n, n);
    f_target_.col(1).setOnes();  // ones * e1^T
    f_all_ = MatrixXd::Ones(n, n);
    zero_ = MatrixXd::Zero(n, n);
  }

  MatrixXd forward(const MatrixXd& x, bool) override {
    const Eigen::Index batch = x.rows();
    x_ = x;
    MatrixXd y(batch, 6 * n_ * n_);
    MatrixXd a(n_, n_);
    for (Eigen::Index s = 0; s < batch; ++s) {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a(i, j) = x(s, i * n_ + j);
      MatrixXd c[6];
      c[0] = f_start_ * a;                                 // start row, broadcast
      c[1] = a * f_start_.transpose();                     // start column
      c[2] = f_target_ * a;                                // target row
      c[3] = a * f_target_.transpose();                    // target column
      c[4] = (f_all_ * a + a * f_all_) / (2.0 * n_);       // pairwise degrees
      c[5] = (f_all_ * a * f_all_) / (double(n_) * n_);    // edge density
      for (int ch = 0; ch < 6; ++ch)
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j)
            y(s, (ch * n_ + i) * n_ + j) = c[ch](i, j);
    }
    return y;
  }

  MatrixXd backward(const MatrixXd& dy) override {
    const Eigen::Index batch = dy.rows();
    MatrixXd dx = MatrixXd::Zero(batch, n_ * n_);
    MatrixXd dc(n_, n_);
    for (Eigen::Index s = 0; s < batch; ++s) {
      MatrixXd da = MatrixXd::Zero(n_, n_);
      for (int ch = 0; ch < 6; ++ch) {
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) dc(i, j) = dy(s, (ch * n_ + i) * n_ + j);
        switch (ch) {
          case 0: da += f_start_.transpose() * dc; break;
          case 1: da += dc * f_start_; break;
          case 2: da += f_target_.transpose() * dc; break;
          case 3: da += dc * f_target_; break;
          case 4: da += (f_all_ * dc + dc * f_all_) / (2.0 * n_); break;
          case 5: da += (f_all_ * dc * f_all_) / (double(n_) * n_); break;
        }
      }
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) dx(s, i * n_ + j) = da(i, j);
    }
    return dx;
  }

  std::vector<ParamRef> params() override {
    // Frozen probes: exposed so gradients can be inspected, never updated.
    return {{"f_start", &f_start_, &zero_, false},
            {"f_target", &f_target_, &zero_, false},
            {"f_all", &f_all_, &zero_, false}};
  }

  Shape out_shape() const override { return {6, n_, n_}; }
  std::string kind() const override { return "graph_filters"; }

  int n_;
  MatrixXd f_start_, f_target_, f_all_, zero_, x_;
};

// Recombines the row/column probe pairs into symmetric and antisymmetric
// halves; for a symmetric adjacency the row and column broadcasts are
// transposes of each other, so this strips the redundant symmetric content
// into dedicated channels.
class SymmetrySplitLayer : public Layer {
 public:
  explicit SymmetrySplitLayer(Shape s) : shape_(s) {
    if (s.c != 6) throw std::invalid_argument("symmetry split expects 6 channels");
  }

  MatrixXd forward(const MatrixXd& x, bool) override { return apply(x); }
  MatrixXd backward(const MatrixXd& dy) override { return apply(dy); }

  Shape out_shape() const override { return shape_; }
  std::string kind() const override { return "symmetry_split"; }

 private:
  // The channel-pair map ((a+b)/2, (a-b)/2) is its own adjoint.
  MatrixXd apply(const MatrixXd& x) const {
    const int hw = shape_.h * shape_.w;
    MatrixXd y = x;
    for (int pair = 0; pair < 2; ++pair) {
      const int a = 2 * pair * hw, b = (2 * pair + 1) * hw;
      y.middleCols(a, hw) = 0.5 * (x.middleCols(a, hw) + x.middleCols(b, hw));
      y.middleCols(b, hw) = 0.5 * (x.middleCols(a, hw) - x.middleCols(b, hw));
    }
    return y;
  }

  Shape shape_;
};

void append_dense_stack(Model& m, Shape s, const std::vector<int>& widths,
                        std::mt19937_64& rng) {
  int in = s.size();
  for (std::size_t i = 0; i < widths.size(); ++i) {
    auto dense = std::make_unique<DenseLayer>(in, widths[i]);
    dense->init(rng);
    in = widths[i];
    Shape out = dense->out_shape();
    m.layers.push_back(std::move(dense));
    if (i + 1 < widths.size())
      m.layers.push_back(std::make_unique<ReluLayer>(out));
  }
}

// Adds valid 3x3 convolutions following the channel plan while the spatial
// size still fits a kernel; smaller inputs simply use fewer stages.
Shape append_conv_stack(Model& m, Shape s, const std::vector<int>& channels,
                        std::mt19937_64& rng) {
  for (int oc : channels) {
    if (s.h < 3 || s.w < 3) break;
    auto conv = std::make_unique<Conv2dLayer>(s, oc, 3, 3);
    conv->init(rng);
    s = conv->out_shape();
    m.layers.push_back(std::move(conv));
    m.layers.push_back(std::make_unique<ReluLayer>(s));
  }
  return s;
}

}  // namespace

std::vector<Example> to_examples(const std::vector<LabeledSample>& samples,
                                 int input_size) {
  std::vector<Example> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    AdjacencyMatrix a = pad_adjacency(s.adjacency, input_size);
    Example e;
    e.x.resize(input_size * input_size);
    for (int i = 0; i < input_size; ++i)
      for (int j = 0; j < input_size; ++j) e.x(i * input_size + j) = a(i, j);
    e.y = s.label;
    out.push_back(std::move(e));
  }
  return out;
}

Eigen::MatrixXd Model::forward(const Eigen::MatrixXd& x, bool training) {
  if (x.cols() != input_dim())
    throw std::invalid_argument("input has " + std::to_string(x.cols()) +
                                " features, model expects " +
                                std::to_string(input_dim()));
  MatrixXd h = x;
  for (auto& layer : layers) h = layer->forward(h, training);
  // Softmax over the two logits, shifted for stability.
  MatrixXd probs(h.rows(), h.cols());
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    const double m = h.row(r).maxCoeff();
    Eigen::RowVectorXd e = (h.row(r).array() - m).exp();
    probs.row(r) = e / e.sum();
  }
  return probs;
}

void Model::backward(const Eigen::MatrixXd& dlogits) {
  MatrixXd g = dlogits;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it)
    g = (*it)->backward(g);
}

std::vector<ParamRef> Model::params() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (auto p : layers[i]->params()) {
      p.name = "layer" + std::to_string(i) + "." + p.name;
      out.push_back(p);
    }
  }
  return out;
}

void Model::zero_grad() {
  for (auto& p : params())
    if (p.trainable) p.grad->setZero();
}

Model build_model(Arch arch, int n, std::uint64_t rng_seed) {
  if (n < 3) throw std::invalid_argument("model input size must be at least 3");
  Model m;
  m.arch = arch;
  m.n = n;
  m.init_seed = rng_seed;
  auto rng = make_rng(rng_seed);
  Shape s{1, n, n};

  if (arch == Arch::FC) {
    append_dense_stack(m, s, {10, 10, 10, 2}, rng);
    return m;
  }
  if (arch == Arch::CNN) {
    s = append_conv_stack(m, s, {n, 10, 10, 10}, rng);
    m.layers.push_back(
        std::make_unique<DropoutLayer>(0.2, s, derive_seed(rng_seed, 0xd70)));
    append_dense_stack(m, s, {10, 10, 10, 2}, rng);
    return m;
  }
  // CQCNN: frozen probes, symmetry recombination, two learnable 3x3 stages,
  // 1x1 channel compression, then a short dense head.
  m.layers.push_back(std::make_unique<GraphFiltersLayer>(n));
  s = {6, n, n};
  m.layers.push_back(std::make_unique<SymmetrySplitLayer>(s));
  s = append_conv_stack(m, s, {10, 10}, rng);
  auto squeeze = std::make_unique<Conv2dLayer>(s, 4, 1, 1);
  squeeze->init(rng);
  s = squeeze->out_shape();
  m.layers.push_back(std::move(squeeze));
  m.layers.push_back(std::make_unique<ReluLayer>(s));
  append_dense_stack(m, s, {10, 2}, rng);
  return m;
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels) {
  if (probs.rows() != static_cast<Eigen::Index>(labels.size()))
    throw std::invalid_argument("probability/label count mismatch");
  double loss = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r)
    loss -= std::log(std::max(probs(r, labels[r]), 1e-15));
  return loss / static_cast<double>(probs.rows());
}

namespace {

MatrixXd pack_batch(const std::vector<Example>& data,
                    const std::vector<std::size_t>& order, std::size_t lo,
                    std::size_t hi) {
  MatrixXd x(hi - lo, data[0].x.size());
  for (std::size_t r = lo; r < hi; ++r) x.row(r - lo) = data[order[r]].x;
  return x;
}

int argmax2(const Eigen::MatrixXd& probs, Eigen::Index row) {
  return probs(row, 1) > probs(row, 0) ? 1 : 0;
}

}  // namespace

TrainingCurves train_model(Model& model, const std::vector<Example>& train,
                           const TrainConfig& cfg,
                           const std::vector<Example>* eval_set) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  if (cfg.learning_rate <= 0.0 || cfg.batch_size < 1 || cfg.epochs < 1)
    throw std::invalid_argument("training hyperparameters must be positive");

  auto shuffle_rng = make_rng(derive_seed(cfg.rng_seed, 0x5f));
  for (std::size_t i = 0; i < model.layers.size(); ++i)
    model.layers[i]->reseed(derive_seed(cfg.rng_seed, 0xd0 + i));

  auto prefs = model.params();
  std::vector<MatrixXd> m1, m2;
  if (cfg.optimizer == Optimizer::Adam) {
    for (const auto& p : prefs) {
      m1.push_back(MatrixXd::Zero(p.value->rows(), p.value->cols()));
      m2.push_back(MatrixXd::Zero(p.value->rows(), p.value->cols()));
    }
  }
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  long long adam_t = 0;

  const std::size_t count = train.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);

  TrainingCurves curves;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    long long correct = 0;
    for (std::size_t lo = 0; lo < count; lo += cfg.batch_size) {
      const std::size_t hi = std::min(count, lo + cfg.batch_size);
      const auto bsize = static_cast<Eigen::Index>(hi - lo);
      MatrixXd x = pack_batch(train, order, lo, hi);
      std::vector<int> labels(hi - lo);
      for (std::size_t r = lo; r < hi; ++r) labels[r - lo] = train[order[r]].y;

      MatrixXd probs = model.forward(x, true);
      const double loss = cross_entropy(probs, labels);
      if (!std::isfinite(loss))
        throw divergence_error("loss became non-finite in epoch " +
                                   std::to_string(epoch),
                               epoch);
      epoch_loss += loss * static_cast<double>(bsize);
      for (Eigen::Index r = 0; r < bsize; ++r)
        if (argmax2(probs, r) == labels[r]) ++correct;

      MatrixXd dlogits = probs;
      for (Eigen::Index r = 0; r < bsize; ++r) dlogits(r, labels[r]) -= 1.0;
      dlogits /= static_cast<double>(bsize);

      model.zero_grad();
      model.backward(dlogits);

      if (cfg.optimizer == Optimizer::Sgd) {
        for (auto& p : prefs)
          if (p.trainable) *p.value -= cfg.learning_rate * *p.grad;
      } else {
        ++adam_t;
        const double c1 = 1.0 - std::pow(beta1, adam_t);
        const double c2 = 1.0 - std::pow(beta2, adam_t);
        for (std::size_t k = 0; k < prefs.size(); ++k) {
          if (!prefs[k].trainable) continue;
          const MatrixXd& g = *prefs[k].grad;
          m1[k] = beta1 * m1[k] + (1.0 - beta1) * g;
          m2[k] = beta2 * m2[k] + (1.0 - beta2) * g.cwiseProduct(g);
          *prefs[k].value -=
              cfg.learning_rate *
              ((m1[k] / c1).array() / ((m2[k] / c2).array().sqrt() + adam_eps))
                  .matrix();
        }
      }
    }
    curves.train_loss.push_back(epoch_loss / static_cast<double>(count));
    curves.train_acc.push_back(static_cast<double>(correct) /
                               static_cast<double>(count));
    if (eval_set) {
      EvalReport rep = evaluate(model, *eval_set);
      curves.test_loss.push_back(rep.loss);
      curves.test_acc.push_back(rep.accuracy);
    }
  }
  return curves;
}

Metrics metrics_from_counts(long long tp, long long tn, long long fp, long long fn) {
  Metrics m;
  const long long total = tp + tn + fp + fn;
  m.accuracy = total > 0 ? double(tp + tn) / double(total) : 0.0;
  m.precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
  m.recall = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
  m.f1 = (2 * tp + fp + fn) > 0 ? 2.0 * double(tp) / double(2 * tp + fp + fn) : 0.0;
  return m;
}

EvalReport evaluate(Model& model, const std::vector<Example>& test) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  EvalReport rep;
  const std::size_t count = test.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  double loss_sum = 0.0;
  const std::size_t chunk = 256;
  for (std::size_t lo = 0; lo < count; lo += chunk) {
    const std::size_t hi = std::min(count, lo + chunk);
    MatrixXd x = pack_batch(test, order, lo, hi);
    std::vector<int> labels(hi - lo);
    for (std::size_t r = lo; r < hi; ++r) labels[r - lo] = test[r].y;
    MatrixXd probs = model.forward(x, false);
    loss_sum += cross_entropy(probs, labels) * static_cast<double>(hi - lo);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      const int pred = argmax2(probs, r);
      const int truth = labels[r];
      if (pred == 1 && truth == 1) ++rep.tp;
      else if (pred == 0 && truth == 0) ++rep.tn;
      else if (pred == 1 && truth == 0) ++rep.fp;
      else ++rep.fn;
    }
  }
  rep.loss = loss_sum / static_cast<double>(count);
  const Metrics pos1 = metrics_from_counts(rep.tp, rep.tn, rep.fp, rep.fn);
  const Metrics pos0 = metrics_from_counts(rep.tn, rep.tp, rep.fn, rep.fp);
  rep.accuracy = pos1.accuracy;
  rep.precision = {pos0.precision, pos1.precision};
  rep.recall = {pos0.recall, pos1.recall};
  rep.f1 = {pos0.f1, pos1.f1};
  return rep;
}

EvalStats summarize(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to summarize");
  const double n = static_cast<double>(reports.size());
  EvalStats st;
  auto acc = [&](auto field_of) {
    double mean = 0.0;
    for (const auto& r : reports) mean += field_of(r);
    mean /= n;
    double var = 0.0;
    for (const auto& r : reports) {
      const double d = field_of(r) - mean;
      var += d * d;
    }
    const double sd = reports.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return std::pair<double, double>(mean, sd);
  };
  std::tie(st.mean.accuracy, st.stddev.accuracy) =
      acc([](const EvalReport& r) { return r.accuracy; });
  std::tie(st.mean.loss, st.stddev.loss) =
      acc([](const EvalReport& r) { return r.loss; });
  for (int c = 0; c < 2; ++c) {
    std::tie(st.mean.precision[c], st.stddev.precision[c]) =
        acc([c](const EvalReport& r) { return r.precision[c]; });
    std::tie(st.mean.recall[c], st.stddev.recall[c]) =
        acc([c](const EvalReport& r) { return r.recall[c]; });
    std::tie(st.mean.f1[c], st.stddev.f1[c]) =
        acc([c](const EvalReport& r) { return r.f1[c]; });
  }
  for (const auto& r : reports) {
    st.mean.tp += r.tp;
    st.mean.tn += r.tn;
    st.mean.fp += r.fp;
    st.mean.fn += r.fn;
  }
  return st;
}

RepeatResult repeat_train_evaluate(Arch arch, int n,
                                   const std::vector<Example>& train,
                                   const std::vector<Example>& test,
                                   const TrainConfig& base, int repeats,
                                   int jobs) {
  if (repeats < 1) throw std::invalid_argument("repeats must be positive");
  RepeatResult out;
  out.reports.resize(repeats);
  out.curves.resize(repeats);
  parallel_for(repeats, jobs, [&](std::size_t r) {
    TrainConfig cfg = base;
    cfg.rng_seed = base.rng_seed + r;
    Model model = build_model(arch, n, cfg.rng_seed);
    out.curves[r] = train_model(model, train, cfg, &test);
    out.reports[r] = evaluate(model, test);
  });
  out.stats = summarize(out.reports);
  return out;
}

std::vector<EvalReport> generalization_sweep(
    Model& model, const std::vector<std::vector<LabeledSample>>& test_sets) {
  std::vector<EvalReport> out;
  out.reserve(test_sets.size());
  for (const auto& set : test_sets)
    out.push_back(evaluate(model, to_examples(set, model.n)));
  return out;
}

double gradient_check(Model& model, const Example& sample,
                      std::uint64_t rng_seed, int entries_per_tensor) {
  MatrixXd x(1, sample.x.size());
  x.row(0) = sample.x;
  const std::vector<int> labels{sample.y};

  auto loss_at = [&]() {
    return cross_entropy(model.forward(x, false), labels);
  };

  MatrixXd probs = model.forward(x, false);
  model.zero_grad();
  MatrixXd dlogits = probs;
  dlogits(0, sample.y) -= 1.0;
  model.backward(dlogits);

  auto prefs = model.params();
  std::vector<MatrixXd> analytic;
  analytic.reserve(prefs.size());
  for (const auto& p : prefs) analytic.push_back(*p.grad);

  auto rng = make_rng(rng_seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t k = 0; k < prefs.size(); ++k) {
    if (!prefs[k].trainable) continue;
    MatrixXd& value = *prefs[k].value;
    const Eigen::Index total = value.size();
    std::vector<Eigen::Index> picks;
    if (total <= static_cast<Eigen::Index>(entries_per_tensor)) {
      picks.resize(total);
      std::iota(picks.begin(), picks.end(), 0);
    } else {
      std::uniform_int_distribution<Eigen::Index> d(0, total - 1);
      for (int t = 0; t < entries_per_tensor; ++t) picks.push_back(d(rng));
    }
    for (Eigen::Index flat : picks) {
      double* slot = value.data() + flat;
      const double orig = *slot;
      *slot = orig + h;
      const double lp = loss_at();
      *slot = orig - h;
      const double lm = loss_at();
      *slot = orig;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = analytic[k](flat);
      const double rel =
          std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

std::string model_to_json(const Model& model) {
  json j;
  j["format"] = "qwadv-model";
  j["version"] = 1;
  j["arch"] = arch_name(model.arch);
  j["n"] = model.n;
  j["init_seed"] = model.init_seed;
  json layers = json::array();
  for (const auto& layer : model.layers) {
    json lj;
    lj["kind"] = layer->kind();
    if (auto* d = dynamic_cast<DenseLayer*>(layer.get())) {
      lj["in"] = d->in_;
      lj["out"] = d->out_;
      lj["w"] = matrix_to_json(d->w_);
      lj["b"] = matrix_to_json(d->b_);
    } else if (auto* c = dynamic_cast<Conv2dLayer*>(layer.get())) {
      lj["in_c"] = c->in_.c;
      lj["in_h"] = c->in_.h;
      lj["in_w"] = c->in_.w;
      lj["out_c"] = c->out_c_;
      lj["kh"] = c->kh_;
      lj["kw"] = c->kw_;
      lj["w"] = matrix_to_json(c->w_);
      lj["b"] = matrix_to_json(c->b_);
    } else if (auto* r = dynamic_cast<ReluLayer*>(layer.get())) {
      lj["c"] = r->shape_.c;
      lj["h"] = r->shape_.h;
      lj["w"] = r->shape_.w;
    } else if (auto* p = dynamic_cast<DropoutLayer*>(layer.get())) {
      lj["rate"] = p->rate_;
      lj["c"] = p->shape_.c;
      lj["h"] = p->shape_.h;
      lj["w"] = p->shape_.w;
    } else if (auto* g = dynamic_cast<GraphFiltersLayer*>(layer.get())) {
      lj["n"] = g->n_;
    } else if (auto* ss = dynamic_cast<SymmetrySplitLayer*>(layer.get())) {
      Shape sh = ss->out_shape();
      lj["c"] = sh.c;
      lj["h"] = sh.h;
      lj["w"] = sh.w;
    }
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

Model model_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "qwadv-model" || j.value("version", 0) != 1)
    throw std::invalid_argument("unrecognized model checkpoint format");
  Model m;
  m.arch = arch_from_name(j.at("arch").get<std::string>());
  m.n = j.at("n").get<int>();
  m.init_seed = j.at("init_seed").get<std::uint64_t>();
  for (const auto& lj : j.at("layers")) {
    const std::string kind = lj.at("kind").get<std::string>();
    if (kind == "dense") {
      auto d = std::make_unique<DenseLayer>(lj.at("in").get<int>(),
                                            lj.at("out").get<int>());
      d->w_ = matrix_from_json(lj.at("w"));
      d->b_ = matrix_from_json(lj.at("b"));
      m.layers.push_back(std::move(d));
    } else if (kind == "conv") {
      Shape in{lj.at("in_c").get<int>(), lj.at("in_h").get<int>(),
               lj.at("in_w").get<int>()};
      auto c = std::make_unique<Conv2dLayer>(in, lj.at("out_c").get<int>(),
                                             lj.at("kh").get<int>(),
                                             lj.at("kw").get<int>());
      c->w_ = matrix_from_json(lj.at("w"));
      c->b_ = matrix_from_json(lj.at("b"));
      m.layers.push_back(std::move(c));
    } else if (kind == "relu") {
      m.layers.push_back(std::make_unique<ReluLayer>(
          Shape{lj.at("c").get<int>(), lj.at("h").get<int>(), lj.at("w").get<int>()}));
    } else if (kind == "dropout") {
      m.layers.push_back(std::make_unique<DropoutLayer>(
          lj.at("rate").get<double>(),
          Shape{lj.at("c").get<int>(), lj.at("h").get<int>(), lj.at("w").get<int>()},
          derive_seed(m.init_seed, 0xd70)));
    } else if (kind == "graph_filters") {
      m.layers.push_back(std::make_unique<GraphFiltersLayer>(lj.at("n").get<int>()));
    } else if (kind == "symmetry_split") {
      m.layers.push_back(std::make_unique<SymmetrySplitLayer>(
          Shape{lj.at("c").get<int>(), lj.at("h").get<int>(), lj.at("w").get<int>()}));
    } else {
      throw std::invalid_argument("unknown layer kind: " + kind);
    }
  }
  return m;
}

void save_model(const Model& model, const std::string& path) {
  write_file(path, model_to_json(model));
}

Model load_model(const std::string& path) {
  return model_from_json(read_file(path));
}

std::string curves_to_csv(const std::vector<TrainingCurves>& runs) {
  if (runs.empty() || runs.front().test_acc.empty())
    throw std::invalid_argument("no test curves recorded");
  const std::size_t epochs = runs.front().test_acc.size();
  for (const auto& r : runs)
    if (r.test_acc.size() != epochs || r.test_loss.size() != epochs)
      throw std::invalid_argument("runs disagree on epoch count");
  std::ostringstream ss;
  const bool multi = runs.size() > 1;
  ss << "epoch,test_acc,test_loss";
  if (multi) ss << ",test_acc_std,test_loss_std";
  ss << '\n';
  const double n = static_cast<double>(runs.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    double am = 0.0, lm = 0.0;
    for (const auto& r : runs) {
      am += r.test_acc[e];
      lm += r.test_loss[e];
    }
    am /= n;
    lm /= n;
    ss << (e + 1) << ',' << am << ',' << lm;
    if (multi) {
      double av = 0.0, lv = 0.0;
      for (const auto& r : runs) {
        av += (r.test_acc[e] - am) * (r.test_acc[e] - am);
        lv += (r.test_loss[e] - lm) * (r.test_loss[e] - lm);
      }
      ss << ',' << std::sqrt(av / (n - 1.0)) << ',' << std::sqrt(lv / (n - 1.0));
    }
    ss << '\n';
  }
  return ss.str();
}

const char* arch_name(Arch a) {
  switch (a) {
    case Arch::FC: return "fc";
    case Arch::CNN: return "cnn";
    case Arch::CQCNN: return "cqcnn";
  }
  return "fc";
}

Arch arch_from_name(const std::string& name) {
  if (name == "fc") return Arch::FC;
  if (name == "cnn") return Arch::CNN;
  if (name == "cqcnn") return Arch::CQCNN;
  throw std::invalid_argument("unknown architecture: " + name);
}

const char* optimizer_name(Optimizer o) {
  return o == Optimizer::Sgd ? "sgd" : "adam";
}

Optimizer optimizer_from_name(const std::string& name) {
  if (name == "sgd") return Optimizer::Sgd;
  if (name == "adam") return Optimizer::Adam;
  throw std::invalid_argument("unknown optimizer: " + name);
}

}  // namespace qwadv
