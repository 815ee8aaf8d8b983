#include "ordcollab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ordcollab/error.hpp"

namespace ordcollab {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train epochs must be >= 1");
  if (!(batch_fraction > 0.0 && batch_fraction <= 1.0))
    throw ConfigError("train batch_fraction must lie in (0, 1]");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("train learning_rate must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw ConfigError("Adam epsilon must be > 0");
  if (!(plateau.min_lr > 0.0)) throw ConfigError("plateau min_lr must be > 0");
  if (!(plateau.factor > 0.0 && plateau.factor < 1.0))
    throw ConfigError("plateau factor must lie in (0, 1)");
  if (plateau.patience < 1) throw ConfigError("plateau patience must be >= 1");
  if (!(plateau.min_delta >= 0.0)) throw ConfigError("plateau min_delta must be >= 0");
}

std::size_t TrainConfig::batch_size(std::size_t n) const {
  const auto b = static_cast<std::size_t>(std::ceil(batch_fraction * static_cast<double>(n) - 1e-9));
  return std::max<std::size_t>(1, b);
}

PlateauScheduler::PlateauScheduler(PlateauConfig cfg, double initial_lr)
    : cfg_(cfg), lr_(initial_lr), best_(std::numeric_limits<double>::infinity()) {}

double PlateauScheduler::step(double loss) {
  if (loss < best_ - cfg_.min_delta) {
    best_ = loss;
    wait_ = 0;
    return lr_;
  }
  if (++wait_ >= cfg_.patience) {
    lr_ = std::max(lr_ * cfg_.factor, cfg_.min_lr);
    wait_ = 0;
  }
  return lr_;
}

template <typename Scalar>
RowMatrix<Scalar> feature_matrix(const Dataset& data) {
  RowMatrix<Scalar> x(static_cast<Eigen::Index>(data.size()),
                      static_cast<Eigen::Index>(data.dimension()));
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto& f = data.samples[r].features;
    if (f.size() != data.dimension()) throw DataError("sample feature dimension mismatch");
    for (std::size_t c = 0; c < f.size(); ++c)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<Scalar>(f[c]);
  }
  return x;
}

template <typename Scalar>
RowMatrix<Scalar> label_matrix(const Dataset& data) {
  RowMatrix<Scalar> y(static_cast<Eigen::Index>(data.size()), kNumClasses);
  for (std::size_t r = 0; r < data.size(); ++r)
    for (std::size_t c = 0; c < kNumClasses; ++c)
      y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          static_cast<Scalar>(data.samples[r].label[c]);
  return y;
}

template <typename Scalar>
double evaluate_loss(const Mlp<Scalar>& model, const Dataset& data, LossKind kind) {
  if (data.empty()) throw DataError("evaluate_loss: empty dataset");
  auto p = model.predict(feature_matrix<Scalar>(data));
  return batch_loss<Scalar>(kind, p, label_matrix<Scalar>(data), {}, nullptr);
}

template <typename Scalar>
std::vector<std::size_t> predict_labels(const Mlp<Scalar>& model, const Dataset& data) {
  std::vector<std::size_t> out;
  if (data.empty()) return out;
  auto p = model.predict(feature_matrix<Scalar>(data));
  out.reserve(data.size());
  for (Eigen::Index r = 0; r < p.rows(); ++r)
    out.push_back(argmax(std::span<const Scalar>(p.row(r).data(), kNumClasses)));
  return out;
}

namespace {

template <typename Scalar>
struct AdamState {
  using Layer = typename Mlp<Scalar>::Layer;
  std::vector<Layer> m, v;
  std::size_t step = 0;

  explicit AdamState(const Mlp<Scalar>& model) {
    for (const auto& l : model.layers()) {
      m.push_back(Layer{decltype(l.weights)::Zero(l.weights.rows(), l.weights.cols()),
                        decltype(l.bias)::Zero(l.bias.size())});
      v.push_back(m.back());
    }
  }

  template <typename Param, typename Grad>
  static void update(Param& param, const Grad& grad, Param& m1, Param& m2, Scalar b1, Scalar b2,
                     Scalar step_size, Scalar eps_hat) {
    m1 = b1 * m1 + (Scalar(1) - b1) * grad;
    m2 = b2 * m2 + (Scalar(1) - b2) * grad.cwiseProduct(grad);
    param.array() -= step_size * m1.array() / (m2.array().sqrt() + eps_hat);
  }

  void apply(Mlp<Scalar>& model, const std::vector<Layer>& grads, const AdamConfig& cfg,
             double lr) {
    ++step;
    const double t = static_cast<double>(step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    // Bias-corrected update folded into the step size:
    // theta -= lr * m_hat / (sqrt(v_hat) + eps)
    const auto step_size = static_cast<Scalar>(lr * std::sqrt(c2) / c1);
    const auto eps_hat = static_cast<Scalar>(cfg.epsilon * std::sqrt(c2));
    const auto b1 = static_cast<Scalar>(cfg.beta1);
    const auto b2 = static_cast<Scalar>(cfg.beta2);
    auto& layers = model.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weights, grads[l].weights, m[l].weights, v[l].weights, b1, b2, step_size,
             eps_hat);
      update(layers[l].bias, grads[l].bias, m[l].bias, v[l].bias, b1, b2, step_size, eps_hat);
    }
  }
};

}  // namespace

template <typename Scalar>
TrainedModel<Scalar> train(Mlp<Scalar> model, const Dataset& train_set, const Dataset& test_set,
                           const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  if (test_set.empty()) throw DataError("train: empty test set");
  if (train_set.dimension() != model.shape().input_dim ||
      test_set.dimension() != model.shape().input_dim)
    throw DataError("train: dataset dimension does not match model input_dim");

  const auto x_all = feature_matrix<Scalar>(train_set);
  const auto y_all = label_matrix<Scalar>(train_set);
  const auto x_test = feature_matrix<Scalar>(test_set);
  const auto y_test = label_matrix<Scalar>(test_set);

  std::vector<double> sample_weights;
  if (cfg.class_balancing) {
    const auto w = class_balance_weights(train_set);
    for (const auto& s : train_set.samples) sample_weights.push_back(w[s.label_index()]);
  }

  const std::size_t n = train_set.size();
  const std::size_t batch = cfg.batch_size(n);
  const auto dim = x_all.cols();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  AdamState<Scalar> adam(model);
  PlateauScheduler scheduler(cfg.plateau, cfg.adam.learning_rate);
  TrainedModel<Scalar> result;
  result.best = model;
  result.best_test_loss = std::numeric_limits<double>::infinity();
  result.history.reserve(cfg.epochs);

  RowMatrix<Scalar> xb, yb, dlogits;
  std::vector<double> wb;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = scheduler.learning_rate();
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < n; begin += batch, ++batch_index) {
      const std::size_t end = std::min(n, begin + batch);
      const auto rows = static_cast<Eigen::Index>(end - begin);
      xb.resize(rows, dim);
      yb.resize(rows, kNumClasses);
      wb.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = static_cast<Eigen::Index>(i - begin);
        const auto src = static_cast<Eigen::Index>(order[i]);
        xb.row(r) = x_all.row(src);
        yb.row(r) = y_all.row(src);
        if (!sample_weights.empty()) wb.push_back(sample_weights[order[i]]);
      }
      auto pass = model.forward(xb, &rng);
      const double value = batch_loss<Scalar>(cfg.loss, pass.probabilities, yb, wb, &dlogits);
      if (!std::isfinite(value))
        throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch + 1) +
                            ", batch " + std::to_string(batch_index + 1));
      epoch_loss += value * static_cast<double>(rows);
      adam.apply(model, model.backward(pass, dlogits), cfg.adam, lr);
    }

    const double test_loss =
        batch_loss<Scalar>(cfg.loss, model.predict(x_test), y_test, {}, nullptr);
    if (!std::isfinite(test_loss))
      throw TrainingError("non-finite test loss at epoch " + std::to_string(epoch + 1));
    result.history.push_back(EpochRecord{epoch_loss / static_cast<double>(n), test_loss, lr});
    if (test_loss < result.best_test_loss) {
      result.best_test_loss = test_loss;
      result.best_epoch = epoch;
      result.best = model;
    }
    scheduler.step(test_loss);
  }
  return result;
}

#define ORDCOLLAB_INSTANTIATE(S)                                                              \
  template RowMatrix<S> feature_matrix<S>(const Dataset&);                                    \
  template RowMatrix<S> label_matrix<S>(const Dataset&);                                      \
  template double evaluate_loss<S>(const Mlp<S>&, const Dataset&, LossKind);                  \
  template std::vector<std::size_t> predict_labels<S>(const Mlp<S>&, const Dataset&);         \
  template TrainedModel<S> train<S>(Mlp<S>, const Dataset&, const Dataset&, const TrainConfig&, \
                                    Rng&);

ORDCOLLAB_INSTANTIATE(float)
ORDCOLLAB_INSTANTIATE(double)

#undef ORDCOLLAB_INSTANTIATE

}  // namespace ordcollab
