#include "bdcopy/students.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace bdcopy {

using nlohmann::json;

int epochs_for(Index n) {
  if (n < 2) throw InvalidArgument("epochs_for: dataset size must be >= 2");
  const double exponent = 1.0 - std::log10(static_cast<double>(n)) / 3.0;
  // The guard keeps exact anchors such as n = 10^6 (5 epochs) from truncating
  // down when the power lands one ulp short of an integer.
  const double epochs = 100.0 * std::pow(20.0, exponent) + 1e-9;
  return std::max(1, static_cast<int>(epochs));
}

void GbrtSpec::validate() const {
  if (n_stages < 1) throw InvalidArgument("gbrt: n_stages must be >= 1");
  if (max_leaves < 2) throw InvalidArgument("gbrt: max_leaves must be >= 2");
  if (min_samples_leaf < 1) throw InvalidArgument("gbrt: min_samples_leaf must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("gbrt: learning_rate must be > 0");
}

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  std::size_t node = 0;
  while (feature[node] >= 0) {
    node = static_cast<std::size_t>(x[feature[node]] <= threshold[node] ? left[node] : right[node]);
  }
  return value[node];
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count(feature.begin(), feature.end(), -1));
}

VectorXd GbrtModel::predict(const PointsRef& points) const {
  require_dim(points.cols(), input_dim, "gbrt predict");
  VectorXd out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) {
    // Same accumulation order as training, so training losses are reproducible.
    double value = base;
    for (const auto& tree : trees) value += learning_rate * tree.predict(points.row(i));
    out[i] = value;
  }
  return out;
}

namespace {

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

/// Best SSE-reducing split of `rows`; feature == -1 when none satisfies the
/// leaf-size constraint with positive gain. Ties keep the lowest feature, then
/// the lowest threshold.
SplitCandidate best_split(const PointsRef& x, const VectorXd& residual,
                          const std::vector<Index>& rows, Index min_leaf) {
  SplitCandidate best;
  const auto n = static_cast<Index>(rows.size());
  if (n < 2 * min_leaf) return best;
  double total = 0.0;
  for (Index r : rows) total += residual[r];
  const double parent = total * total / static_cast<double>(n);

  std::vector<Index> sorted = rows;
  for (Index f = 0; f < x.cols(); ++f) {
    std::stable_sort(sorted.begin(), sorted.end(), [&](Index a, Index b) { return x(a, f) < x(b, f); });
    double left_sum = 0.0;
    for (Index i = 1; i < n; ++i) {
      left_sum += residual[sorted[static_cast<std::size_t>(i - 1)]];
      if (i < min_leaf || n - i < min_leaf) continue;
      const double lo = x(sorted[static_cast<std::size_t>(i - 1)], f);
      const double hi = x(sorted[static_cast<std::size_t>(i)], f);
      if (!(lo < hi)) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(i) +
                          right_sum * right_sum / static_cast<double>(n - i) - parent;
      if (gain > best.gain) {
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi)) mid = lo;
        best = {gain, static_cast<int>(f), mid};
      }
    }
  }
  return best;
}

RegressionTree fit_tree(const PointsRef& x, const VectorXd& residual, const GbrtSpec& spec) {
  RegressionTree tree;
  std::vector<std::vector<Index>> members;
  std::vector<SplitCandidate> pending;

  auto add_leaf = [&](std::vector<Index> rows) {
    double sum = 0.0;
    for (Index r : rows) sum += residual[r];
    tree.feature.push_back(-1);
    tree.threshold.push_back(0.0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.value.push_back(rows.empty() ? 0.0 : sum / static_cast<double>(rows.size()));
    pending.push_back(best_split(x, residual, rows, spec.min_samples_leaf));
    members.push_back(std::move(rows));
  };

  std::vector<Index> all(static_cast<std::size_t>(x.rows()));
  std::iota(all.begin(), all.end(), Index{0});
  add_leaf(std::move(all));

  std::size_t leaves = 1;
  while (leaves < static_cast<std::size_t>(spec.max_leaves)) {
    // Best-first: expand the leaf with the largest gain, earliest node on ties.
    std::size_t chosen = pending.size();
    for (std::size_t node = 0; node < pending.size(); ++node) {
      if (tree.feature[node] != -1 || pending[node].feature < 0) continue;
      if (chosen == pending.size() || pending[node].gain > pending[chosen].gain) chosen = node;
    }
    if (chosen == pending.size()) break;

    const SplitCandidate split = pending[chosen];
    std::vector<Index> left_rows;
    std::vector<Index> right_rows;
    for (Index r : members[chosen]) {
      (x(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    members[chosen].clear();
    members[chosen].shrink_to_fit();
    tree.feature[chosen] = split.feature;
    tree.threshold[chosen] = split.threshold;
    tree.left[chosen] = static_cast<int>(tree.feature.size());
    add_leaf(std::move(left_rows));
    tree.right[chosen] = static_cast<int>(tree.feature.size());
    add_leaf(std::move(right_rows));
    ++leaves;
  }
  return tree;
}

json mlp_to_json(const Mlp<double>& net) {
  return {{"kind", "mlp"},
          {"input_dim", net.input_dim()},
          {"widths", net.widths()},
          {"parameters", std::vector<double>(net.parameters().data(),
                                             net.parameters().data() + net.parameter_count())}};
}

json gbrt_to_json(const GbrtModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) {
    trees.push_back({{"feature", t.feature},
                     {"threshold", t.threshold},
                     {"left", t.left},
                     {"right", t.right},
                     {"value", t.value}});
  }
  return {{"kind", "gbrt"},
          {"input_dim", model.input_dim},
          {"base", model.base},
          {"learning_rate", model.learning_rate},
          {"trees", std::move(trees)}};
}

}  // namespace

std::string StudentModel::kind() const { return mlp() ? "mlp" : "gbrt"; }

Index StudentModel::input_dim() const {
  return std::visit(
      [](const auto& m) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GbrtModel>) {
          return m.input_dim;
        } else {
          return m.input_dim();
        }
      },
      model_);
}

VectorXd StudentModel::predict_values(const PointsRef& points) const {
  if (points.rows() == 0) return VectorXd();
  return std::visit([&](const auto& m) -> VectorXd { return m.predict(points); }, model_);
}

LabelVector StudentModel::classify(const PointsRef& points) const {
  return labels_from_values(predict_values(points));
}

LabelVector labels_from_values(const Eigen::Ref<const VectorXd>& values) {
  LabelVector out(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) out[static_cast<std::size_t>(i)] = sign_label(values[i]);
  return out;
}

json StudentModel::to_json() const {
  json body = mlp() ? mlp_to_json(*mlp()) : gbrt_to_json(*gbrt());
  body["format"] = "bdcopy-student";
  body["version"] = 1;
  return body;
}

StudentModel StudentModel::from_json(const json& doc) {
  try {
    if (doc.value("format", "") != "bdcopy-student") throw InvalidArgument("model: not a bdcopy-student document");
    if (doc.at("version").get<int>() != 1) throw InvalidArgument("model: unsupported version");
    const std::string kind = doc.at("kind").get<std::string>();
    const auto input_dim = doc.at("input_dim").get<Index>();
    if (kind == "mlp") {
      Mlp<double> net(input_dim, doc.at("widths").get<std::vector<Index>>());
      const auto params = doc.at("parameters").get<std::vector<double>>();
      net.set_parameters(Eigen::Map<const VectorXd>(params.data(), static_cast<Index>(params.size())));
      return StudentModel(std::move(net));
    }
    if (kind == "gbrt") {
      GbrtModel model;
      model.input_dim = input_dim;
      model.base = doc.at("base").get<double>();
      model.learning_rate = doc.at("learning_rate").get<double>();
      for (const auto& t : doc.at("trees")) {
        RegressionTree tree;
        t.at("feature").get_to(tree.feature);
        t.at("threshold").get_to(tree.threshold);
        t.at("left").get_to(tree.left);
        t.at("right").get_to(tree.right);
        t.at("value").get_to(tree.value);
        const std::size_t nodes = tree.feature.size();
        if (nodes == 0 || tree.threshold.size() != nodes || tree.left.size() != nodes ||
            tree.right.size() != nodes || tree.value.size() != nodes) {
          throw InvalidArgument("model: inconsistent tree arrays");
        }
        for (std::size_t i = 0; i < nodes; ++i) {
          if (tree.feature[i] < 0) continue;
          if (tree.feature[i] >= input_dim || tree.left[i] <= static_cast<int>(i) ||
              tree.right[i] <= static_cast<int>(i) || tree.left[i] >= static_cast<int>(nodes) ||
              tree.right[i] >= static_cast<int>(nodes)) {
            throw InvalidArgument("model: malformed tree node");
          }
        }
        model.trees.push_back(std::move(tree));
      }
      return StudentModel(std::move(model));
    }
    throw InvalidArgument("model: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("model: ") + e.what());
  }
}

void StudentModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json().dump() << '\n';
}

StudentModel StudentModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return from_json(doc);
}

TrainedStudent train_mlp(const PointsRef& points, const Eigen::Ref<const VectorXd>& targets,
                         const MlpSpec& spec, const TrainConfig& cfg, const Deadline& deadline) {
  const Index n = points.rows();
  if (n == 0) throw InvalidArgument("train_mlp: empty dataset");
  if (targets.size() != n) throw InvalidArgument("train_mlp: target count mismatch");
  if (!targets.allFinite()) throw InvalidArgument("train_mlp: non-finite target");
  if (!(cfg.learning_rate > 0.0) || cfg.batch_size < 1) {
    throw InvalidArgument("train_mlp: learning rate and batch size must be positive");
  }
  const int epochs = cfg.epochs ? *cfg.epochs : epochs_for(n);
  if (epochs < 1) throw InvalidArgument("train_mlp: epochs must be >= 1");

  auto net = Mlp<double>::he_uniform(points.cols(), spec.widths, spec.init_seed);
  Adam<double> adam(net.parameter_count(), cfg.learning_rate);
  Rng rng(cfg.shuffle_seed, 0x5bff1e);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  TrainedStudent result;
  PointMatrix batch_x;
  VectorXd batch_y;
  VectorXd grad;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    deadline.check("training");
    rng.shuffle(order);
    double epoch_sum = 0.0;
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index size = std::min(cfg.batch_size, n - start);
      batch_x.resize(size, points.cols());
      batch_y.resize(size);
      for (Index k = 0; k < size; ++k) {
        const Index row = order[static_cast<std::size_t>(start + k)];
        batch_x.row(k) = points.row(row);
        batch_y[k] = targets[row];
      }
      const double loss = net.loss_and_gradient(batch_x, batch_y, grad);
      epoch_sum += loss * static_cast<double>(size);
      adam.step(net.parameters(), grad);
    }
    const double epoch_loss = epoch_sum / static_cast<double>(n);
    if (!std::isfinite(epoch_loss) || !net.parameters().allFinite()) throw TrainingDiverged(epoch);
    result.loss_trace.push_back(epoch_loss);
  }
  result.model = StudentModel(std::move(net));
  return result;
}

TrainedStudent train_gbrt(const PointsRef& points, const Eigen::Ref<const VectorXd>& targets,
                          const GbrtSpec& spec, const Deadline& deadline) {
  spec.validate();
  const Index n = points.rows();
  if (n == 0) throw InvalidArgument("train_gbrt: empty dataset");
  if (targets.size() != n) throw InvalidArgument("train_gbrt: target count mismatch");
  if (n < spec.min_samples_leaf) throw InvalidArgument("train_gbrt: fewer samples than min_samples_leaf");
  if (!targets.allFinite()) throw InvalidArgument("train_gbrt: non-finite target");

  GbrtModel model;
  model.input_dim = points.cols();
  model.learning_rate = spec.learning_rate;
  model.base = targets.mean();

  TrainedStudent result;
  VectorXd prediction = VectorXd::Constant(n, model.base);
  VectorXd residual = targets - prediction;
  for (int stage = 0; stage < spec.n_stages; ++stage) {
    deadline.check("training");
    RegressionTree tree = fit_tree(points, residual, spec);
    for (Index i = 0; i < n; ++i) prediction[i] += spec.learning_rate * tree.predict(points.row(i));
    residual = targets - prediction;
    result.loss_trace.push_back(residual.squaredNorm() / static_cast<double>(n));
    model.trees.push_back(std::move(tree));
  }
  result.model = StudentModel(std::move(model));
  return result;
}

}  // namespace bdcopy
