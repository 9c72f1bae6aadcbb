#pragma once

#include "bdcopy/core.hpp"
#include "bdcopy/mlp.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bdcopy {

/// Thrown when a training loss turns NaN or infinite.
struct TrainingDiverged : std::runtime_error {
  explicit TrainingDiverged(int epoch_index)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch_index)),
        epoch(epoch_index) {}
  int epoch;
};

/// Epoch count that shrinks with the synthetic set size:
/// int(100 * 20^(1 - log_1000 n)), at least 1. 100 at n = 1000, 5 at n = 10^6.
int epochs_for(Index n);

struct MlpSpec {
  /// Every layer's output size, ending in 1; {32, 16, 1} is the small copy.
  std::vector<Index> widths{32, 16, 1};
  std::uint64_t init_seed = 0;
};

struct TrainConfig {
  double learning_rate = 0.001;
  Index batch_size = 32;
  /// Unset means epochs_for(dataset size).
  std::optional<int> epochs;
  std::uint64_t shuffle_seed = 0;
};

struct GbrtSpec {
  int n_stages = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  Index min_samples_leaf = 20;

  void validate() const;
};

/// Binary regression tree stored as parallel node arrays. Internal nodes send
/// x[feature] <= threshold to the left child; leaves have feature == -1.
struct RegressionTree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  std::size_t leaf_count() const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

/// Least-squares gradient boosting: base + learning_rate * sum of trees.
struct GbrtModel {
  Index input_dim = 0;
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;

  VectorXd predict(const PointsRef& points) const;
  friend bool operator==(const GbrtModel&, const GbrtModel&) = default;
};

/// A trained copy: real-valued regressor whose sign is the copied label.
class StudentModel {
 public:
  StudentModel() = default;
  explicit StudentModel(Mlp<double> mlp) : model_(std::move(mlp)) {}
  explicit StudentModel(GbrtModel gbrt) : model_(std::move(gbrt)) {}

  std::string kind() const;
  Index input_dim() const;

  VectorXd predict_values(const PointsRef& points) const;
  /// +1 where the predicted value is >= 0.
  LabelVector classify(const PointsRef& points) const;

  const Mlp<double>* mlp() const { return std::get_if<Mlp<double>>(&model_); }
  const GbrtModel* gbrt() const { return std::get_if<GbrtModel>(&model_); }

  nlohmann::json to_json() const;
  static StudentModel from_json(const nlohmann::json& doc);
  void save(const std::string& path) const;
  static StudentModel load(const std::string& path);

  friend bool operator==(const StudentModel&, const StudentModel&) = default;

 private:
  std::variant<Mlp<double>, GbrtModel> model_;
};

struct TrainedStudent {
  StudentModel model;
  /// Mean training loss per epoch (MSE for the MLP, per stage for GBRT).
  std::vector<double> loss_trace;
};

TrainedStudent train_mlp(const PointsRef& points, const Eigen::Ref<const VectorXd>& targets,
                         const MlpSpec& spec, const TrainConfig& cfg, const Deadline& deadline = {});

TrainedStudent train_gbrt(const PointsRef& points, const Eigen::Ref<const VectorXd>& targets,
                          const GbrtSpec& spec, const Deadline& deadline = {});

inline VectorXd predict_values(const StudentModel& model, const PointsRef& points) {
  return model.predict_values(points);
}
inline LabelVector predict_labels(const StudentModel& model, const PointsRef& points) {
  return model.classify(points);
}

/// Sign convention applied elementwise.
LabelVector labels_from_values(const Eigen::Ref<const VectorXd>& values);

}  // namespace bdcopy
