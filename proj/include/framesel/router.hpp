#pragma once

// Question-type routing: a bag-of-words multinomial logistic regression
// predicts the question type, and a table fitted on validation accuracies
// maps each type to the preset that scored best for it.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framesel/selector.hpp"

namespace framesel {

// plotQA, needle, ego, count, order, anomaly_reco, topic_reasoning
const std::vector<std::string>& default_question_types();

// Lowercase ASCII, split on anything that is not [a-z0-9]. Bytes >= 0x80 are
// separators.
std::vector<std::string> tokenize(std::string_view text);

struct LabeledQuestion {
  std::string type;
  std::string text;
};

class QuestionTypeModel {
 public:
  QuestionTypeModel() = default;
  // weights: types.size() rows of vocabulary.size() + 1 columns, row-major,
  // last column is the bias.
  QuestionTypeModel(std::vector<std::string> types, std::map<std::string, std::size_t> vocabulary,
                    std::vector<double> weights);

  const std::vector<std::string>& types() const noexcept { return types_; }
  const std::map<std::string, std::size_t>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t columns() const noexcept { return vocabulary_.size() + 1; }

  // Raw class scores; unknown tokens are ignored.
  std::vector<double> scores(std::string_view text) const;

 private:
  std::vector<std::string> types_;
  std::map<std::string, std::size_t> vocabulary_;
  std::vector<double> weights_;
};

std::vector<double> softmax(std::span<const double> scores);

struct TrainOptions {
  std::size_t epochs = 10;
  double learning_rate = 10.0;
  std::uint64_t seed = 0;
  bool shuffle = false;
};

struct TrainResult {
  QuestionTypeModel model;
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;  // mean cross-entropy after each epoch
  double final_learning_rate = 0.0;
};

// Full-batch gradient descent on mean cross-entropy from zero weights. A step
// that would raise the loss is retried at half the learning rate, so the loss
// never increases between epochs.
TrainResult train_classifier(const std::vector<LabeledQuestion>& examples,
                             const std::vector<std::string>& types = default_question_types(),
                             TrainOptions options = {});

struct Prediction {
  std::size_t index = 0;
  std::string type;
  std::vector<double> probabilities;
};

Prediction predict_type(const QuestionTypeModel& model, std::string_view text);

struct Evaluation {
  std::size_t correct = 0;
  std::size_t total = 0;
  // confusion[truth][predicted], indexed like model.types().
  std::vector<std::vector<std::size_t>> confusion;

  double accuracy() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

Evaluation evaluate(const QuestionTypeModel& model, const std::vector<LabeledQuestion>& examples);

// type -> preset -> validation accuracy
using AccuracyTable = std::map<std::string, std::map<PresetName, double>>;

struct RoutingTable {
  std::map<std::string, PresetName> mapping;
  AccuracyTable provenance;
};

// Row-wise argmax; ties resolve to the earliest preset in kPresetOrder.
// Throws IncompleteTable if a row lacks one of the four presets, Parameter
// for accuracies outside [0, 1].
RoutingTable fit_routing(const AccuracyTable& table);

// Oracle routing: the caller supplies the type. Throws RoutingGap if absent.
Preset route_type(const RoutingTable& table, const std::string& type,
                  double lambda = kDefaultLambda);

Preset route(const QuestionTypeModel& model, const RoutingTable& table, std::string_view text,
             double lambda = kDefaultLambda);

// type<TAB>question per line; blank lines skipped.
std::vector<LabeledQuestion> parse_training_tsv(std::string_view content);
// Header must name `type` and the four presets.
AccuracyTable parse_accuracy_csv(std::string_view content);

}  // namespace framesel
