#include "argq/features.hpp"

namespace argq::features {

std::string_view adu_label_name(AduLabel l) {
  switch (l) {
    case AduLabel::thesis:
      return "thesis";
    case AduLabel::conclusion:
      return "conclusion";
    case AduLabel::premise:
      return "premise";
    case AduLabel::none:
      break;
  }
  return "none";
}

MarkerAduClassifier::MarkerAduClassifier(PhraseMatcher premise, PhraseMatcher conclusion)
    : premise_(std::move(premise)), conclusion_(std::move(conclusion)) {}

std::vector<AduLabel> MarkerAduClassifier::classify(const textproc::DocumentAnalysis& doc) const {
  std::vector<AduLabel> labels;
  labels.reserve(doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& range = doc.sentences[s];
    if (premise_.count(doc.tokens, range) > 0) {
      labels.push_back(AduLabel::premise);
    } else if (conclusion_.count(doc.tokens, range) > 0) {
      labels.push_back(AduLabel::conclusion);
    } else {
      labels.push_back(s == 0 ? AduLabel::thesis : AduLabel::none);
    }
  }
  return labels;
}

}  // namespace argq::features
