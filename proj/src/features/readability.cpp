#include <cmath>

#include "argq/features.hpp"

namespace argq::features {

using textproc::TokenKind;

const std::array<std::string_view, kNumReadability>& readability_ids() {
  static const std::array<std::string_view, kNumReadability> ids = {
      "flesch_reading_ease", "flesch_kincaid_grade", "gunning_fog", "lix",      "rix",
      "smog",                "coleman_liau",         "ari",         "forcast", "linsear_write"};
  return ids;
}

ReadabilityScores readability_scores(const textproc::DocumentAnalysis& doc) {
  double words = 0, syllables = 0, complex = 0, mono = 0, long_words = 0;
  double letters = 0, alnum = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& t = doc.tokens[i];
    if (t.kind != TokenKind::word) continue;
    const int syl = doc.syllables[i];
    words += 1;
    syllables += syl;
    if (syl >= 3) complex += 1;
    if (syl == 1) mono += 1;
    double len = 0;
    for (char32_t cp : textproc::decode_utf8(t.surface)) {
      const auto cls = textproc::classify(cp);
      if (cls == textproc::CharClass::letter) {
        letters += 1;
        alnum += 1;
        len += 1;
      } else if (cls == textproc::CharClass::digit) {
        alnum += 1;
        len += 1;
      }
    }
    if (len > 6) long_words += 1;
  }
  const double sentences = static_cast<double>(doc.sentences.size());

  ReadabilityScores r;
  if (words == 0 || sentences == 0) {
    r.degenerate = true;
    return r;
  }
  const double wps = words / sentences;
  const double spw = syllables / words;
  const double linsear_raw = ((words - complex) + 3.0 * complex) / sentences;

  r.values = {
      206.835 - 1.015 * wps - 84.6 * spw,
      0.39 * wps + 11.8 * spw - 15.59,
      0.4 * (wps + 100.0 * complex / words),
      wps + 100.0 * long_words / words,
      long_words / sentences,
      1.0430 * std::sqrt(complex * 30.0 / sentences) + 3.1291,
      0.0588 * (100.0 * letters / words) - 0.296 * (100.0 * sentences / words) - 15.8,
      4.71 * (alnum / words) + 0.5 * wps - 21.43,
      20.0 - (mono * 150.0 / words) / 10.0,
      linsear_raw > 20.0 ? linsear_raw / 2.0 : linsear_raw / 2.0 - 1.0,
  };
  return r;
}

}  // namespace argq::features
